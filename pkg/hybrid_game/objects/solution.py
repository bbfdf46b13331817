#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

import numpy as np
from oslo_versionedobjects import base
from oslo_versionedobjects import fields

from hybrid_game.objects import base as hg_base
from hybrid_game.objects import fields as hg_fields


@base.VersionedObjectRegistry.register
class CostToGo(hg_base.VersionedObject):
    """Per-player quadratic boundary value 1/2 x'S x + s'x + c.

    Feedback periods read it as (Z, zeta, n), open-loop periods as (M, m).
    """
    VERSION = '1.0'

    fields = {
        'S': hg_fields.ListOfArraysField(),
        's': hg_fields.ListOfArraysField(),
        'c': hg_fields.ListOfFloatsField(),
    }

    @classmethod
    def zeros(cls, n_players, state_dim):
        return cls(S=[np.zeros((state_dim, state_dim))
                      for _ in range(n_players)],
                   s=[np.zeros(state_dim) for _ in range(n_players)],
                   c=[0.0] * n_players)

    def value(self, player, x):
        S = self.S[player]
        return 0.5 * x.dot(S).dot(x) + self.s[player].dot(x) + self.c[player]


@base.VersionedObjectRegistry.register
class ValueStage(hg_base.VersionedObject):
    # Base class for the per-stage records of a hybrid solution
    VERSION = '1.0'

    fields = {
        # 1-based stage index
        'stage': fields.IntegerField(),
    }


@base.VersionedObjectRegistry.register
class OpenLoopValueStage(ValueStage):
    """Open-loop costate recursion values M^i_t, m^i_t."""
    VERSION = '1.0'

    fields = {
        'M': hg_fields.ListOfArraysField(),
        'm': hg_fields.ListOfArraysField(),
    }


@base.VersionedObjectRegistry.register
class FeedbackValueStage(ValueStage):
    """Feedback values Z, zeta, n and the affine policy u = -P x - alpha."""
    VERSION = '1.0'

    fields = {
        'Z': hg_fields.ListOfArraysField(),
        'zeta': hg_fields.ListOfArraysField(),
        'n': hg_fields.ListOfFloatsField(),
        'P': hg_fields.ListOfArraysField(),
        'alpha': hg_fields.ListOfArraysField(),
    }

    def value(self, player, x):
        return (0.5 * x.dot(self.Z[player]).dot(x) +
                self.zeta[player].dot(x) + self.n[player])


@base.VersionedObjectRegistry.register
class HybridSolution(hg_base.VersionedObject):
    VERSION = '1.0'

    fields = {
        'schedule': fields.ObjectField('InformationSchedule'),

        # One record per stage 1..T, in stage order
        'stages': fields.ListOfObjectsField('ValueStage', subclasses=True),

        # Boundary value handed to each period, valid at its end + 1
        'terminals': fields.ListOfObjectsField('CostToGo'),
    }

    def stage(self, t):
        return self.stages[t - 1]

    def stages_of(self, period):
        return self.stages[period.start - 1:period.end]
