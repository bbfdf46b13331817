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

from oslo_versionedobjects import base
from oslo_versionedobjects import fields

from hybrid_game.objects import base as hg_base
from hybrid_game.objects import fields as hg_fields


@base.VersionedObjectRegistry.register
class LinearDynamicsStage(hg_base.VersionedObject):
    """One stage of x_{t+1} = A x_t + sum_i B^i u^i_t."""
    # Version 1.0: Initial version
    VERSION = '1.0'

    fields = {
        # n x n state transition
        'A': hg_fields.NDArrayField(),

        # One n x m_i control map per player
        'B': hg_fields.ListOfArraysField(),
    }

    @property
    def n_players(self):
        return len(self.B)


@base.VersionedObjectRegistry.register
class QuadraticCostStage(hg_base.VersionedObject):
    """Stage costs of all players.

    Player i pays
    1/2 (x'Q^i x + 2 q^i'x) + 1/2 sum_j (u^j'R^{ij} u^j + 2 r^{ij}'u^j).
    """
    VERSION = '1.0'

    fields = {
        'Q': hg_fields.ListOfArraysField(),
        'q': hg_fields.ListOfArraysField(),

        # R[i][j] is m_j x m_j, r[i][j] has length m_j
        'R': hg_fields.ListOfListOfArraysField(),
        'r': hg_fields.ListOfListOfArraysField(),
    }

    @property
    def n_players(self):
        return len(self.Q)


@base.VersionedObjectRegistry.register
class LQGame(hg_base.VersionedObject):
    """A finite horizon N-player linear quadratic game."""
    VERSION = '1.0'

    fields = {
        'dynamics': fields.ListOfObjectsField('LinearDynamicsStage'),
        'costs': fields.ListOfObjectsField('QuadraticCostStage'),
    }

    @property
    def horizon(self):
        return len(self.dynamics)

    @property
    def n_players(self):
        return self.dynamics[0].n_players

    @property
    def state_dim(self):
        return self.dynamics[0].A.shape[0]

    @property
    def control_dims(self):
        return [B.shape[1] for B in self.dynamics[0].B]

    def stage(self, t):
        """Return the (dynamics, cost) pair of 1-based stage t."""
        return self.dynamics[t - 1], self.costs[t - 1]


@base.VersionedObjectRegistry.register
class ValidationReport(hg_base.VersionedObject):
    VERSION = '1.0'

    fields = {
        'problems': fields.ListOfStringsField(),
    }

    def __init__(self, **kwargs):
        kwargs.setdefault('problems', [])
        super(ValidationReport, self).__init__(**kwargs)

    @property
    def valid(self):
        return not self.problems
