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

from hybrid_game.objects import base as hg_base
from hybrid_game.objects import fields as hg_fields


@base.VersionedObjectRegistry.register
class TrajectoryIterate(hg_base.VersionedObject):
    """States x_1..x_T, per-player controls and per-stage occlusion flags."""
    VERSION = '1.0'

    fields = {
        # T x n, row t-1 holds x_t
        'states': hg_fields.NDArrayField(),

        # One T x m_i array per player
        'controls': hg_fields.ListOfArraysField(),

        'occluded': hg_fields.ListOfBooleansField(),
    }

    def __init__(self, **kwargs):
        if 'occluded' not in kwargs and 'states' in kwargs:
            kwargs['occluded'] = [False] * len(kwargs['states'])
        super(TrajectoryIterate, self).__init__(**kwargs)

    @property
    def horizon(self):
        return self.states.shape[0]

    @property
    def n_players(self):
        return len(self.controls)

    def state(self, t):
        return self.states[t - 1]

    def stage_controls(self, t):
        return [u[t - 1] for u in self.controls]

    def is_finite(self):
        return bool(np.all(np.isfinite(self.states)) and
                    all(np.all(np.isfinite(u)) for u in self.controls))
