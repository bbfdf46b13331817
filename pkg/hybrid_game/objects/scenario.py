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
class OrientedRectangle(hg_base.VersionedObject,
                        base.ComparableVersionedObject):
    """A rectangle body in the plane, lengths in meters."""
    VERSION = '1.0'

    fields = {
        'center': hg_fields.NDArrayField(),
        'length': fields.FloatField(),
        'width': fields.FloatField(),
        'heading': fields.FloatField(),
    }

    def __init__(self, **kwargs):
        kwargs.setdefault('center', np.zeros(2))
        kwargs.setdefault('heading', 0.0)
        super(OrientedRectangle, self).__init__(**kwargs)

    def posed(self, x, y, heading):
        """Return a copy of this template placed at (x, y, heading)."""
        return OrientedRectangle(center=np.array([x, y]),
                                 length=self.length, width=self.width,
                                 heading=heading)

    def corners(self):
        c, s = np.cos(self.heading), np.sin(self.heading)
        hl, hw = 0.5 * self.length, 0.5 * self.width
        local = np.array([[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]])
        rotation = np.array([[c, -s], [s, c]])
        return self.center + local.dot(rotation.T)

    @property
    def radius(self):
        return 0.5 * np.hypot(self.length, self.width)


@base.VersionedObjectRegistry.register
class OccluderSet(hg_base.VersionedObject):
    VERSION = '1.0'

    fields = {
        'static': fields.ListOfObjectsField('OrientedRectangle'),

        # 0-based indices of players whose body blocks the view of others
        'agents': fields.ListOfIntegersField(),
    }

    def __init__(self, **kwargs):
        kwargs.setdefault('static', [])
        kwargs.setdefault('agents', [])
        super(OccluderSet, self).__init__(**kwargs)


@base.VersionedObjectRegistry.register
class Lane(hg_base.VersionedObject):
    """A straight lane centre line through point along unit direction."""
    VERSION = '1.0'

    fields = {
        'point': hg_fields.NDArrayField(),
        'direction': hg_fields.NDArrayField(),
    }

    def signed_offset(self, p):
        e = self.direction
        return e[0] * (p[1] - self.point[1]) - e[1] * (p[0] - self.point[0])

    @property
    def normal(self):
        return np.array([-self.direction[1], self.direction[0]])


@base.VersionedObjectRegistry.register
class CostWeights(hg_base.VersionedObject):
    """Running cost weights of one player."""
    VERSION = '1.0'

    fields = {
        'goal': hg_fields.NDArrayField(),
        'goal_weight': fields.FloatField(),
        'nominal_speed': fields.FloatField(),
        'speed_weight': fields.FloatField(),

        # 2 x 2 positive definite weight on (theta_dot, v_dot)
        'control_weight': hg_fields.NDArrayField(),

        'lane': fields.ObjectField('Lane', nullable=True),
        'lane_weight': fields.FloatField(),
        'lane_crossing_weight': fields.FloatField(),
        'lane_half_width': fields.FloatField(),

        'proximity_weight': fields.FloatField(),
        'proximity_threshold': fields.FloatField(),

        'speed_max': fields.FloatField(),
        'speed_min': fields.FloatField(),
        'speed_bound_weight': fields.FloatField(),
    }

    def __init__(self, **kwargs):
        kwargs.setdefault('goal', np.zeros(2))
        kwargs.setdefault('goal_weight', 0.0)
        kwargs.setdefault('nominal_speed', 0.0)
        kwargs.setdefault('speed_weight', 0.0)
        kwargs.setdefault('control_weight', np.eye(2))
        kwargs.setdefault('lane', None)
        kwargs.setdefault('lane_weight', 0.0)
        kwargs.setdefault('lane_crossing_weight', 0.0)
        kwargs.setdefault('lane_half_width', 3.75)
        kwargs.setdefault('proximity_weight', 0.0)
        kwargs.setdefault('proximity_threshold', 3.0)
        kwargs.setdefault('speed_min', 0.0)
        kwargs.setdefault('speed_max', 40.0)
        kwargs.setdefault('speed_bound_weight', 0.0)
        super(CostWeights, self).__init__(**kwargs)


@base.VersionedObjectRegistry.register
class PlayerConfig(hg_base.VersionedObject):
    VERSION = '1.0'

    fields = {
        'name': fields.StringField(),

        # (p_x, p_y, v, theta)
        'initial_state': hg_fields.NDArrayField(),
        'length': fields.FloatField(),
        'width': fields.FloatField(),
        'weights': fields.ObjectField('CostWeights'),

        # Constant (theta_dot, v_dot) used as the initial strategy
        'initial_control': hg_fields.NDArrayField(),
    }

    def __init__(self, **kwargs):
        kwargs.setdefault('initial_control', np.zeros(2))
        super(PlayerConfig, self).__init__(**kwargs)

    def body(self):
        return OrientedRectangle(length=self.length, width=self.width)


@base.VersionedObjectRegistry.register
class SolverSettings(hg_base.VersionedObject):
    VERSION = '1.0'

    fields = {
        'eta': fields.FloatField(),
        'max_iterations': fields.IntegerField(),
        'state_tolerance': fields.FloatField(),
        'control_tolerance': fields.FloatField(),
        'control_regularization': fields.FloatField(),
        'hessian_floor': fields.FloatField(),
        'max_backoffs': fields.IntegerField(),
    }


@base.VersionedObjectRegistry.register
class ScenarioConfig(hg_base.VersionedObject):
    VERSION = '1.0'

    fields = {
        'name': fields.StringField(),
        'horizon': fields.IntegerField(),
        'dt': fields.FloatField(),
        'players': fields.ListOfObjectsField('PlayerConfig'),
        'lanes': fields.ListOfObjectsField('Lane'),
        'occluders': fields.ObjectField('OccluderSet'),

        # 0-based player index pairs whose mutual visibility is tested
        'pairs': hg_fields.ListOfIntegerPairsField(),
        'samples_per_edge': fields.IntegerField(),
        'mode': hg_fields.RunModeField(),
        'seed': fields.IntegerField(nullable=True),
        'jitter_position': fields.FloatField(),
        'jitter_speed': fields.FloatField(),
        'settings': fields.ObjectField('SolverSettings'),
    }

    @property
    def n_players(self):
        return len(self.players)


@base.VersionedObjectRegistry.register
class IterationRecord(hg_base.VersionedObject):
    """Diagnostics of one outer solver iteration."""
    VERSION = '1.0'

    fields = {
        'iteration': fields.IntegerField(),
        'eta': fields.FloatField(),
        'backoffs': fields.IntegerField(),
        'schedule': fields.ObjectField('InformationSchedule'),
        'costs': hg_fields.ListOfFloatsField(),
        'state_change': fields.FloatField(),
        'control_change': fields.FloatField(),
        'argmax_stage': fields.IntegerField(),
    }

    @property
    def social_cost(self):
        return sum(self.costs)


@base.VersionedObjectRegistry.register
class RunReport(hg_base.VersionedObject):
    VERSION = '1.0'

    fields = {
        'scenario': fields.StringField(),
        'mode': hg_fields.RunModeField(),
        'converged': fields.BooleanField(),
        'iterations': fields.IntegerField(),
        'failure': fields.StringField(nullable=True),
        'occluded': hg_fields.ListOfBooleansField(),
        'min_distance': fields.FloatField(),
        'overlap_count': fields.IntegerField(),
        'max_lane_deviation': fields.FloatField(),
        'goal_distance': hg_fields.ListOfFloatsField(),
        'wall_clock': fields.FloatField(),
        'log': fields.ListOfObjectsField('IterationRecord'),
    }

    @property
    def occluded_fraction(self):
        if not self.occluded:
            return 0.0
        return sum(self.occluded) / float(len(self.occluded))


@base.VersionedObjectRegistry.register
class ComparisonReport(hg_base.VersionedObject):
    VERSION = '1.0'

    fields = {
        'scenario': fields.StringField(),
        'reports': fields.ListOfObjectsField('RunReport'),

        # mode name -> error message for modes that failed to run
        'failures': fields.DictOfStringsField(),

        # Modes sorted by increasing max lane centre deviation
        'lane_deviation_order': fields.ListOfStringsField(),
    }

    def report(self, mode):
        for report in self.reports:
            if report.mode == mode:
                return report
        return None
