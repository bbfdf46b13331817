# Licensed under the Apache License, Version 2.0 (the "License"); you may
# not use this file except in compliance with the License. You may obtain
# a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations
# under the License.

import numpy as np

from hybrid_game import bench
from hybrid_game import game as game_ops
from hybrid_game import lq_solvers
from hybrid_game.objects import base as hg_base
from hybrid_game.objects import fields
from hybrid_game.objects import scenario
from hybrid_game.objects import schedule
from hybrid_game.objects import solution
from hybrid_game.objects import trajectory
from hybrid_game.tests import base


class TestSchedule(base.TestCase):

    def setUp(self):
        super(TestSchedule, self).setUp()
        self.schedule = schedule.InformationSchedule(periods=[
            schedule.Period(start=1, end=2,
                            mode=fields.InformationMode.FEEDBACK),
            schedule.Period(start=3, end=4,
                            mode=fields.InformationMode.OPEN_LOOP),
            schedule.Period(start=5, end=5,
                            mode=fields.InformationMode.FEEDBACK)])

    def test_period(self):
        period = self.schedule.periods[1]
        self.assertTrue(period.occluded)
        self.assertEqual(2, len(period))
        self.assertEqual([3, 4], list(period.stages))
        self.assertEqual('OL[3,4]', repr(period))

    def test_counts(self):
        self.assertEqual(5, self.schedule.horizon)
        self.assertEqual(1, self.schedule.occluded_count)
        self.assertEqual(2, self.schedule.visible_count)
        self.assertEqual('FB[1,2] + OL[3,4] + FB[5,5]',
                         repr(self.schedule))

    def test_period_of(self):
        index, period = self.schedule.period_of(4)
        self.assertEqual(1, index)
        self.assertEqual(3, period.start)
        self.assertRaises(IndexError, self.schedule.period_of, 6)

    def test_equality(self):
        same = game_ops.partition_from_flags(
            [False, False, True, True, False])
        self.assertEqual(self.schedule, same)
        other = game_ops.partition_from_flags([False] * 5)
        self.assertNotEqual(self.schedule, other)

    def test_mode_rejected(self):
        self.assertRaises(ValueError, schedule.Period, start=1, end=1,
                          mode='partial')


class TestSolutionObjects(base.TestCase):

    def test_cost_to_go_zeros(self):
        terminal = solution.CostToGo.zeros(2, 3)
        self.assertEqual(2, len(terminal.S))
        self.assertEqual((3, 3), terminal.S[1].shape)
        self.assertEqual(0.0, terminal.value(1, np.ones(3)))

    def test_cost_to_go_value(self):
        terminal = solution.CostToGo(S=[2.0 * np.eye(2)],
                                     s=[np.array([1.0, 0.0])], c=[0.5])
        self.assertAlmostEqual(1.0 + 1.0 + 0.5,
                               terminal.value(0, np.array([1.0, 0.0])))

    def test_hybrid_solution_primitive(self):
        rng = np.random.default_rng(3)
        game = bench.random_lq_game(rng, 3, [1, 2], 4)
        hybrid = lq_solvers.solve_lq_hybrid(
            game, game_ops.partition_from_flags([False, True, True, False]))

        primitive = hybrid.obj_to_primitive()
        copy = hg_base.VersionedObject.obj_from_primitive(primitive)

        self.assertEqual(repr(hybrid.schedule), repr(copy.schedule))
        self.assertIsInstance(copy.stage(1), solution.FeedbackValueStage)
        self.assertIsInstance(copy.stage(2), solution.OpenLoopValueStage)
        self.assertEqual(3, copy.stage(3).stage)
        for original, restored in zip(hybrid.stages[1].M, copy.stages[1].M):
            self.assertArrayClose(original, restored, atol=0)
        self.assertArrayClose(hybrid.stage(4).P[1], copy.stage(4).P[1],
                              atol=0)

    def test_stages_of(self):
        rng = np.random.default_rng(4)
        game = bench.random_lq_game(rng, 2, [1], 5)
        hybrid = lq_solvers.solve_lq_hybrid(
            game, game_ops.partition_from_flags([True, True, False, False,
                                                 False]))
        period = hybrid.schedule.periods[1]
        self.assertEqual([3, 4, 5],
                         [r.stage for r in hybrid.stages_of(period)])


class TestTrajectoryIterate(base.TestCase):

    def test_default_flags(self):
        it = trajectory.TrajectoryIterate(states=np.zeros((3, 2)),
                                          controls=[np.zeros((3, 1))])
        self.assertEqual([False, False, False], it.occluded)
        self.assertEqual(3, it.horizon)
        self.assertEqual(1, it.n_players)

    def test_stage_access(self):
        states = np.arange(6.0).reshape(3, 2)
        controls = [np.array([[1.0], [2.0], [3.0]]), np.zeros((3, 2))]
        it = trajectory.TrajectoryIterate(states=states, controls=controls)
        self.assertArrayClose([2.0, 3.0], it.state(2))
        self.assertArrayClose([3.0], it.stage_controls(3)[0])
        self.assertEqual(2, len(it.stage_controls(1)))

    def test_is_finite(self):
        it = trajectory.TrajectoryIterate(states=np.zeros((2, 2)),
                                          controls=[np.zeros((2, 1))])
        self.assertTrue(it.is_finite())
        it.controls = [np.array([[0.0], [np.nan]])]
        self.assertFalse(it.is_finite())


class TestScenarioObjects(base.TestCase):

    def test_rectangle_corners(self):
        rect = scenario.OrientedRectangle(center=np.array([1.0, 2.0]),
                                          length=4.0, width=2.0,
                                          heading=np.pi / 2)
        self.assertArrayClose([[0.0, 4.0], [0.0, 0.0], [2.0, 0.0],
                               [2.0, 4.0]], rect.corners(), atol=1e-12)
        self.assertAlmostEqual(np.sqrt(5.0), rect.radius)

    def test_rectangle_posed(self):
        template = scenario.OrientedRectangle(length=4.0, width=2.0)
        self.assertArrayClose([0.0, 0.0], template.center)
        posed = template.posed(3.0, -1.0, 0.5)
        self.assertArrayClose([3.0, -1.0], posed.center)
        self.assertEqual(0.5, posed.heading)
        self.assertEqual(0.0, template.heading)

    def test_lane_offset(self):
        lane = scenario.Lane(point=np.array([0.0, 3.75]),
                             direction=np.array([-1.0, 0.0]))
        # Westbound lane: its left side is south
        self.assertAlmostEqual(-1.25, lane.signed_offset([10.0, 5.0]))
        self.assertArrayClose([0.0, -1.0], lane.normal)

    def test_weight_defaults(self):
        weights = scenario.CostWeights()
        self.assertIsNone(weights.lane)
        self.assertArrayClose(np.eye(2), weights.control_weight)
        self.assertEqual(3.75, weights.lane_half_width)
        self.assertEqual(3.0, weights.proximity_threshold)

    def test_player_body(self):
        player = scenario.PlayerConfig(
            name='car', initial_state=np.array([1.0, 2.0, 3.0, 0.0]),
            length=4.48, width=1.76, weights=scenario.CostWeights())
        body = player.body()
        self.assertEqual(4.48, body.length)
        self.assertArrayClose([0.0, 0.0], player.initial_control)

    def test_occluded_fraction(self):
        report = scenario.RunReport(occluded=[True, False, False, True])
        self.assertEqual(0.5, report.occluded_fraction)
        self.assertEqual(0.0,
                         scenario.RunReport(occluded=[]).occluded_fraction)

    def test_comparison_lookup(self):
        hybrid = scenario.RunReport(mode=fields.RunMode.HYBRID)
        comparison = scenario.ComparisonReport(reports=[hybrid], failures={})
        self.assertIs(hybrid, comparison.report('hybrid'))
        self.assertIsNone(comparison.report('feedback'))

    def test_social_cost(self):
        record = scenario.IterationRecord(costs=[1.5, 2.0])
        self.assertEqual(3.5, record.social_cost)
