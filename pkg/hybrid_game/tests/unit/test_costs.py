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

from hybrid_game import costs
from hybrid_game.objects import game as game_obj
from hybrid_game.objects import scenario as scenario_obj
from hybrid_game.tests import base


def driving_weights(**overrides):
    values = dict(
        goal=np.array([50.0, 0.0]), goal_weight=0.01,
        nominal_speed=12.0, speed_weight=1.0,
        control_weight=np.array([[2.0, 0.5], [0.5, 1.0]]),
        lane=scenario_obj.Lane(point=np.zeros(2),
                               direction=np.array([1.0, 0.0])),
        lane_weight=0.5, lane_crossing_weight=20.0, lane_half_width=1.0,
        proximity_weight=50.0, proximity_threshold=8.0,
        speed_min=5.0, speed_max=20.0, speed_bound_weight=10.0)
    values.update(overrides)
    return scenario_obj.CostWeights(**values)


def random_state(rng, n_players):
    x = np.empty(4 * n_players)
    for i in range(n_players):
        x[4 * i:4 * i + 4] = [rng.uniform(-6, 6), rng.uniform(-3, 3),
                              rng.uniform(0, 25), rng.uniform(-1, 1)]
    return x


class TestDrivingCost(base.TestCase):

    def setUp(self):
        super(TestDrivingCost, self).setUp()
        self.model = costs.DrivingCost([driving_weights(),
                                        driving_weights(lane=None),
                                        driving_weights(goal_weight=0.1)])
        self.u = [np.array([0.1, -0.3]), np.array([0.0, 1.0]),
                  np.array([-0.2, 0.4])]

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(0)
        h = 1e-6
        for _ in range(100):
            x = random_state(rng, 3)
            stage = self.model.quadraticize(1, x, self.u)
            numeric = np.zeros((3, 12))
            for k in range(12):
                e = np.zeros(12)
                e[k] = h
                numeric[:, k] = (self.model.evaluate(1, x + e, self.u) -
                                 self.model.evaluate(1, x - e, self.u)) / (
                                     2 * h)
            for i in range(3):
                np.testing.assert_allclose(numeric[i], stage.q[i],
                                           rtol=1e-5, atol=1e-5)

    def test_hessians_match_finite_differences(self):
        rng = np.random.default_rng(1)
        h = 1e-6
        for _ in range(20):
            x = random_state(rng, 3)
            stage = self.model.quadraticize(1, x, self.u)
            for k in range(12):
                e = np.zeros(12)
                e[k] = h
                plus = self.model.quadraticize(1, x + e, self.u)
                minus = self.model.quadraticize(1, x - e, self.u)
                for i in range(3):
                    column = (plus.q[i] - minus.q[i]) / (2 * h)
                    np.testing.assert_allclose(column, stage.Q[i][:, k],
                                               rtol=1e-5, atol=1e-4)

    def test_control_derivatives(self):
        stage = self.model.quadraticize(1, np.zeros(12), self.u)
        W = np.array([[2.0, 0.5], [0.5, 1.0]])
        self.assertArrayClose(2 * W, stage.R[0][0])
        self.assertArrayClose(2 * W.dot(self.u[2]), stage.r[2][2])
        self.assertArrayClose(np.zeros((2, 2)), stage.R[0][1])
        self.assertArrayClose(np.zeros(2), stage.r[1][0])

    def test_proximity_inactive_beyond_threshold(self):
        far = np.array([0.0, 0.0, 10.0, 0.0, 5.0, 0.0, 10.0, 0.0])
        u = self.u[:2]
        with_term = costs.DrivingCost(
            [driving_weights(proximity_threshold=3.0)] * 2)
        without = costs.DrivingCost(
            [driving_weights(proximity_weight=0.0)] * 2)
        a = with_term.quadraticize(1, far, u)
        b = without.quadraticize(1, far, u)
        for i in range(2):
            self.assertArrayClose(b.q[i], a.q[i])
            self.assertArrayClose(b.Q[i], a.Q[i])
        self.assertArrayClose(without.evaluate(1, far, u),
                              with_term.evaluate(1, far, u))

    def test_proximity_active(self):
        near = np.array([0.0, 0.0, 10.0, 0.0, 2.0, 0.0, 10.0, 0.0])
        model = costs.DrivingCost([scenario_obj.CostWeights(
            proximity_weight=1.0, proximity_threshold=3.0)] * 2)
        total = model.evaluate(1, near, [np.zeros(2)] * 2)
        self.assertArrayClose([1.0, 1.0], total)
        stage = model.quadraticize(1, near, [np.zeros(2)] * 2)
        # Player 1 is pushed away from player 2, which sits east of it
        self.assertArrayClose([2.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0],
                              stage.q[0])

    def test_symmetric_hessians(self):
        rng = np.random.default_rng(2)
        stage = self.model.quadraticize(1, random_state(rng, 3), self.u)
        for Q in stage.Q:
            self.assertArrayClose(Q.T, Q, atol=0)


class TestQuadraticCost(base.TestCase):

    def test_recovers_itself(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(3, 3))
        Q = X.dot(X.T)
        stage = game_obj.QuadraticCostStage(
            Q=[Q, np.eye(3)], q=[rng.normal(size=3), np.zeros(3)],
            R=[[np.eye(1), 2 * np.eye(1)], [np.zeros((1, 1)), np.eye(1)]],
            r=[[np.ones(1), np.zeros(1)], [np.zeros(1), np.ones(1)]])
        model = costs.QuadraticCost([stage])
        x = rng.normal(size=3)
        u = [np.array([0.5]), np.array([-2.0])]

        local = model.quadraticize(1, x, u)
        self.assertArrayClose(Q, local.Q[0], atol=0)
        self.assertArrayClose(Q.dot(x) + stage.q[0], local.q[0])
        self.assertArrayClose([2.0 * -2.0], local.r[0][1])
        self.assertArrayClose([0.5 + 1.0], local.r[0][0])

        expected = (0.5 * x.dot(Q).dot(x) + stage.q[0].dot(x) +
                    0.5 * 0.25 + 0.5 + 0.5 * 2.0 * 4.0)
        self.assertAlmostEqual(expected, model.evaluate(1, x, u)[0])
