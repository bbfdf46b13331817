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

from hybrid_game import dynamics
from hybrid_game import exception
from hybrid_game.objects import game as game_obj
from hybrid_game.tests import base


def extended_step(state, control, dt):
    px, py, v, theta = np.asarray(state, dtype=np.longdouble)
    omega, accel = np.asarray(control, dtype=np.longdouble)
    dt = np.longdouble(dt)
    return np.array([px + dt * v * np.cos(theta),
                     py + dt * v * np.sin(theta),
                     v + dt * accel,
                     theta + dt * omega])


class TestUnicycle(base.TestCase):

    def test_fixed_point(self):
        state = np.array([1.0, -2.0, 0.0, 0.7])
        self.assertArrayClose(state, dynamics.unicycle_step(
            state, np.zeros(2), 0.1), atol=0)

    def test_axis_aligned(self):
        nxt = dynamics.unicycle_step(np.array([0.0, 0.0, 10.0, 0.0]),
                                     np.zeros(2), 0.1)
        self.assertArrayClose([1.0, 0.0, 10.0, 0.0], nxt, atol=1e-15)

    def test_controls(self):
        nxt = dynamics.unicycle_step(np.array([0.0, 0.0, 0.0, 0.0]),
                                     np.array([0.5, 2.0]), 0.1)
        self.assertArrayClose([0.0, 0.0, 0.2, 0.05], nxt, atol=1e-15)

    def test_extended_precision(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            state = rng.uniform([-100, -100, 0, -np.pi],
                                [100, 100, 30, np.pi])
            control = rng.uniform(-2, 2, 2)
            expected = extended_step(state, control, 0.1)
            self.assertArrayClose(expected.astype(float),
                                  dynamics.unicycle_step(state, control,
                                                         0.1),
                                  atol=1e-12, rtol=1e-12)

    def test_jacobian_entries(self):
        A, B = dynamics.unicycle_jacobians(np.array([0.0, 0.0, 10.0, 0.0]),
                                           0.1)
        self.assertAlmostEqual(0.1, A[0, 2])
        self.assertAlmostEqual(1.0, A[1, 3])
        self.assertAlmostEqual(0.1, B[2, 1])
        self.assertAlmostEqual(0.1, B[3, 0])

    def test_jacobians_finite_differences(self):
        rng = np.random.default_rng(1)
        model = dynamics.UnicycleDynamics(2, 0.1)
        h = 1e-5
        for _ in range(100):
            x = rng.uniform(-10, 10, 8)
            u = [rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)]
            A, B = model.jacobians(1, x, u)

            numeric = np.zeros_like(A)
            for k in range(8):
                e = np.zeros(8)
                e[k] = h
                numeric[:, k] = (model.step(1, x + e, u) -
                                 model.step(1, x - e, u)) / (2 * h)
            np.testing.assert_allclose(numeric, A, rtol=1e-6, atol=1e-8)

            for i in range(2):
                numeric = np.zeros_like(B[i])
                for k in range(2):
                    e = np.zeros(2)
                    e[k] = h
                    plus = [uj + e if j == i else uj
                            for j, uj in enumerate(u)]
                    minus = [uj - e if j == i else uj
                             for j, uj in enumerate(u)]
                    numeric[:, k] = (model.step(1, x, plus) -
                                     model.step(1, x, minus)) / (2 * h)
                np.testing.assert_allclose(numeric, B[i], rtol=1e-6,
                                           atol=1e-8)

    def test_player_blocks(self):
        model = dynamics.UnicycleDynamics(3, 0.1)
        self.assertEqual(12, model.state_dim)
        self.assertEqual([2, 2, 2], model.control_dims)
        self.assertEqual(3, model.n_players)
        stage = model.linearize(1, np.zeros(12), [np.zeros(2)] * 3)
        self.assertEqual((12, 2), stage.B[1].shape)
        self.assertArrayClose(np.zeros((4, 2)), stage.B[1][:4])
        self.assertArrayClose(np.zeros((4, 2)), stage.B[1][8:])
        self.assertNotEqual(0.0, np.abs(stage.B[1][4:8]).sum())

    def test_bad_dt(self):
        self.assertRaises(ValueError, dynamics.UnicycleDynamics, 2, 0.0)


class TestLinearDynamics(base.TestCase):

    def test_exact(self):
        A = np.array([[1.0, 0.1], [0.0, 1.0]])
        B = [np.array([[0.0], [0.1]]), np.array([[1.0], [0.0]])]
        model = dynamics.LinearDynamics(
            [game_obj.LinearDynamicsStage(A=A, B=B)] * 2)
        x = np.array([1.0, 2.0])
        u = [np.array([3.0]), np.array([-1.0])]
        self.assertArrayClose([0.2, 2.3], model.step(2, x, u))
        stage = model.linearize(1, 100 * x, u)
        self.assertArrayClose(A, stage.A, atol=0)
        self.assertArrayClose(B[1], stage.B[1], atol=0)
        self.assertEqual([1, 1], model.control_dims)

    def test_empty(self):
        self.assertRaises(exception.DimensionMismatch,
                          dynamics.LinearDynamics, [])
