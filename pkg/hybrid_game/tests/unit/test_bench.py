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

import mock
import numpy as np

from hybrid_game import bench
from hybrid_game import game as game_ops
from hybrid_game.tests import base


class TestBench(base.TestCase):

    def test_alternating_flags(self):
        self.assertEqual([False, False, True, True, False, False, True],
                         bench.alternating_flags(7, period=2))
        schedule = game_ops.partition_from_flags(bench.alternating_flags(10))
        self.assertEqual('FB[1,5] + OL[6,10]', repr(schedule))

    def test_random_game_is_valid(self):
        rng = np.random.default_rng(3)
        game = bench.random_lq_game(rng, 5, [2, 1, 3], 4)
        self.assertEqual([], game_ops.validate_lq_game(game).problems)
        self.assertEqual(4, game.horizon)
        self.assertEqual([2, 1, 3], [B.shape[1] for B in game.dynamics[0].B])

    def test_random_game_seeded(self):
        first = bench.random_lq_game(np.random.default_rng(9), 3, [1], 2)
        second = bench.random_lq_game(np.random.default_rng(9), 3, [1], 2)
        self.assertArrayClose(first.dynamics[1].A, second.dynamics[1].A,
                              atol=0.0)

    def test_fit_power_law(self):
        sizes = [8, 16, 32, 64, 128]
        timings = [2e-3 + 1e-8 * n ** 3 for n in sizes]
        overhead, scale, exponent = bench.fit_power_law(sizes, timings)
        self.assertAlmostEqual(2e-3, overhead, places=6)
        self.assertAlmostEqual(3.0, exponent, places=4)
        self.assertAlmostEqual(1e-8, scale, delta=1e-10)

    def test_fit_without_overhead(self):
        sizes = [4, 8, 16]
        overhead, _scale, exponent = bench.fit_power_law(
            sizes, [float(n) ** 2.5 for n in sizes])
        self.assertAlmostEqual(0.0, overhead, places=2)
        self.assertAlmostEqual(2.5, exponent, places=2)

    @mock.patch('oslo_utils.timeutils.StopWatch')
    def test_slope(self, mock_watch):
        # A fixed overhead of 0.5 on top of n^3 / 1000
        sizes = [4, 8, 16, 32]
        expected = [0.5 + 1e-3 * n ** 3 for n in sizes]
        elapsed = []
        for value in expected:
            elapsed += [value + 1.0, value]
        mock_watch.return_value.elapsed.side_effect = elapsed
        timings, slope = bench.time_hybrid_solve(sizes, horizon=4,
                                                 repeats=2)
        self.assertEqual(expected, timings)
        self.assertAlmostEqual(3.0, slope, places=4)
