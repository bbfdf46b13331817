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

"""Random LQ games and the timing of the hybrid solver."""

import numpy as np
from oslo_log import log as logging
from oslo_utils import timeutils
from scipy import optimize

from hybrid_game import game as game_ops
from hybrid_game import lq_solvers
from hybrid_game.objects import game as game_obj

LOG = logging.getLogger(__name__)


def random_lq_game(rng, state_dim, control_dims, horizon):
    """A random LQ game with PSD state costs and PD own-control costs.

    :param rng: `numpy.random.Generator`
    """
    n, N = state_dim, len(control_dims)
    dynamics, costs = [], []
    for _t in range(horizon):
        A = np.eye(n) + rng.normal(scale=0.3 / np.sqrt(n), size=(n, n))
        B = [rng.normal(size=(n, m)) for m in control_dims]
        Q, q, R, r = [], [], [], []
        for i in range(N):
            X = rng.normal(size=(n, n))
            Q.append(X.dot(X.T) / n)
            q.append(rng.normal(size=n))
            Ri, ri = [], []
            for j, m in enumerate(control_dims):
                Y = rng.normal(size=(m, m))
                if i == j:
                    Ri.append(Y.dot(Y.T) + np.eye(m))
                else:
                    Ri.append(0.1 * Y.dot(Y.T))
                ri.append(rng.normal(size=m))
            R.append(Ri)
            r.append(ri)
        dynamics.append(game_obj.LinearDynamicsStage(A=A, B=B))
        costs.append(game_obj.QuadraticCostStage(Q=Q, q=q, R=R, r=r))
    return game_obj.LQGame(dynamics=dynamics, costs=costs)


def alternating_flags(horizon, period=5):
    """Occluded and visible runs of `period` stages, starting visible."""
    return [(t // period) % 2 == 1 for t in range(horizon)]


def fit_power_law(sizes, timings):
    """Fit timings to overhead + scale * size**exponent.

    The residuals are taken in log space so every size weighs alike. The
    overhead is the fixed per-solve cost of the interpreter and of object
    construction, bounded by the fastest timing.

    :returns: (overhead, scale, exponent)
    """
    sizes = np.asarray(sizes, dtype=np.float64)
    timings = np.asarray(timings, dtype=np.float64)
    floor = float(timings.min())
    start = [0.5 * floor,
             np.log(timings.max() - 0.5 * floor) - 3.0 * np.log(sizes.max()),
             3.0]

    def residuals(params):
        overhead, log_scale, exponent = params
        model = overhead + np.exp(log_scale + exponent * np.log(sizes))
        return np.log(model) - np.log(timings)

    fit = optimize.least_squares(
        residuals, start, bounds=([0.0, -np.inf, 0.0], [floor, np.inf, 6.0]),
        xtol=1e-12, ftol=1e-12, gtol=1e-12)
    overhead, log_scale, exponent = fit.x
    return float(overhead), float(np.exp(log_scale)), float(exponent)


def time_hybrid_solve(state_dims, n_players=2, control_dim=2, horizon=20,
                      repeats=5, seed=0):
    """Best-of-repeats wall clock of solve_lq_hybrid per state dimension.

    :returns: (timings, slope) with slope the exponent of the
              size-dependent part of the timings, once the fixed
              per-solve overhead is separated by `fit_power_law`
    """
    rng = np.random.default_rng(seed)
    schedule = game_ops.partition_from_flags(alternating_flags(horizon))
    timings = []
    for n in state_dims:
        game = random_lq_game(rng, n, [control_dim] * n_players, horizon)
        best = None
        for _r in range(repeats):
            watch = timeutils.StopWatch()
            watch.start()
            lq_solvers.solve_lq_hybrid(game, schedule)
            elapsed = watch.elapsed()
            best = elapsed if best is None else min(best, elapsed)
        LOG.debug("n=%d: %.6fs", n, best)
        timings.append(best)

    raw = float(np.polyfit(np.log(state_dims), np.log(timings), 1)[0])
    overhead, _scale, slope = fit_power_law(state_dims, timings)
    LOG.debug("Overhead %.6fs, exponent %.3f, raw log-log slope %.3f",
              overhead, slope, raw)
    return timings, slope
