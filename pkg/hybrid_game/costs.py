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

"""Running costs of the players and their local quadratic models.

A model's `quadraticize` returns the raw derivatives at a point, packed
as a `QuadraticCostStage`: Q and q are the state Hessian and gradient,
R[i][j] and r[i][j] the Hessian and gradient of player i's cost in u^j.
Clamping and regularization are left to the caller.
"""

import abc

import numpy as np
import six

from hybrid_game.objects import game as game_obj

PROXIMITY_EPSILON = 1e-9


@six.add_metaclass(abc.ABCMeta)
class CostModel(object):

    @abc.abstractmethod
    def evaluate(self, t, x, u):
        """Return the array of N stage costs at 1-based stage t."""

    @abc.abstractmethod
    def quadraticize(self, t, x, u):
        """Return a `QuadraticCostStage` of derivatives at (x, u)."""


class DrivingCost(CostModel):
    """Weighted sum of the driving penalties of every player.

    Each player pays for distance to goal, deviation from nominal speed,
    control effort, lane centre offset, lane crossing beyond the half
    width, proximity to other players and leaving the speed band.
    Indicator-guarded terms use the active set at the evaluation point.
    """

    def __init__(self, weights):
        """
        :param weights: list of per-player `CostWeights`
        """
        self.weights = list(weights)

    @property
    def n_players(self):
        return len(self.weights)

    @staticmethod
    def _player(x, i):
        return x[4 * i:4 * i + 4]

    def _lane_offset(self, w, p):
        if w.lane is None:
            return None, None
        return w.lane.signed_offset(p), w.lane.normal

    def _player_cost(self, i, x, u):
        w = self.weights[i]
        px, py, v, _theta = self._player(x, i)
        p = np.array([px, py])
        total = 0.0

        total += w.goal_weight * np.sum((p - w.goal) ** 2)
        total += w.speed_weight * (v - w.nominal_speed) ** 2
        total += u[i].dot(w.control_weight).dot(u[i])

        s, _normal = self._lane_offset(w, p)
        if s is not None:
            total += w.lane_weight * s ** 2
            if abs(s) > w.lane_half_width:
                total += w.lane_crossing_weight * (
                    abs(s) - w.lane_half_width) ** 2

        for j in range(self.n_players):
            if j == i:
                continue
            rho = np.linalg.norm(p - self._player(x, j)[:2])
            if rho < w.proximity_threshold:
                total += w.proximity_weight * (
                    w.proximity_threshold - rho) ** 2

        if v > w.speed_max:
            total += w.speed_bound_weight * (v - w.speed_max) ** 2
        elif v < w.speed_min:
            total += w.speed_bound_weight * (w.speed_min - v) ** 2
        return total

    def evaluate(self, t, x, u):
        return np.array([self._player_cost(i, x, u)
                         for i in range(self.n_players)])

    def _state_derivatives(self, i, x):
        n = 4 * self.n_players
        w = self.weights[i]
        grad = np.zeros(n)
        hess = np.zeros((n, n))
        px, py, v, _theta = self._player(x, i)
        p = np.array([px, py])
        pos = slice(4 * i, 4 * i + 2)
        vel = 4 * i + 2

        grad[pos] += 2.0 * w.goal_weight * (p - w.goal)
        hess[pos, pos] += 2.0 * w.goal_weight * np.eye(2)

        grad[vel] += 2.0 * w.speed_weight * (v - w.nominal_speed)
        hess[vel, vel] += 2.0 * w.speed_weight

        s, normal = self._lane_offset(w, p)
        if s is not None:
            nn = np.outer(normal, normal)
            grad[pos] += 2.0 * w.lane_weight * s * normal
            hess[pos, pos] += 2.0 * w.lane_weight * nn
            if abs(s) > w.lane_half_width:
                excess = abs(s) - w.lane_half_width
                grad[pos] += (2.0 * w.lane_crossing_weight * excess *
                              np.sign(s) * normal)
                hess[pos, pos] += 2.0 * w.lane_crossing_weight * nn

        for j in range(self.n_players):
            if j == i:
                continue
            other = slice(4 * j, 4 * j + 2)
            d = p - x[other]
            rho = np.linalg.norm(d)
            if rho >= w.proximity_threshold or rho < PROXIMITY_EPSILON:
                continue
            e = d / rho
            gap = w.proximity_threshold - rho
            g = -2.0 * w.proximity_weight * gap * e
            H = 2.0 * w.proximity_weight * (
                np.outer(e, e) - gap * (np.eye(2) - np.outer(e, e)) / rho)
            grad[pos] += g
            grad[other] -= g
            hess[pos, pos] += H
            hess[pos, other] -= H
            hess[other, pos] -= H
            hess[other, other] += H

        if v > w.speed_max:
            grad[vel] += 2.0 * w.speed_bound_weight * (v - w.speed_max)
            hess[vel, vel] += 2.0 * w.speed_bound_weight
        elif v < w.speed_min:
            grad[vel] -= 2.0 * w.speed_bound_weight * (w.speed_min - v)
            hess[vel, vel] += 2.0 * w.speed_bound_weight
        return grad, hess

    def quadraticize(self, t, x, u):
        N = self.n_players
        Q, q, R, r = [], [], [], []
        for i in range(N):
            grad, hess = self._state_derivatives(i, x)
            Q.append(0.5 * (hess + hess.T))
            q.append(grad)
            Ri, ri = [], []
            for j in range(N):
                dim = len(u[j])
                if j == i:
                    W = self.weights[i].control_weight
                    Ri.append(W + W.T)
                    ri.append((W + W.T).dot(u[i]))
                else:
                    Ri.append(np.zeros((dim, dim)))
                    ri.append(np.zeros(dim))
            R.append(Ri)
            r.append(ri)
        return game_obj.QuadraticCostStage(Q=Q, q=q, R=R, r=r)


class QuadraticCost(CostModel):
    """Exactly quadratic costs given by QuadraticCostStage records."""

    def __init__(self, stages):
        self.stages = list(stages)

    def evaluate(self, t, x, u):
        stage = self.stages[t - 1]
        costs = []
        for i in range(len(stage.Q)):
            total = 0.5 * x.dot(stage.Q[i]).dot(x) + stage.q[i].dot(x)
            for j, uj in enumerate(u):
                total += (0.5 * uj.dot(stage.R[i][j]).dot(uj) +
                          stage.r[i][j].dot(uj))
            costs.append(total)
        return np.array(costs)

    def quadraticize(self, t, x, u):
        stage = self.stages[t - 1]
        N = len(stage.Q)
        return game_obj.QuadraticCostStage(
            Q=[stage.Q[i].copy() for i in range(N)],
            q=[stage.Q[i].dot(x) + stage.q[i] for i in range(N)],
            R=[[stage.R[i][j].copy() for j in range(N)] for i in range(N)],
            r=[[stage.R[i][j].dot(u[j]) + stage.r[i][j] for j in range(N)]
               for i in range(N)])
