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

import abc

import numpy as np
import six

from hybrid_game import exception
from hybrid_game.objects import game as game_obj


@six.add_metaclass(abc.ABCMeta)
class DynamicsModel(object):
    """Joint discrete-time dynamics of all players.

    Stage indices passed to the model are 1-based.
    """

    @abc.abstractproperty
    def state_dim(self):
        """Dimension of the joint state."""

    @abc.abstractproperty
    def control_dims(self):
        """List of per-player control dimensions."""

    @property
    def n_players(self):
        return len(self.control_dims)

    @abc.abstractmethod
    def step(self, t, x, u):
        """Return x_{t+1} given x_t and the list of player controls."""

    @abc.abstractmethod
    def jacobians(self, t, x, u):
        """Return (A, [B^1..B^N]) of `step` at (x, u)."""

    def linearize(self, t, x, u):
        A, B = self.jacobians(t, x, u)
        return game_obj.LinearDynamicsStage(A=A, B=B)


def unicycle_step(state, control, dt):
    """Forward Euler step of (p_x, p_y, v, theta) under (theta_dot, v_dot).
    """
    px, py, v, theta = state
    omega, accel = control
    return np.array([px + dt * v * np.cos(theta),
                     py + dt * v * np.sin(theta),
                     v + dt * accel,
                     theta + dt * omega])


def unicycle_jacobians(state, dt):
    _px, _py, v, theta = state
    c, s = np.cos(theta), np.sin(theta)
    A = np.eye(4)
    A[0, 2] = dt * c
    A[0, 3] = -dt * v * s
    A[1, 2] = dt * s
    A[1, 3] = dt * v * c
    B = np.zeros((4, 2))
    B[2, 1] = dt
    B[3, 0] = dt
    return A, B


class UnicycleDynamics(DynamicsModel):
    """N decoupled unicycles; player i owns state rows 4i..4i+3."""

    PLAYER_STATE_DIM = 4
    PLAYER_CONTROL_DIM = 2

    def __init__(self, n_players, dt):
        if dt <= 0:
            raise ValueError("dt must be positive, got %r" % (dt,))
        self._n_players = n_players
        self.dt = dt

    @property
    def state_dim(self):
        return self.PLAYER_STATE_DIM * self._n_players

    @property
    def control_dims(self):
        return [self.PLAYER_CONTROL_DIM] * self._n_players

    def _block(self, i):
        return slice(self.PLAYER_STATE_DIM * i,
                     self.PLAYER_STATE_DIM * (i + 1))

    def step(self, t, x, u):
        nxt = np.empty(self.state_dim)
        for i in range(self._n_players):
            nxt[self._block(i)] = unicycle_step(x[self._block(i)], u[i],
                                                self.dt)
        return nxt

    def jacobians(self, t, x, u):
        A = np.zeros((self.state_dim, self.state_dim))
        B = []
        for i in range(self._n_players):
            block = self._block(i)
            Ai, Bi = unicycle_jacobians(x[block], self.dt)
            A[block, block] = Ai
            full = np.zeros((self.state_dim, self.PLAYER_CONTROL_DIM))
            full[block] = Bi
            B.append(full)
        return A, B


class LinearDynamics(DynamicsModel):
    """Time-varying linear dynamics given by LinearDynamicsStage records.

    Used to run the outer loop on an exactly linear-quadratic problem.
    """

    def __init__(self, stages):
        if not stages:
            raise exception.DimensionMismatch(stage=1,
                                              reason="no dynamics stages")
        self.stages = list(stages)

    @property
    def state_dim(self):
        return self.stages[0].A.shape[0]

    @property
    def control_dims(self):
        return [B.shape[1] for B in self.stages[0].B]

    def step(self, t, x, u):
        stage = self.stages[t - 1]
        return stage.A.dot(x) + sum(B.dot(ui) for B, ui in zip(stage.B, u))

    def jacobians(self, t, x, u):
        stage = self.stages[t - 1]
        return stage.A.copy(), [B.copy() for B in stage.B]
