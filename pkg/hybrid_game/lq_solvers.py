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

"""Open-loop, feedback and hybrid Nash solvers for LQ games.

Costs follow the convention of `QuadraticCostStage`: stage t charges
player i for the state x_t and for every player's control u^j_t, and a
`CostToGo` valid at t_e + 1 closes each period. Stage indices are 1-based.
"""

import numpy as np
from oslo_log import log as logging
from scipy import linalg

from hybrid_game import exception
from hybrid_game import game as game_ops
from hybrid_game.objects import fields
from hybrid_game.objects import game as game_obj
from hybrid_game.objects import solution
from hybrid_game.objects import trajectory as trajectory_obj

LOG = logging.getLogger(__name__)

CONDITION_FLOOR = 1e-12
ASYMMETRY_LIMIT = 1e-6
SYMMETRY_TOLERANCE = 1e-12


class RecursionWorkspace(object):
    """Coupling data of one stage.

    Open-loop stages fill `Lam` (with its LU factors) and the drift `w`;
    feedback stages fill the closed-loop map `F` and offset `beta`.
    """

    def __init__(self, stage, Lam=None, lu=None, w=None, F=None, beta=None):
        self.stage = stage
        self.Lam = Lam
        self.lu = lu
        self.w = w
        self.F = F
        self.beta = beta


def _rcond(matrix):
    with np.errstate(divide='ignore', invalid='ignore'):
        cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond == 0:
        return 0.0
    return 1.0 / cond


def _symmetric(matrix):
    return 0.5 * (matrix + matrix.T)


def _open_loop_coupling(t, dyn, cost, M_next, m_next, condition_floor):
    n = dyn.A.shape[0]
    Lam = np.eye(n)
    w = np.zeros(n)
    for j, B in enumerate(dyn.B):
        R = cost.R[j][j]
        gain = B.dot(linalg.solve(R, B.T))
        Lam += gain.dot(M_next[j])
        w += B.dot(linalg.solve(R, B.T.dot(m_next[j]) + cost.r[j][j]))

    rcond = _rcond(Lam)
    if rcond < condition_floor:
        raise exception.IllConditionedCoupling(stage=t, rcond=rcond)
    return RecursionWorkspace(t, Lam=Lam, lu=linalg.lu_factor(Lam), w=w)


def solve_lq_open_loop(game, period, terminal,
                       condition_floor=CONDITION_FLOOR):
    """Backward open-loop costate recursion over one period.

    :param game: `LQGame`
    :param period: `Period` whose stages are solved
    :param terminal: `CostToGo` valid at period.end + 1, read as (M, m)
    :returns: list of `OpenLoopValueStage` for period.start..period.end
    :raises `exception.IllConditionedCoupling` when Lambda_t is singular
    """
    M_next = list(terminal.S)
    m_next = list(terminal.s)
    records = []
    for t in reversed(period.stages):
        dyn, cost = game.stage(t)
        work = _open_loop_coupling(t, dyn, cost, M_next, m_next,
                                   condition_floor)
        Lam_A = linalg.lu_solve(work.lu, dyn.A)
        Lam_w = linalg.lu_solve(work.lu, work.w)

        M = [cost.Q[i] + dyn.A.T.dot(M_next[i]).dot(Lam_A)
             for i in range(len(M_next))]
        m = [cost.q[i] + dyn.A.T.dot(m_next[i] - M_next[i].dot(Lam_w))
             for i in range(len(m_next))]
        records.append(solution.OpenLoopValueStage(stage=t, M=M, m=m))
        M_next, m_next = M, m

    records.reverse()
    LOG.debug("Open-loop period %r solved", period)
    return records


def open_loop_controls(game, values, x_entry, period, terminal=None,
                       condition_floor=CONDITION_FLOOR):
    """Forward pass of the open-loop equilibrium from an entry state.

    :param values: `OpenLoopValueStage` records covering the period
    :param x_entry: state at period.start
    :param terminal: `CostToGo` the period was solved against; zero when
                     omitted
    :returns: (controls, states) with one len(period) x m_i array per
              player and the (len(period) + 1) x n states x_{t_s..t_e+1}
    """
    x = np.asarray(x_entry, dtype=np.float64)
    n = game.state_dim
    if x.shape != (n,):
        raise exception.DimensionMismatch(
            stage=period.start,
            reason="entry state has shape %s, expected (%d,)" %
            (x.shape, n))
    if len(values) != len(period):
        raise exception.DimensionMismatch(
            stage=period.start,
            reason="%d value records for a period of %d stages" %
            (len(values), len(period)))
    if terminal is None:
        terminal = solution.CostToGo.zeros(game.n_players, n)

    states = [x]
    controls = [[] for _ in range(game.n_players)]
    for k, t in enumerate(period.stages):
        dyn, cost = game.stage(t)
        if k + 1 < len(values):
            M_next, m_next = values[k + 1].M, values[k + 1].m
        else:
            M_next, m_next = terminal.S, terminal.s
        work = _open_loop_coupling(t, dyn, cost, M_next, m_next,
                                   condition_floor)
        x = linalg.lu_solve(work.lu, dyn.A.dot(x) - work.w)
        for i, B in enumerate(dyn.B):
            costate = M_next[i].dot(x) + m_next[i]
            controls[i].append(-linalg.solve(
                cost.R[i][i], B.T.dot(costate) + cost.r[i][i]))
        states.append(x)

    return ([np.array(u) for u in controls], np.array(states))


def _is_symmetric(matrix):
    scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
    return float(np.max(np.abs(matrix - matrix.T), initial=0.0)) <= (
        SYMMETRY_TOLERANCE * scale)


def _feedback_stage(t, dyn, cost, Z_next, zeta_next, n_next,
                    condition_floor, symmetric=True):
    N = len(dyn.B)
    n = dyn.A.shape[0]
    dims = [B.shape[1] for B in dyn.B]
    offsets = np.concatenate(([0], np.cumsum(dims)))

    # Rows of player i: R^ii P^i + B^i' Z^i sum_j B^j P^j = B^i' Z^i A,
    # with the same left hand side for alpha.
    S = np.zeros((offsets[-1], offsets[-1]))
    Y = np.zeros((offsets[-1], n + 1))
    for i in range(N):
        rows = slice(offsets[i], offsets[i + 1])
        BZ = dyn.B[i].T.dot(Z_next[i])
        for j in range(N):
            S[rows, offsets[j]:offsets[j + 1]] = BZ.dot(dyn.B[j])
        S[rows, rows] += cost.R[i][i]
        Y[rows, :n] = BZ.dot(dyn.A)
        Y[rows, n] = dyn.B[i].T.dot(zeta_next[i]) + cost.r[i][i]

    rcond = _rcond(S)
    if rcond < condition_floor:
        raise exception.SingularCoupledSystem(stage=t, rcond=rcond)
    gains = linalg.lu_solve(linalg.lu_factor(S), Y)

    P = [gains[offsets[i]:offsets[i + 1], :n] for i in range(N)]
    alpha = [gains[offsets[i]:offsets[i + 1], n] for i in range(N)]

    F = dyn.A - sum(B.dot(Pj) for B, Pj in zip(dyn.B, P))
    beta = -sum(B.dot(aj) for B, aj in zip(dyn.B, alpha))
    work = RecursionWorkspace(t, F=F, beta=beta)

    Z, zeta, const = [], [], []
    for i in range(N):
        Zi = cost.Q[i] + F.T.dot(Z_next[i]).dot(F)
        zi = cost.q[i] + F.T.dot(zeta_next[i] + Z_next[i].dot(beta))
        ni = (0.5 * beta.dot(Z_next[i]).dot(beta) +
              zeta_next[i].dot(beta) + n_next[i])
        for j in range(N):
            Rij, rij = cost.R[i][j], cost.r[i][j]
            Zi = Zi + P[j].T.dot(Rij).dot(P[j])
            zi = zi + P[j].T.dot(Rij.dot(alpha[j]) - rij)
            ni += 0.5 * alpha[j].dot(Rij).dot(alpha[j]) - rij.dot(alpha[j])

        if symmetric:
            scale = max(1.0, float(np.max(np.abs(Zi))))
            deviation = float(np.max(np.abs(Zi - Zi.T))) / scale
            if deviation > ASYMMETRY_LIMIT:
                raise exception.AsymmetricValue(player=i + 1, stage=t,
                                                deviation=deviation)
            Zi = _symmetric(Zi)
        Z.append(Zi)
        zeta.append(zi)
        const.append(float(ni))

    return solution.FeedbackValueStage(stage=t, Z=Z, zeta=zeta, n=const,
                                       P=P, alpha=alpha), work


def solve_lq_feedback(game, period, terminal,
                      condition_floor=CONDITION_FLOOR):
    """Backward coupled Riccati recursion of the feedback Nash game.

    A symmetric terminal starts a chain whose Z stays symmetric and is
    checked at every stage. An asymmetric terminal, such as the costate
    map M handed over by a following open-loop period, is propagated as
    it is; none of its stages are symmetrized or checked.

    :param terminal: `CostToGo` valid at period.end + 1, read as
                     (Z, zeta, n) = (S, s, c)
    :returns: list of `FeedbackValueStage` for period.start..period.end
    :raises `exception.SingularCoupledSystem`, `exception.AsymmetricValue`
    """
    symmetric = all(_is_symmetric(S) for S in terminal.S)
    if symmetric:
        Z_next = [_symmetric(S) for S in terminal.S]
    else:
        LOG.debug("Feedback period %r closes on an asymmetric terminal; "
                  "value matrices are propagated unsymmetrized", period)
        Z_next = list(terminal.S)
    zeta_next = list(terminal.s)
    n_next = list(terminal.c)
    records = []
    for t in reversed(period.stages):
        dyn, cost = game.stage(t)
        record, _work = _feedback_stage(t, dyn, cost, Z_next, zeta_next,
                                        n_next, condition_floor,
                                        symmetric=symmetric)
        records.append(record)
        Z_next, zeta_next, n_next = record.Z, record.zeta, record.n

    records.reverse()
    LOG.debug("Feedback period %r solved", period)
    return records


def solve_lq_hybrid(game, schedule, terminal=None,
                    condition_floor=CONDITION_FLOOR):
    """Solve an LQ game under a hybrid information schedule.

    Periods are solved from last to first; each one hands the value at
    its first stage to its predecessor as that period's terminal
    `CostToGo`. The last period is closed by `terminal`, zero by default.

    :returns: `HybridSolution`
    :raises `exception.InvalidSchedule` if the periods do not cover 1..T
    :raises `exception.PeriodSolveFailed` wrapping sub-solver errors,
            with the 1-based period index
    """
    game_ops.check_schedule(schedule, game.horizon)
    if terminal is None:
        terminal = solution.CostToGo.zeros(game.n_players, game.state_dim)

    stages = []
    terminals = []
    for index in reversed(range(len(schedule.periods))):
        period = schedule.periods[index]
        terminals.append(terminal)
        try:
            if period.occluded:
                records = solve_lq_open_loop(game, period, terminal,
                                             condition_floor)
                first = records[0]
                terminal = solution.CostToGo(S=first.M, s=first.m,
                                             c=list(terminal.c))
            else:
                records = solve_lq_feedback(game, period, terminal,
                                            condition_floor)
                first = records[0]
                terminal = solution.CostToGo(S=first.Z, s=first.zeta,
                                             c=first.n)
        except Exception as err:
            raise exception.PeriodSolveFailed(period=index + 1, err=err)
        stages = records + stages

    terminals.reverse()
    return solution.HybridSolution(schedule=schedule, stages=stages,
                                   terminals=terminals)


def rollout_hybrid(game, hybrid, x_1, condition_floor=CONDITION_FLOOR):
    """Simulate equilibrium play of a hybrid solution from x_1.

    Feedback stages apply u^i = -P^i x - alpha^i. Each open-loop period
    generates its control sequence once from the realized entry state and
    then plays it without observing the state.

    :returns: `TrajectoryIterate` with x_1..x_T and occlusion flags set
              from the schedule
    """
    x = np.asarray(x_1, dtype=np.float64)
    states = []
    controls = [[] for _ in range(game.n_players)]

    for index, period in enumerate(hybrid.schedule.periods):
        if period.occluded:
            planned, _states = open_loop_controls(
                game, hybrid.stages_of(period), x, period,
                terminal=hybrid.terminals[index],
                condition_floor=condition_floor)
        for k, t in enumerate(period.stages):
            dyn, _cost = game.stage(t)
            if period.occluded:
                u = [planned[i][k] for i in range(game.n_players)]
            else:
                record = hybrid.stage(t)
                u = [-record.P[i].dot(x) - record.alpha[i]
                     for i in range(game.n_players)]
            states.append(x)
            for i, ui in enumerate(u):
                controls[i].append(ui)
            x = dyn.A.dot(x) + sum(B.dot(ui) for B, ui in zip(dyn.B, u))

    return trajectory_obj.TrajectoryIterate(
        states=np.array(states),
        controls=[np.array(u) for u in controls],
        occluded=game_ops.flags_from_schedule(hybrid.schedule))


def stage_costs(game, trajectory):
    """Per-player cost accumulated along a trajectory of the game.

    :returns: array of N totals over stages 1..T
    """
    totals = np.zeros(game.n_players)
    for t in range(1, game.horizon + 1):
        _dyn, cost = game.stage(t)
        x = trajectory.state(t)
        u = trajectory.stage_controls(t)
        for i in range(game.n_players):
            total = 0.5 * x.dot(cost.Q[i]).dot(x) + cost.q[i].dot(x)
            for j, uj in enumerate(u):
                total += (0.5 * uj.dot(cost.R[i][j]).dot(uj) +
                          cost.r[i][j].dot(uj))
            totals[i] += total
    return totals


def value_at(record, player, x):
    """Quadratic value of a feedback stage record or `CostToGo` at x."""
    count = len(record.zeta) if hasattr(record, 'zeta') else len(record.s)
    if not 0 <= player < count:
        raise exception.UnknownPlayer(player=player, n_players=count)
    return record.value(player, np.asarray(x, dtype=np.float64))


class KKTOracleSystem(object):
    """Stacked first order conditions of the open-loop Nash game.

    Unknowns are ordered [x_2..x_{T+1}, u_1..u_T, lambda_1..lambda_T],
    where u_t stacks all players' controls and lambda_t all players'
    costates of the dynamics constraint x_{t+1} = A_t x_t + sum B u.
    """

    def __init__(self, game, x_1, terminal=None):
        self.game = game
        self.x_1 = np.asarray(x_1, dtype=np.float64)
        if terminal is None:
            terminal = solution.CostToGo.zeros(game.n_players,
                                               game.state_dim)
        self.terminal = terminal

        T, n, N = game.horizon, game.state_dim, game.n_players
        self.dims = game.control_dims
        self.control_offsets = np.concatenate(([0], np.cumsum(self.dims)))
        self.m_total = int(self.control_offsets[-1])
        self.size = T * (n * (N + 1) + self.m_total)
        self.matrix = np.zeros((self.size, self.size))
        self.rhs = np.zeros(self.size)
        self._assemble()

    def _x(self, t):
        n = self.game.state_dim
        return slice((t - 2) * n, (t - 1) * n)

    def _u(self, t, i):
        base = self.game.horizon * self.game.state_dim
        start = base + (t - 1) * self.m_total + self.control_offsets[i]
        return slice(start, start + self.dims[i])

    def _lam(self, t, i):
        T, n, N = self.game.horizon, self.game.state_dim, self.game.n_players
        base = T * n + T * self.m_total
        start = base + ((t - 1) * N + i) * n
        return slice(start, start + n)

    def _assemble(self):
        game = self.game
        T, n, N = game.horizon, game.state_dim, game.n_players
        K, b = self.matrix, self.rhs
        row = 0

        # x_{t+1} - A_t x_t - sum_i B^i_t u^i_t = 0
        for t in range(1, T + 1):
            dyn, _cost = game.stage(t)
            rows = slice(row, row + n)
            K[rows, self._x(t + 1)] = np.eye(n)
            if t == 1:
                b[rows] = dyn.A.dot(self.x_1)
            else:
                K[rows, self._x(t)] = -dyn.A
            for i, B in enumerate(dyn.B):
                K[rows, self._u(t, i)] = -B
            row += n

        # R^ii u^i_t + r^ii + B^i' lambda^i_t = 0
        for t in range(1, T + 1):
            dyn, cost = game.stage(t)
            for i in range(N):
                rows = slice(row, row + self.dims[i])
                K[rows, self._u(t, i)] = cost.R[i][i]
                K[rows, self._lam(t, i)] = dyn.B[i].T
                b[rows] = -cost.r[i][i]
                row += self.dims[i]

        # Q^i_{t+1} x_{t+1} + q^i_{t+1} - lambda^i_t
        #     + A_{t+1}' lambda^i_{t+1} = 0, closed by the terminal value
        for i in range(N):
            for t in range(1, T + 1):
                rows = slice(row, row + n)
                K[rows, self._lam(t, i)] = -np.eye(n)
                if t < T:
                    dyn, cost = game.stage(t + 1)
                    K[rows, self._x(t + 1)] = cost.Q[i]
                    K[rows, self._lam(t + 1, i)] = dyn.A.T
                    b[rows] = -cost.q[i]
                else:
                    K[rows, self._x(t + 1)] = self.terminal.S[i]
                    b[rows] = -self.terminal.s[i]
                row += n

    def solve(self, condition_floor=CONDITION_FLOOR):
        if _rcond(self.matrix) < condition_floor:
            raise exception.SingularKKTSystem()
        return linalg.solve(self.matrix, self.rhs)

    def residual(self, z):
        return float(np.max(np.abs(self.matrix.dot(z) - self.rhs)))

    def unpack(self, z):
        """Split a solution into states x_1..x_{T+1} and controls."""
        T = self.game.horizon
        states = [self.x_1] + [z[self._x(t)] for t in range(2, T + 2)]
        controls = [np.array([z[self._u(t, i)] for t in range(1, T + 1)])
                    for i in range(self.game.n_players)]
        return np.array(states), controls


def kkt_oracle_solve(game, x_1, terminal=None):
    """Open-loop equilibrium from one dense solve of the KKT system.

    :returns: (states, controls), states holding x_1..x_{T+1}
    :raises `exception.SingularKKTSystem`
    """
    system = KKTOracleSystem(game, x_1, terminal)
    return system.unpack(system.solve())


def _reduced_game(game, player, others, terminal):
    """Single-player game of `player` with co-players' play fixed.

    `others(t)` returns per co-player (P^j, alpha^j) so that
    u^j_t = -P^j x_t - alpha^j. The affine drift is carried by an extra
    state component held at 1.
    """
    n = game.state_dim
    dynamics, costs = [], []
    for t in range(1, game.horizon + 1):
        dyn, cost = game.stage(t)
        A = dyn.A.copy()
        drift = np.zeros(n)
        Q = cost.Q[player].copy()
        q = cost.q[player].copy()
        for j, (P, alpha) in others(t).items():
            A -= dyn.B[j].dot(P)
            drift -= dyn.B[j].dot(alpha)
            Rij, rij = cost.R[player][j], cost.r[player][j]
            Q += P.T.dot(Rij).dot(P)
            q += P.T.dot(Rij.dot(alpha) - rij)

        A_aug = np.zeros((n + 1, n + 1))
        A_aug[:n, :n] = A
        A_aug[:n, n] = drift
        A_aug[n, n] = 1.0
        B_aug = np.vstack((dyn.B[player],
                           np.zeros((1, dyn.B[player].shape[1]))))
        Q_aug = np.zeros((n + 1, n + 1))
        Q_aug[:n, :n] = Q
        dynamics.append(game_obj.LinearDynamicsStage(A=A_aug, B=[B_aug]))
        costs.append(game_obj.QuadraticCostStage(
            Q=[Q_aug], q=[np.append(q, 0.0)],
            R=[[cost.R[player][player]]], r=[[cost.r[player][player]]]))

    S_aug = np.zeros((n + 1, n + 1))
    S_aug[:n, :n] = terminal.S[player]
    closing = solution.CostToGo(S=[S_aug], s=[np.append(terminal.s[player],
                                                        0.0)],
                                c=[terminal.c[player]])
    return game_obj.LQGame(dynamics=dynamics, costs=costs), closing


def best_response_feedback(game, records, player, terminal=None):
    """Optimal affine policy of one player against fixed feedback play.

    :param records: `FeedbackValueStage` list for stages 1..T supplying
                    the co-players' (P, alpha)
    :returns: list of (P, alpha) per stage for `player`
    """
    if terminal is None:
        terminal = solution.CostToGo.zeros(game.n_players, game.state_dim)
    n = game.state_dim

    def others(t):
        record = records[t - 1]
        return dict((j, (record.P[j], record.alpha[j]))
                    for j in range(game.n_players) if j != player)

    reduced, closing = _reduced_game(game, player, others, terminal)
    period = game_ops.single_period_schedule(
        game.horizon, fields.InformationMode.FEEDBACK).periods[0]
    policy = []
    for record in solve_lq_feedback(reduced, period, closing):
        P = record.P[0]
        policy.append((P[:, :n], record.alpha[0] + P[:, n]))
    return policy


def best_response_open_loop(game, controls, player, x_1, terminal=None):
    """Optimal control sequence of one player against fixed sequences.

    :param controls: per-player T x m_j control arrays; the entry of
                     `player` is ignored
    :returns: T x m_player array
    """
    if terminal is None:
        terminal = solution.CostToGo.zeros(game.n_players, game.state_dim)
    n = game.state_dim

    def others(t):
        return dict((j, (np.zeros((game.control_dims[j], n)),
                         -np.asarray(controls[j][t - 1])))
                    for j in range(game.n_players) if j != player)

    reduced, closing = _reduced_game(game, player, others, terminal)
    _states, best = kkt_oracle_solve(reduced, np.append(x_1, 1.0), closing)
    return best[0]
