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

"""Occlusion aware iterative LQ game solver.

Each iteration linearizes the dynamics and quadraticizes the costs about
the current trajectory iterate, detects occlusions along it, solves the
hybrid LQ game in deviation coordinates and rolls out a damped step
toward its equilibrium strategy.
"""

import numpy as np
from oslo_config import cfg
from oslo_log import log as logging
from oslo_utils import timeutils

import hybrid_game
from hybrid_game import exception
from hybrid_game import game as game_ops
from hybrid_game.i18n import _LI
from hybrid_game.i18n import _LW
from hybrid_game import lq_solvers
from hybrid_game.objects import game as game_obj
from hybrid_game.objects import scenario as scenario_obj
from hybrid_game.objects import trajectory as trajectory_obj

LOG = logging.getLogger(__name__)

solver_opts = [
    cfg.FloatOpt('eta',
                 default=0.1,
                 min=0.0,
                 max=1.0,
                 help='Step size toward the LQ equilibrium strategy.'),
    cfg.IntOpt('max_iterations',
               default=200,
               min=0,
               help='Outer iteration budget.'),
    cfg.FloatOpt('state_tolerance',
                 default=1e-2,
                 min=0.0,
                 help='Converged when no state changes by more than this '
                      'between iterates.'),
    cfg.FloatOpt('control_tolerance',
                 default=1e-2,
                 min=0.0,
                 help='Converged when no control changes by more than this '
                      'between iterates.'),
    cfg.FloatOpt('control_regularization',
                 default=1e-3,
                 min=0.0,
                 help='Added to the diagonal of every R^ii.'),
    cfg.FloatOpt('hessian_floor',
                 default=0.0,
                 min=0.0,
                 help='Eigenvalue floor of the state cost Hessians.'),
    cfg.IntOpt('max_backoffs',
               default=10,
               min=0,
               help='Step size halvings allowed per iteration when a '
                    'rollout turns non-finite.'),
    cfg.FloatOpt('condition_floor',
                 default=1e-12,
                 min=0.0,
                 help='Reciprocal condition number below which coupled '
                      'systems are rejected as singular.'),
]

CONF = cfg.CONF
CONF.register_opts(solver_opts, group='solver')


def list_opts():
    return [('solver', solver_opts)]


def settings_from_conf(**overrides):
    """`SolverSettings` from the [solver] options and explicit overrides."""
    values = dict((name, getattr(CONF.solver, name))
                  for name in ('eta', 'max_iterations', 'state_tolerance',
                               'control_tolerance', 'control_regularization',
                               'hessian_floor', 'max_backoffs'))
    values.update((k, v) for k, v in overrides.items() if v is not None)
    return scenario_obj.SolverSettings(**values)


class NonlinearProblem(object):
    """A finite horizon game with nonlinear dynamics and costs.

    :param dynamics: `hybrid_game.dynamics.DynamicsModel`
    :param cost: `hybrid_game.costs.CostModel`
    :param horizon: stage count T
    :param x_1: initial joint state
    :param initial_controls: per-player T x m_i arrays, zero by default
    """

    def __init__(self, dynamics, cost, horizon, x_1, initial_controls=None):
        if horizon < 2:
            raise exception.DimensionMismatch(
                stage=horizon, reason="horizon must be at least 2")
        x_1 = np.asarray(x_1, dtype=np.float64)
        if x_1.shape != (dynamics.state_dim,):
            raise exception.DimensionMismatch(
                stage=1, reason="initial state has shape %s, expected "
                "(%d,)" % (x_1.shape, dynamics.state_dim))
        if initial_controls is None:
            initial_controls = [np.zeros((horizon, m))
                                for m in dynamics.control_dims]
        self.dynamics = dynamics
        self.cost = cost
        self.horizon = horizon
        self.x_1 = x_1
        self.initial_controls = [np.asarray(u, dtype=np.float64)
                                 for u in initial_controls]

    @property
    def n_players(self):
        return self.dynamics.n_players

    def trajectory_costs(self, trajectory):
        totals = np.zeros(self.n_players)
        for t in range(1, self.horizon + 1):
            totals += self.cost.evaluate(t, trajectory.state(t),
                                         trajectory.stage_controls(t))
        return totals


class OpenLoopSequence(object):
    """Plays fixed per-player control sequences."""

    def __init__(self, controls):
        self.controls = controls

    def __call__(self, t, x):
        return [np.asarray(u[t - 1]) for u in self.controls]


class StepStrategy(object):
    """Damped step from a nominal iterate toward a hybrid LQ equilibrium.

    Feedback stages play u = u_hat - P dx - eta alpha. Open-loop stages
    play u = u_hat + eta du, with du regenerated from the realized
    deviation each time a period is entered.
    """

    def __init__(self, nominal, deviation_game, solution, eta,
                 condition_floor=lq_solvers.CONDITION_FLOOR):
        self.nominal = nominal
        self.game = deviation_game
        self.solution = solution
        self.eta = eta
        self.condition_floor = condition_floor
        self._planned = None

    def __call__(self, t, x):
        index, period = self.solution.schedule.period_of(t)
        u_hat = self.nominal.stage_controls(t)
        dx = x - self.nominal.state(t)
        if period.occluded:
            if t == period.start:
                self._planned, _states = lq_solvers.open_loop_controls(
                    self.game, self.solution.stages_of(period), dx, period,
                    terminal=self.solution.terminals[index],
                    condition_floor=self.condition_floor)
            k = t - period.start
            return [step_toward(u_hat[i], self._planned[i][k], self.eta)
                    for i in range(len(u_hat))]

        record = self.solution.stage(t)
        return [step_toward(u_hat[i] - record.P[i].dot(dx),
                            -record.alpha[i], self.eta)
                for i in range(len(u_hat))]


def get_trajectory(x_1, strategy, problem):
    """Unroll the problem dynamics under a strategy.

    :param strategy: callable (t, x_t) -> list of player controls, or a
                     list of per-player T x m_i control sequences
    :raises `exception.NonFiniteRollout` at the first non-finite state
    """
    if not callable(strategy):
        strategy = OpenLoopSequence(strategy)
    x = np.asarray(x_1, dtype=np.float64)
    states = []
    controls = [[] for _ in range(problem.n_players)]
    for t in range(1, problem.horizon + 1):
        u = strategy(t, x)
        if not all(np.all(np.isfinite(ui)) for ui in u):
            raise exception.NonFiniteRollout(stage=t)
        states.append(x)
        for i, ui in enumerate(u):
            controls[i].append(ui)
        x = problem.dynamics.step(t, x, u)
        if not np.all(np.isfinite(x)):
            raise exception.NonFiniteRollout(stage=t + 1)
    return trajectory_obj.TrajectoryIterate(
        states=np.array(states), controls=[np.array(u) for u in controls])


def linearize_dynamics(trajectory, problem):
    """Jacobians of the dynamics along an iterate, one stage per step."""
    return [problem.dynamics.linearize(t, trajectory.state(t),
                                       trajectory.stage_controls(t))
            for t in range(1, trajectory.horizon + 1)]


def clamp_psd(matrix, floor=0.0):
    """Raise eigenvalues below `floor` up to it; no-op otherwise."""
    eigenvalues, vectors = np.linalg.eigh(matrix)
    if eigenvalues.min() >= floor:
        return matrix
    clamped = (vectors * np.maximum(eigenvalues, floor)).dot(vectors.T)
    return 0.5 * (clamped + clamped.T)


def quadraticize_costs(trajectory, problem, settings):
    """Quadratic cost models along an iterate.

    State Hessians are clamped to the settings' eigenvalue floor and each
    R^ii gets `control_regularization` added to its diagonal.
    """
    stages = []
    for t in range(1, trajectory.horizon + 1):
        raw = problem.cost.quadraticize(t, trajectory.state(t),
                                        trajectory.stage_controls(t))
        R = []
        for i, row in enumerate(raw.R):
            R.append([Rij + settings.control_regularization *
                      np.eye(len(Rij)) if j == i else Rij
                      for j, Rij in enumerate(row)])
        stages.append(game_obj.QuadraticCostStage(
            Q=[clamp_psd(Q, settings.hessian_floor) for Q in raw.Q],
            q=list(raw.q), R=R, r=raw.r))
    return stages


def step_toward(controls, deltas, eta):
    """Return controls + eta * deltas."""
    return np.asarray(controls) + eta * np.asarray(deltas)


def check_convergence(previous, current, settings):
    """Compare two iterates by their largest state and control changes.

    :returns: (converged, diagnostics) where diagnostics holds
              `state_change`, `control_change` and the 1-based
              `argmax_stage` of the state change
    """
    state_diff = np.abs(current.states - previous.states).max(axis=1)
    control_change = max(
        float(np.abs(a - b).max()) if a.size else 0.0
        for a, b in zip(current.controls, previous.controls))
    diagnostics = {
        'state_change': float(state_diff.max()),
        'control_change': control_change,
        'argmax_stage': int(np.argmax(state_diff)) + 1,
    }
    converged = (diagnostics['state_change'] < settings.state_tolerance and
                 control_change < settings.control_tolerance)
    return converged, diagnostics


def extract_strategy(nominal, deviation_game, solution, eta,
                     condition_floor=lq_solvers.CONDITION_FLOOR):
    """Strategy stepping from `nominal` toward the solved equilibrium."""
    return StepStrategy(nominal, deviation_game, solution, eta,
                        condition_floor)


class OGSolveResult(object):
    """Outcome of an outer loop run."""

    def __init__(self, trajectory, converged, iterations, log, costs,
                 wall_clock, failure=None):
        self.trajectory = trajectory
        self.converged = converged
        self.iterations = iterations
        self.log = log
        self.costs = costs
        self.wall_clock = wall_clock
        self.failure = failure

    @property
    def schedules(self):
        return [record.schedule for record in self.log]

    @property
    def cost_history(self):
        return [record.costs for record in self.log]


def _detector_for(detector, geometry, occluders, pairs):
    if callable(detector):
        return detector
    if occluders is None:
        occluders = scenario_obj.OccluderSet()
    if pairs is None:
        pairs = [[i, j] for i in range(len(geometry))
                 for j in range(i + 1, len(geometry))]

    def detect(trajectory):
        return hybrid_game.find_occlusions(detector, trajectory, geometry,
                                           occluders, pairs)
    return detect


def ogsolve(problem, settings, detector='rectangle', geometry=None,
            occluders=None, pairs=None):
    """Iterate to a hybrid information equilibrium trajectory.

    :param problem: `NonlinearProblem`
    :param settings: `SolverSettings`
    :param detector: name of a loaded occlusion detector plugin, or a
                     callable mapping a `TrajectoryIterate` to an
                     `InformationSchedule`
    :param geometry: per-player `OrientedRectangle` templates, for plugins
    :param occluders: `OccluderSet`, for plugins
    :param pairs: interacting 0-based player pairs, all pairs by default
    :returns: `OGSolveResult`; when the budget runs out it carries the
              lowest social cost iterate seen and converged=False
    :raises `exception.RolloutDiverged` when no step size in the backoff
            sequence yields a finite rollout
    """
    detect = _detector_for(detector, geometry, occluders, pairs)
    condition_floor = CONF.solver.condition_floor
    watch = timeutils.StopWatch()
    watch.start()

    trajectory = get_trajectory(problem.x_1, problem.initial_controls,
                                problem)
    costs = problem.trajectory_costs(trajectory)
    best = (float(costs.sum()), trajectory, costs)
    log = []
    previous_schedule = None

    for iteration in range(1, settings.max_iterations + 1):
        schedule = detect(trajectory)
        if previous_schedule is not None and schedule != previous_schedule:
            LOG.debug("Iteration %(it)d: schedule changed from %(old)r to "
                      "%(new)r", {'it': iteration, 'old': previous_schedule,
                                  'new': schedule})
        previous_schedule = schedule
        trajectory.occluded = game_ops.flags_from_schedule(schedule)
        deviation_game = game_obj.LQGame(
            dynamics=linearize_dynamics(trajectory, problem),
            costs=quadraticize_costs(trajectory, problem, settings))
        solution = lq_solvers.solve_lq_hybrid(
            deviation_game, schedule, condition_floor=condition_floor)

        eta = settings.eta
        backoffs = 0
        while True:
            strategy = extract_strategy(trajectory, deviation_game,
                                        solution, eta, condition_floor)
            try:
                candidate = get_trajectory(problem.x_1, strategy, problem)
                break
            except exception.NonFiniteRollout as err:
                backoffs += 1
                if backoffs > settings.max_backoffs:
                    raise exception.RolloutDiverged(backoffs=backoffs - 1,
                                                    iteration=iteration)
                eta *= 0.5
                LOG.warning(_LW("Iteration %(it)d: %(err)s, reducing step "
                                "size to %(eta)g"),
                            {'it': iteration, 'err': err, 'eta': eta})

        converged, diagnostics = check_convergence(trajectory, candidate,
                                                   settings)
        costs = problem.trajectory_costs(candidate)
        log.append(scenario_obj.IterationRecord(
            iteration=iteration, eta=eta, backoffs=backoffs,
            schedule=schedule, costs=costs.tolist(), **diagnostics))
        LOG.debug("Iteration %(it)d: schedule %(sched)r, eta %(eta)g, "
                  "state change %(dx).3g at stage %(stage)d, control "
                  "change %(du).3g",
                  {'it': iteration, 'sched': schedule, 'eta': eta,
                   'dx': diagnostics['state_change'],
                   'stage': diagnostics['argmax_stage'],
                   'du': diagnostics['control_change']})

        trajectory = candidate
        if costs.sum() < best[0]:
            best = (float(costs.sum()), trajectory, costs)

        if converged:
            trajectory.occluded = game_ops.flags_from_schedule(
                detect(trajectory))
            LOG.info(_LI("Converged after %(it)d iterations in %(sec).2fs"),
                     {'it': iteration, 'sec': watch.elapsed()})
            return OGSolveResult(trajectory, True, iteration, log, costs,
                                 watch.elapsed())

    _cost, trajectory, costs = best
    if settings.max_iterations:
        LOG.warning(_LW("No convergence within %d iterations, returning "
                        "the lowest cost iterate"), settings.max_iterations)
    trajectory.occluded = game_ops.flags_from_schedule(detect(trajectory))
    return OGSolveResult(trajectory, False, settings.max_iterations, log,
                         costs, watch.elapsed(),
                         failure="iteration budget exhausted")
