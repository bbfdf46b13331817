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

"""Driving scenarios: loading, solving and measuring.

Scenario files are TOML documents with a [game] table, [[lanes]],
[[players]] (each with a [players.weights] table), [[occluders]] and an
optional [solver] table. Players and lanes are numbered from 1 in the
file and from 0 everywhere else.
"""

import os
import re

import numpy as np
from oslo_config import cfg
from oslo_log import log as logging
from oslo_utils import timeutils
import six

try:
    import tomllib
except ImportError:  # pragma: no cover
    import tomli as tomllib

import hybrid_game
from hybrid_game import costs
from hybrid_game import dynamics
from hybrid_game import exception
from hybrid_game.i18n import _LE
from hybrid_game import ogsolve
from hybrid_game.objects import fields
from hybrid_game.objects import scenario as scenario_obj
from hybrid_game import visibility

LOG = logging.getLogger(__name__)
CONF = cfg.CONF

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), 'scenarios')

MODE_DETECTORS = {
    fields.RunMode.HYBRID: 'rectangle',
    fields.RunMode.OPEN_LOOP: 'openloop',
    fields.RunMode.FEEDBACK: 'feedback',
}

GAME_KEYS = {
    'name': 'scenario',
    'horizon': 100,
    'dt': 0.1,
    'mode': fields.RunMode.HYBRID,
    'seed': None,
    'jitter_position': 0.0,
    'jitter_speed': 0.0,
    'samples_per_edge': 3,
    'pairs': None,
    'agent_occluders': [],
    'lane_half_width': 3.75,
    'proximity_threshold': 3.0,
}
LANE_KEYS = ('point', 'direction')
PLAYER_KEYS = ('name', 'state', 'length', 'width', 'lane',
               'initial_control', 'weights')
WEIGHT_KEYS = ('goal', 'goal_weight', 'nominal_speed', 'speed_weight',
               'control_weight', 'lane_weight', 'lane_crossing_weight',
               'lane_half_width', 'proximity_weight', 'proximity_threshold',
               'speed_min', 'speed_max', 'speed_bound_weight')
OCCLUDER_KEYS = ('center', 'length', 'width', 'heading')
SOLVER_KEYS = ('eta', 'max_iterations', 'state_tolerance',
               'control_tolerance', 'control_regularization',
               'hessian_floor', 'max_backoffs')
TOP_KEYS = ('game', 'lanes', 'players', 'occluders', 'solver')

_LINE_RE = re.compile(r'line (\d+)')


def bundled_scenario(name):
    """Path of a scenario shipped with the package."""
    return os.path.join(SCENARIO_DIR, '%s.toml' % name)


def _reject_unknown(table, allowed, where):
    if not isinstance(table, dict):
        raise exception.ScenarioValidationError(field=where,
                                                reason="expected a table")
    for key in table:
        if key not in allowed:
            raise exception.ScenarioValidationError(
                field='%s.%s' % (where, key), reason="unknown key")


def _vector(value, size, where):
    try:
        array = np.array(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise exception.ScenarioValidationError(
            field=where, reason="expected a list of numbers")
    if array.shape != (size,):
        raise exception.ScenarioValidationError(
            field=where, reason="expected %d numbers, got shape %s" %
            (size, array.shape))
    return array


def _positive(value, where, strict=True):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise exception.ScenarioValidationError(field=where,
                                                reason="expected a number")
    if value < 0 or (strict and value == 0):
        raise exception.ScenarioValidationError(
            field=where, reason="must be %s, got %r" %
            ("positive" if strict else "non-negative", value))
    return float(value)


def _parse_game(doc):
    table = doc.get('game', {})
    _reject_unknown(table, GAME_KEYS, 'game')
    game = dict(GAME_KEYS)
    if hasattr(CONF, 'hybrid_game_rectangle'):
        game['samples_per_edge'] = (
            CONF.hybrid_game_rectangle.samples_per_edge)
    game.update(table)

    if not isinstance(game['horizon'], int) or game['horizon'] < 2:
        raise exception.ScenarioValidationError(
            field='game.horizon', reason="must be an integer of at least 2")
    game['dt'] = _positive(game['dt'], 'game.dt')
    if game['seed'] is not None and not isinstance(game['seed'], int):
        raise exception.ScenarioValidationError(
            field='game.seed', reason="must be an integer")
    if game['mode'] not in fields.RunMode.ALL:
        raise exception.ScenarioValidationError(
            field='game.mode', reason="must be one of %s" %
            ', '.join(fields.RunMode.ALL))
    for key in ('jitter_position', 'jitter_speed'):
        game[key] = _positive(game[key], 'game.%s' % key, strict=False)
    if (not isinstance(game['samples_per_edge'], int) or
            game['samples_per_edge'] < 0):
        raise exception.ScenarioValidationError(
            field='game.samples_per_edge',
            reason="must be a non-negative integer")
    return game


def _parse_lane(table, where):
    _reject_unknown(table, LANE_KEYS, where)
    for key in LANE_KEYS:
        if key not in table:
            raise exception.ScenarioValidationError(
                field='%s.%s' % (where, key), reason="missing")
    direction = _vector(table['direction'], 2, where + '.direction')
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise exception.ScenarioValidationError(
            field=where + '.direction', reason="must be non-zero")
    return scenario_obj.Lane(point=_vector(table['point'], 2,
                                           where + '.point'),
                             direction=direction / norm)


def _parse_weights(table, where, lane, game):
    _reject_unknown(table, WEIGHT_KEYS, where)
    values = {
        'lane_half_width': game['lane_half_width'],
        'proximity_threshold': game['proximity_threshold'],
    }
    for key, value in table.items():
        path = '%s.%s' % (where, key)
        if key == 'goal':
            values[key] = _vector(value, 2, path)
        elif key == 'control_weight':
            try:
                W = np.array(value, dtype=np.float64)
            except (TypeError, ValueError):
                W = None
            if W is None or W.shape != (2, 2):
                raise exception.ScenarioValidationError(
                    field=path, reason="expected a 2 x 2 matrix")
            if (np.abs(W - W.T).max() > 1e-12 or
                    np.linalg.eigvalsh(W).min() <= 0):
                raise exception.ScenarioValidationError(
                    field=path, reason="must be symmetric positive definite")
            values[key] = W
        elif key in ('speed_min', 'speed_max'):
            values[key] = _positive(value, path, strict=False)
        elif key in ('lane_half_width', 'proximity_threshold'):
            values[key] = _positive(value, path)
        else:
            values[key] = _positive(value, path, strict=False)

    weights = scenario_obj.CostWeights(lane=lane, **values)
    if weights.speed_min >= weights.speed_max:
        raise exception.ScenarioValidationError(
            field=where + '.speed_min', reason="must be below speed_max")
    return weights


def _parse_player(table, where, lanes, game):
    _reject_unknown(table, PLAYER_KEYS, where)
    for key in ('state', 'length', 'width'):
        if key not in table:
            raise exception.ScenarioValidationError(
                field='%s.%s' % (where, key), reason="missing")
    lane = None
    if 'lane' in table:
        index = table['lane']
        if not isinstance(index, int) or not 1 <= index <= len(lanes):
            raise exception.ScenarioValidationError(
                field=where + '.lane',
                reason="no lane %r among %d lanes" % (index, len(lanes)))
        lane = lanes[index - 1]
    return scenario_obj.PlayerConfig(
        name=str(table.get('name', where)),
        initial_state=_vector(table['state'], 4, where + '.state'),
        length=_positive(table['length'], where + '.length'),
        width=_positive(table['width'], where + '.width'),
        weights=_parse_weights(table.get('weights', {}), where + '.weights',
                               lane, game),
        initial_control=_vector(table.get('initial_control', [0.0, 0.0]),
                                2, where + '.initial_control'))


def _parse_occluder(table, where):
    _reject_unknown(table, OCCLUDER_KEYS, where)
    for key in ('center', 'length', 'width'):
        if key not in table:
            raise exception.ScenarioValidationError(
                field='%s.%s' % (where, key), reason="missing")
    return scenario_obj.OrientedRectangle(
        center=_vector(table['center'], 2, where + '.center'),
        length=_positive(table['length'], where + '.length'),
        width=_positive(table['width'], where + '.width'),
        heading=float(table.get('heading', 0.0)))


def _parse_solver(table):
    _reject_unknown(table, SOLVER_KEYS, 'solver')
    try:
        settings = ogsolve.settings_from_conf(**table)
    except ValueError as err:
        raise exception.ScenarioValidationError(field='solver', reason=err)
    if not 0 < settings.eta <= 1:
        raise exception.ScenarioValidationError(
            field='solver.eta', reason="must lie in (0, 1]")
    for key in ('state_tolerance', 'control_tolerance'):
        _positive(getattr(settings, key), 'solver.%s' % key)
    for key in ('control_regularization', 'hessian_floor'):
        _positive(getattr(settings, key), 'solver.%s' % key, strict=False)
    if settings.max_iterations < 0 or settings.max_backoffs < 0:
        raise exception.ScenarioValidationError(
            field='solver', reason="iteration counts must be non-negative")
    return settings


def _player_index(value, n_players, where):
    if not isinstance(value, int) or not 1 <= value <= n_players:
        raise exception.ScenarioValidationError(
            field=where, reason="no player %r among %d players" %
            (value, n_players))
    return value - 1


def parse_scenario(doc):
    """Build a `ScenarioConfig` from a decoded TOML document."""
    _reject_unknown(doc, TOP_KEYS, 'scenario')
    game = _parse_game(doc)
    lanes = [_parse_lane(t, 'lanes[%d]' % k)
             for k, t in enumerate(doc.get('lanes', []), 1)]
    players = [_parse_player(t, 'players[%d]' % k, lanes, game)
               for k, t in enumerate(doc.get('players', []), 1)]
    if not players:
        raise exception.ScenarioValidationError(field='players',
                                                reason="no players")
    N = len(players)

    if game['pairs'] is None:
        pairs = [[i, j] for i in range(N) for j in range(i + 1, N)]
    else:
        pairs = []
        for k, pair in enumerate(game['pairs']):
            where = 'game.pairs[%d]' % k
            if not isinstance(pair, list) or len(pair) != 2:
                raise exception.ScenarioValidationError(
                    field=where, reason="expected two player numbers")
            i, j = [_player_index(p, N, where) for p in pair]
            if i == j:
                raise exception.ScenarioValidationError(
                    field=where, reason="a player cannot be paired with "
                    "itself")
            pairs.append([i, j])
    agents = [_player_index(p, N, 'game.agent_occluders')
              for p in game['agent_occluders']]

    occluders = scenario_obj.OccluderSet(
        static=[_parse_occluder(t, 'occluders[%d]' % k)
                for k, t in enumerate(doc.get('occluders', []), 1)],
        agents=agents)

    return scenario_obj.ScenarioConfig(
        name=str(game['name']), horizon=game['horizon'], dt=game['dt'],
        players=players, lanes=lanes, occluders=occluders, pairs=pairs,
        samples_per_edge=game['samples_per_edge'], mode=game['mode'],
        seed=game['seed'], jitter_position=game['jitter_position'],
        jitter_speed=game['jitter_speed'],
        settings=_parse_solver(doc.get('solver', {})))


def load_scenario(path):
    """Read and validate a TOML scenario file.

    :raises `exception.ScenarioParseError` with the offending line
    :raises `exception.ScenarioValidationError` with the field path
    """
    with open(path, 'rb') as f:
        try:
            doc = tomllib.load(f)
        except tomllib.TOMLDecodeError as err:
            line = getattr(err, 'lineno', None)
            if line is None:
                match = _LINE_RE.search(six.text_type(err))
                line = int(match.group(1)) if match else 0
            raise exception.ScenarioParseError(path=path, line=line,
                                               reason=err)
    return parse_scenario(doc)


def initial_state(config):
    """Joint initial state, with the scenario's seeded jitter applied."""
    states = np.array([p.initial_state for p in config.players])
    if config.seed is not None and (config.jitter_position or
                                    config.jitter_speed):
        rng = np.random.default_rng(config.seed)
        shape = (len(states), 2)
        states[:, :2] += rng.uniform(-config.jitter_position,
                                     config.jitter_position, size=shape)
        states[:, 2] += rng.uniform(-config.jitter_speed,
                                    config.jitter_speed, size=len(states))
    return states.reshape(-1)


def geometry_of(config):
    return [player.body() for player in config.players]


def build_problem(config):
    """`NonlinearProblem` of a scenario: unicycles under driving costs."""
    T = config.horizon
    return ogsolve.NonlinearProblem(
        dynamics=dynamics.UnicycleDynamics(config.n_players, config.dt),
        cost=costs.DrivingCost([p.weights for p in config.players]),
        horizon=T,
        x_1=initial_state(config),
        initial_controls=[np.tile(p.initial_control, (T, 1))
                          for p in config.players])


def player_positions(trajectory, player):
    return trajectory.states[:, 4 * player:4 * player + 2]


def compute_metrics(trajectory, config):
    """Safety and progress measures of a trajectory.

    :returns: dict with `min_distance` between player centres,
              `overlap_count` of (stage, pair) body overlaps,
              `max_lane_deviation` from the lane centre lines and per
              player `goal_distance` at the last stage
    """
    N = config.n_players
    geometry = geometry_of(config)
    positions = [player_positions(trajectory, i) for i in range(N)]

    min_distance = float('inf')
    overlaps = 0
    for i in range(N):
        for j in range(i + 1, N):
            gaps = np.linalg.norm(positions[i] - positions[j], axis=1)
            min_distance = min(min_distance, float(gaps.min()))
    for t in range(1, trajectory.horizon + 1):
        bodies = visibility.posed_bodies(trajectory.state(t), geometry)
        for i in range(N):
            for j in range(i + 1, N):
                if visibility.rectangles_overlap(bodies[i], bodies[j]):
                    overlaps += 1

    deviation = 0.0
    for i, player in enumerate(config.players):
        lane = player.weights.lane
        if lane is None:
            continue
        offsets = [abs(lane.signed_offset(p)) for p in positions[i]]
        deviation = max(deviation, max(offsets))

    goal_distance = [float(np.linalg.norm(positions[i][-1] -
                                          config.players[i].weights.goal))
                     for i in range(N)]
    return {
        'min_distance': min_distance,
        'overlap_count': overlaps,
        'max_lane_deviation': float(deviation),
        'goal_distance': goal_distance,
    }


def crossing_stage(trajectory, player, point, direction):
    """First 1-based stage at which a player is past a line.

    The line passes through `point` and the player counts as past it once
    its offset along `direction` is non-negative. Returns None if it never
    gets there.
    """
    offsets = (player_positions(trajectory, player) -
               np.asarray(point)).dot(np.asarray(direction))
    passed = np.nonzero(offsets >= 0)[0]
    return int(passed[0]) + 1 if len(passed) else None


def speed_profile(trajectory, player):
    return trajectory.states[:, 4 * player + 2].copy()


def _solve(problem, config, detector):
    def solve():
        return ogsolve.ogsolve(problem, config.settings, detector=detector,
                               geometry=geometry_of(config),
                               occluders=config.occluders,
                               pairs=config.pairs)

    if detector != 'rectangle':
        return solve()
    # The scenario sampling density holds for this run only
    CONF.set_override('samples_per_edge', config.samples_per_edge,
                      group='hybrid_game_rectangle')
    try:
        return solve()
    finally:
        CONF.clear_override('samples_per_edge',
                            group='hybrid_game_rectangle')


def run_scenario(config, mode=None):
    """Solve a scenario in one information mode and measure the result.

    Solver failures are logged and reported, with the initial rollout
    standing in for the trajectory.

    :returns: (`RunReport`, `TrajectoryIterate`)
    """
    hybrid_game.initialize()
    mode = mode or config.mode
    detector = MODE_DETECTORS[mode]
    problem = build_problem(config)
    watch = timeutils.StopWatch()
    watch.start()
    try:
        result = _solve(problem, config, detector)
        trajectory = result.trajectory
        converged, iterations = result.converged, result.iterations
        log, failure = result.log, result.failure
    except exception.ExceptionBase as err:
        LOG.error(_LE("Scenario %(name)s failed in %(mode)s mode: "
                      "%(err)s"),
                  {'name': config.name, 'mode': mode, 'err': err})
        trajectory = ogsolve.get_trajectory(problem.x_1,
                                            problem.initial_controls,
                                            problem)
        converged, iterations, log = False, 0, []
        failure = err.format_message()

    metrics = compute_metrics(trajectory, config)
    report = scenario_obj.RunReport(
        scenario=config.name, mode=mode, converged=converged,
        iterations=iterations, failure=failure,
        occluded=list(trajectory.occluded), wall_clock=watch.elapsed(),
        log=log, **metrics)
    return report, trajectory


def compare_structures(config):
    """Run every information mode from the same initial state.

    :returns: (`ComparisonReport`, dict of mode -> trajectory)
    """
    reports = []
    trajectories = {}
    failures = {}
    for mode in fields.RunMode.ALL:
        try:
            report, trajectory = run_scenario(config, mode=mode)
        except Exception as err:
            LOG.error(_LE("Comparison run in %(mode)s mode failed: "
                          "%(err)s"), {'mode': mode, 'err': err})
            failures[mode] = six.text_type(err)
            continue
        reports.append(report)
        trajectories[mode] = trajectory
        if report.failure:
            failures[mode] = report.failure

    ranked = sorted(reports, key=lambda r: r.max_lane_deviation)
    comparison = scenario_obj.ComparisonReport(
        scenario=config.name, reports=reports, failures=failures,
        lane_deviation_order=[r.mode for r in ranked])
    return comparison, trajectories
