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

"""Validation of LQ games and conversion between flags and schedules."""

import itertools

import numpy as np

from hybrid_game import exception
from hybrid_game.objects import fields
from hybrid_game.objects import game as game_obj
from hybrid_game.objects import schedule as schedule_obj

SYMMETRY_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-9


def _asymmetry(matrix):
    scale = max(1.0, float(np.max(np.abs(matrix))))
    return float(np.max(np.abs(matrix - matrix.T))) / scale


def _check_shape(problems, t, label, array, shape):
    if np.shape(array) != shape:
        problems.append("stage %d: %s has shape %s, expected %s" %
                        (t, label, np.shape(array), shape))
        return False
    return True


def _check_dynamics(problems, t, stage, n, m):
    if not _check_shape(problems, t, "A", stage.A, (n, n)):
        return
    if len(stage.B) != len(m):
        problems.append("stage %d: %d control maps for %d players" %
                        (t, len(stage.B), len(m)))
        return
    for i, B in enumerate(stage.B):
        _check_shape(problems, t, "B^%d" % (i + 1), B, (n, m[i]))


def _check_costs(problems, t, stage, n, m):
    N = len(m)
    for label, values in (("Q", stage.Q), ("q", stage.q),
                          ("R", stage.R), ("r", stage.r)):
        if len(values) != N:
            problems.append("stage %d: %d %s entries for %d players" %
                            (t, len(values), label, N))
            return

    for i in range(N):
        player = i + 1
        Q = stage.Q[i]
        if _check_shape(problems, t, "Q^%d" % player, Q, (n, n)):
            if _asymmetry(Q) > SYMMETRY_TOLERANCE:
                problems.append("stage %d: Q^%d is not symmetric" %
                                (t, player))
            elif np.linalg.eigvalsh(Q).min() < -PSD_TOLERANCE * max(
                    1.0, float(np.max(np.abs(Q)))):
                problems.append("stage %d: Q^%d is not positive "
                                "semidefinite" % (t, player))
        _check_shape(problems, t, "q^%d" % player, stage.q[i], (n,))

        if len(stage.R[i]) != N or len(stage.r[i]) != N:
            problems.append("stage %d: player %d needs %d R and r blocks" %
                            (t, player, N))
            continue
        for j in range(N):
            label = "R^%d%d" % (player, j + 1)
            R = stage.R[i][j]
            _check_shape(problems, t, "r^%d%d" % (player, j + 1),
                         stage.r[i][j], (m[j],))
            if not _check_shape(problems, t, label, R, (m[j], m[j])):
                continue
            if _asymmetry(R) > SYMMETRY_TOLERANCE:
                problems.append("stage %d: %s is not symmetric" %
                                (t, label))
            elif i == j:
                try:
                    np.linalg.cholesky(R)
                except np.linalg.LinAlgError:
                    problems.append("stage %d: %s (R^ii) is not positive "
                                    "definite" % (t, label))


def validate_lq_game(game):
    """Collect every dimensional and definiteness problem of a game.

    :param game: `LQGame`
    :returns: `ValidationReport`, valid iff no problem was found
    """
    problems = []
    if not game.dynamics:
        problems.append("game has no stages")
        return game_obj.ValidationReport(problems=problems)
    if len(game.costs) != len(game.dynamics):
        problems.append("%d dynamics stages but %d cost stages" %
                        (len(game.dynamics), len(game.costs)))

    first = game.dynamics[0]
    n = np.shape(first.A)[0]
    m = [np.shape(B)[1] if np.ndim(B) == 2 else 0 for B in first.B]
    if not m:
        problems.append("game has no players")
    if any(mi < 1 for mi in m):
        problems.append("every player needs at least one control")
    if problems:
        return game_obj.ValidationReport(problems=problems)

    for t, (dyn, cost) in enumerate(zip(game.dynamics, game.costs), 1):
        _check_dynamics(problems, t, dyn, n, m)
        _check_costs(problems, t, cost, n, m)

    return game_obj.ValidationReport(problems=problems)


def partition_from_flags(flags):
    """Split per-stage occlusion flags into maximal equal-flag periods.

    :param flags: sequence of T booleans, true meaning occluded
    :returns: `InformationSchedule`
    :raises `exception.EmptyFlagSequence`
    """
    flags = [bool(f) for f in flags]
    if not flags:
        raise exception.EmptyFlagSequence()

    periods = []
    start = 1
    for occluded, run in itertools.groupby(flags):
        length = len(list(run))
        mode = (fields.InformationMode.OPEN_LOOP if occluded
                else fields.InformationMode.FEEDBACK)
        periods.append(schedule_obj.Period(start=start,
                                           end=start + length - 1,
                                           mode=mode))
        start += length
    return schedule_obj.InformationSchedule(periods=periods)


def flags_from_schedule(schedule):
    """Flatten a schedule back into its T per-stage occlusion flags."""
    flags = []
    for period in schedule.periods:
        flags.extend([period.occluded] * len(period))
    return flags


def single_period_schedule(horizon, mode):
    """Schedule made of one period of the given mode covering 1..T."""
    return schedule_obj.InformationSchedule(periods=[
        schedule_obj.Period(start=1, end=horizon, mode=mode)])


def check_schedule(schedule, horizon):
    """Raise `InvalidSchedule` unless the periods partition 1..horizon.

    Periods must also be maximal: two adjacent periods never share a mode.
    """
    if not schedule.periods:
        raise exception.InvalidSchedule(reason="no periods")
    expected = 1
    previous = None
    for period in schedule.periods:
        if previous is not None and previous.mode == period.mode:
            raise exception.InvalidSchedule(
                reason="periods %r and %r share a mode" % (previous, period))
        previous = period
        if period.start != expected:
            raise exception.InvalidSchedule(
                reason="period %r starts at %d, expected %d" %
                (period, period.start, expected))
        if period.end < period.start:
            raise exception.InvalidSchedule(
                reason="period %r is empty" % (period,))
        expected = period.end + 1
    if expected != horizon + 1:
        raise exception.InvalidSchedule(
            reason="periods end at %d, horizon is %d" %
            (expected - 1, horizon))
