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

"""Trajectory CSV, JSON reports and SVG plots."""

import matplotlib
from matplotlib import figure as mpl_figure
from matplotlib import patches
import numpy as np
from oslo_log import log as logging
from oslo_serialization import jsonutils

from hybrid_game.objects import trajectory as trajectory_obj
from hybrid_game import visibility

LOG = logging.getLogger(__name__)

PLAYER_COLUMNS = ('x', 'y', 'v', 'theta', 'omega_cmd', 'accel_cmd')
MARK_EVERY = 25
COLORS = ('tab:blue', 'tab:orange', 'tab:green', 'tab:red', 'tab:purple')


def csv_header(n_players):
    names = ['t', 'time_s', 'occluded']
    for i in range(1, n_players + 1):
        names.extend('p%d_%s' % (i, c) for c in PLAYER_COLUMNS)
    return ','.join(names)


def export_trajectory(trajectory, report, path, dt):
    """Write one CSV row per stage, numbers with 9 significant digits.

    Occlusion flags come from `report` when given, else from the
    trajectory.
    """
    T, N = trajectory.horizon, trajectory.n_players
    flags = report.occluded if report is not None else trajectory.occluded
    columns = [np.arange(1, T + 1), np.arange(T) * dt,
               np.asarray(flags, dtype=float)]
    for i in range(N):
        columns.append(trajectory.states[:, 4 * i:4 * i + 4])
        columns.append(trajectory.controls[i])
    table = np.column_stack(columns)
    np.savetxt(path, table, fmt='%.9g', delimiter=',',
               header=csv_header(N), comments='')
    LOG.debug("Wrote %d stages to %s", T, path)


def load_trajectory(path):
    """Read a CSV written by `export_trajectory` back into an iterate."""
    table = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    N = (table.shape[1] - 3) // len(PLAYER_COLUMNS)
    states, controls = [], []
    for i in range(N):
        base = 3 + len(PLAYER_COLUMNS) * i
        states.append(table[:, base:base + 4])
        controls.append(table[:, base + 4:base + 6])
    return trajectory_obj.TrajectoryIterate(
        states=np.hstack(states), controls=controls,
        occluded=[bool(f) for f in table[:, 2]])


def report_to_json(report):
    return jsonutils.dumps(report.obj_to_primitive(), indent=2,
                           sort_keys=True)


def export_report(report, path):
    """Write the primitive of a `RunReport` or `ComparisonReport`."""
    with open(path, 'w') as f:
        f.write(report_to_json(report))
        f.write('\n')


def marked_stages(horizon):
    """1-based stages whose bodies are drawn: 1, 26, 51, ..."""
    return list(range(1, horizon + 1, MARK_EVERY))


def _draw_lanes(axes, config, bounds):
    (xmin, xmax), (ymin, ymax) = bounds
    reach = np.hypot(xmax - xmin, ymax - ymin)
    for lane in config.lanes:
        ends = np.array([lane.point - reach * lane.direction,
                         lane.point + reach * lane.direction])
        axes.plot(ends[:, 0], ends[:, 1], color='0.6', linewidth=0.8,
                  linestyle=':', zorder=0)


def emit_plot(trajectory, config, path):
    """Render lanes, occluders, paths and periodic body snapshots as SVG.

    Path segments leaving an occluded stage are dashed. Output is byte
    identical for identical inputs.
    """
    geometry = [player.body() for player in config.players]
    positions = [trajectory.states[:, 4 * i:4 * i + 2]
                 for i in range(trajectory.n_players)]
    points = np.vstack(positions)
    pad = 5.0
    bounds = ((points[:, 0].min() - pad, points[:, 0].max() + pad),
              (points[:, 1].min() - pad, points[:, 1].max() + pad))

    with matplotlib.rc_context({'svg.hashsalt': 'hybrid-game',
                                'svg.fonttype': 'none'}):
        figure = mpl_figure.Figure(figsize=(10, 6))
        axes = figure.subplots()
        _draw_lanes(axes, config, bounds)
        for rect in config.occluders.static:
            axes.add_patch(patches.Polygon(rect.corners(), closed=True,
                                           facecolor='0.3',
                                           edgecolor='0.1'))

        for i, xy in enumerate(positions):
            color = COLORS[i % len(COLORS)]
            for t in range(len(xy) - 1):
                style = '--' if trajectory.occluded[t] else '-'
                axes.plot(xy[t:t + 2, 0], xy[t:t + 2, 1], color=color,
                          linestyle=style, linewidth=1.2)
            for t in marked_stages(trajectory.horizon):
                body = visibility.posed_bodies(trajectory.state(t),
                                               geometry)[i]
                axes.add_patch(patches.Polygon(
                    body.corners(), closed=True, fill=False,
                    edgecolor=color, gid='p%d_t%d' % (i + 1, t)))

        axes.set_xlim(*bounds[0])
        axes.set_ylim(*bounds[1])
        axes.set_aspect('equal')
        axes.set_title(config.name)
        figure.savefig(path, format='svg', metadata={'Date': None})
    LOG.debug("Wrote plot of %s to %s", config.name, path)
