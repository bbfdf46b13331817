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

"""Command line entry point: run, compare and bench."""

import os
import sys

from oslo_config import cfg
from oslo_log import log as logging
from oslo_utils import fileutils

import hybrid_game
from hybrid_game import bench
from hybrid_game import exception
from hybrid_game import export
from hybrid_game.i18n import _
from hybrid_game.i18n import _LE
from hybrid_game.i18n import _LI
from hybrid_game.objects import fields
from hybrid_game import scenario

CONF = cfg.CONF
LOG = logging.getLogger(__name__)


def _apply_overrides(config):
    args = CONF.command
    if getattr(args, 'mode', None):
        config.mode = args.mode
    if getattr(args, 'seed', None) is not None:
        config.seed = args.seed
    settings = config.settings
    if getattr(args, 'max_iters', None) is not None:
        settings.max_iterations = args.max_iters
    if getattr(args, 'eta', None) is not None:
        settings.eta = args.eta
    if getattr(args, 'tol', None) is not None:
        settings.state_tolerance = args.tol
        settings.control_tolerance = args.tol
    return config


def _write_run(config, report, trajectory, out, suffix=''):
    export.export_trajectory(
        trajectory, report,
        os.path.join(out, 'trajectory%s.csv' % suffix), config.dt)
    if CONF.command.svg:
        export.emit_plot(trajectory, config,
                         os.path.join(out, 'trajectory%s.svg' % suffix))


def do_run():
    config = _apply_overrides(scenario.load_scenario(CONF.command.scenario))
    report, trajectory = scenario.run_scenario(config)
    out = CONF.command.out
    fileutils.ensure_tree(out)
    _write_run(config, report, trajectory, out)
    export.export_report(report, os.path.join(out, 'report.json'))
    LOG.info(_LI("%(name)s (%(mode)s): converged=%(conv)s after "
                 "%(it)d iterations, %(occ).0f%% of stages occluded"),
             {'name': config.name, 'mode': report.mode,
              'conv': report.converged, 'it': report.iterations,
              'occ': 100.0 * report.occluded_fraction})
    return 0 if report.converged else 1


def do_compare():
    config = _apply_overrides(scenario.load_scenario(CONF.command.scenario))
    comparison, trajectories = scenario.compare_structures(config)
    out = CONF.command.out
    fileutils.ensure_tree(out)
    for report in comparison.reports:
        _write_run(config, report, trajectories[report.mode], out,
                   suffix='_%s' % report.mode)
    export.export_report(comparison, os.path.join(out, 'comparison.json'))
    for report in comparison.reports:
        LOG.info(_LI("%(mode)s: converged=%(conv)s iterations=%(it)d "
                     "max lane deviation=%(dev).3f min distance=%(dist).3f "
                     "overlaps=%(ov)d"),
                 {'mode': report.mode, 'conv': report.converged,
                  'it': report.iterations,
                  'dev': report.max_lane_deviation,
                  'dist': report.min_distance, 'ov': report.overlap_count})
    converged = (len(comparison.reports) == len(fields.RunMode.ALL) and
                 all(r.converged for r in comparison.reports))
    return 0 if converged else 1


def do_bench():
    dims = [int(d) for d in CONF.command.state_dims.split(',') if d]
    timings, slope = bench.time_hybrid_solve(dims)
    for n, seconds in zip(dims, timings):
        print('%6d %12.6f' % (n, seconds))
    print(_('log-log slope: %.3f') % slope)
    return 0


def add_command_parsers(subparsers):
    parser = subparsers.add_parser('run', help=_('Solve one scenario.'))
    parser.add_argument('--scenario', required=True)
    parser.add_argument('--mode', choices=fields.RunMode.ALL)
    parser.add_argument('--out', default='.')
    parser.add_argument('--max-iters', dest='max_iters', type=int)
    parser.add_argument('--eta', type=float)
    parser.add_argument('--tol', type=float)
    parser.add_argument('--svg', action='store_true')
    parser.add_argument('--seed', type=int)
    parser.set_defaults(func=do_run)

    parser = subparsers.add_parser(
        'compare', help=_('Solve one scenario in every information mode.'))
    parser.add_argument('--scenario', required=True)
    parser.add_argument('--out', default='.')
    parser.add_argument('--max-iters', dest='max_iters', type=int)
    parser.add_argument('--svg', action='store_true')
    parser.add_argument('--seed', type=int)
    parser.set_defaults(func=do_compare)

    parser = subparsers.add_parser(
        'bench', help=_('Time the hybrid LQ solver against state size.'))
    parser.add_argument('--state-dims', dest='state_dims',
                        default='8,16,32,64,128')
    parser.set_defaults(func=do_bench)


command_opt = cfg.SubCommandOpt('command',
                                title='Commands',
                                help=_('Available commands'),
                                handler=add_command_parsers)


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    CONF.register_cli_opt(command_opt)
    logging.register_options(CONF)
    CONF(argv, project='hybrid-game')
    logging.setup(CONF, 'hybrid-game')
    hybrid_game.initialize()

    try:
        return CONF.command.func()
    except exception.ExceptionBase as err:
        LOG.error(_LE("%s"), err.format_message())
        return 2
