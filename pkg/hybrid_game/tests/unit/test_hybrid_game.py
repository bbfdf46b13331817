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
from oslo_config import cfg
from stevedore import extension

import hybrid_game
from hybrid_game import exception
from hybrid_game import game as game_ops
from hybrid_game.objects import scenario as scenario_obj
from hybrid_game.objects import trajectory as trajectory_obj
from hybrid_game import plugin
from hybrid_game.tests import base


class DemoPlugin(plugin.OcclusionPluginBase):

    CONFIG_OPTS = (
        cfg.BoolOpt("always_occluded",
                    default=False,
                    help="Report every stage as occluded"),
        cfg.IntOpt("samples",
                   default=3,
                   help="Samples per rectangle edge")
    )

    def find_occlusions(self, trajectory, geometry, occluders, pairs):
        flags = [self.config.always_occluded] * trajectory.horizon
        trajectory.occluded = flags
        return game_ops.partition_from_flags(flags)


class DemoPluginNoConfig(plugin.OcclusionPluginBase):

    def find_occlusions(self, trajectory, geometry, occluders, pairs):
        pass


class TestHybridGame(base.TestCase):

    def setUp(self):
        super(TestHybridGame, self).setUp()
        hybrid_game._EXT_MANAGER = None
        self.addCleanup(setattr, hybrid_game, '_EXT_MANAGER', None)
        self.trajectory = trajectory_obj.TrajectoryIterate(
            states=np.zeros((4, 8)),
            controls=[np.zeros((4, 2)), np.zeros((4, 2))])

    def _find(self, name='foobar', pairs=((0, 1),)):
        return hybrid_game.find_occlusions(
            name, self.trajectory, [], scenario_obj.OccluderSet(),
            list(pairs))

    @mock.patch('stevedore.extension.ExtensionManager')
    def test_initialize(self, mock_EM):
        self.assertIsNone(hybrid_game._EXT_MANAGER)
        # Note: the duplicate call for initialize is to validate
        # that the extension manager is only initialized once
        hybrid_game.initialize()
        hybrid_game.initialize()
        mock_EM.assert_called_once_with(
            invoke_on_load=False, namespace='hybrid_game.occlusion')
        self.assertIsNotNone(hybrid_game._EXT_MANAGER)

    @mock.patch('stevedore.extension.ExtensionManager')
    def test_initialize_reset(self, mock_EM):
        hybrid_game.initialize()
        hybrid_game.initialize(reset=True)
        self.assertEqual(2, mock_EM.call_count)

    def test_load_plugin(self):
        obj = DemoPlugin.load("demo")
        self.assertTrue(hasattr(cfg.CONF, "hybrid_game_demo"))
        self.assertTrue(hasattr(cfg.CONF.hybrid_game_demo,
                                "always_occluded"))
        self.assertTrue(hasattr(cfg.CONF.hybrid_game_demo, "samples"))
        self.assertEqual(cfg.CONF.hybrid_game_demo.always_occluded, False)
        self.assertEqual(cfg.CONF.hybrid_game_demo.samples, 3)

        self.assertEqual(obj.config, cfg.CONF.hybrid_game_demo)

    def test_load_plugin_no_config(self):
        obj = DemoPluginNoConfig.load("demonocfg")
        self.assertFalse(hasattr(cfg.CONF, "hybrid_game_demonocfg"))

        self.assertIsNone(obj.config)

    def test_find_not_initialized(self):
        self.assertRaises(exception.LibraryNotInitialized, self._find)

    def test_get_detector_not_initialized(self):
        self.assertRaises(exception.LibraryNotInitialized,
                          hybrid_game.get_detector, 'rectangle')

    def _demo_extension(self):
        return extension.Extension(name="demo",
                                   entry_point="hybrid-game",
                                   plugin=DemoPlugin,
                                   obj=None)

    def test_find_occlusions(self):
        plg = self._demo_extension()
        with mock.patch('stevedore.extension.ExtensionManager.names',
                        return_value=['foobar']),\
                mock.patch('stevedore.extension.ExtensionManager.__getitem__',
                           return_value=plg):
            hybrid_game.initialize()
            self.config.config(always_occluded=True,
                               group='hybrid_game_foobar')
            schedule = self._find()

        self.assertEqual([True] * 4, self.trajectory.occluded)
        self.assertEqual(1, schedule.occluded_count)
        self.assertEqual([(1, 4)],
                         [(p.start, p.end) for p in schedule.periods])

    @mock.patch.object(DemoPlugin, "find_occlusions")
    def test_find_occlusions_arguments(self, mock_find):
        plg = self._demo_extension()
        occluders = scenario_obj.OccluderSet()
        with mock.patch('stevedore.extension.ExtensionManager.names',
                        return_value=['foobar']),\
                mock.patch('stevedore.extension.ExtensionManager.__getitem__',
                           return_value=plg):
            hybrid_game.initialize()
            hybrid_game.find_occlusions('foobar', self.trajectory, [],
                                        occluders, [(0, 1)])
        mock_find.assert_called_once_with(self.trajectory, [], occluders,
                                          [(0, 1)])

    @mock.patch.object(DemoPlugin, "find_occlusions",
                       side_effect=ValueError("bad geometry"))
    def test_find_occlusions_failure(self, mock_find):
        plg = self._demo_extension()
        with mock.patch('stevedore.extension.ExtensionManager.names',
                        return_value=['foobar']),\
                mock.patch('stevedore.extension.ExtensionManager.__getitem__',
                           return_value=plg):
            hybrid_game.initialize()
            err = self.assertRaises(exception.DetectorException, self._find)
        self.assertEqual('foobar', err.kwargs['plugin_name'])
        self.assertIn('bad geometry', err.format_message())

    @mock.patch.object(DemoPlugin, "find_occlusions",
                       side_effect=exception.UnknownPlayer(player=5,
                                                           n_players=2))
    def test_find_occlusions_unknown_player(self, mock_find):
        plg = self._demo_extension()
        with mock.patch('stevedore.extension.ExtensionManager.names',
                        return_value=['foobar']),\
                mock.patch('stevedore.extension.ExtensionManager.__getitem__',
                           return_value=plg):
            hybrid_game.initialize()
            self.assertRaises(exception.UnknownPlayer, self._find)

    def test_no_matching_plugin(self):
        with mock.patch('stevedore.extension.ExtensionManager.names',
                        return_value=[]),\
                mock.patch('stevedore.extension.ExtensionManager.__getitem__',
                           side_effect=KeyError('nosuch')):
            hybrid_game.initialize()
            err = self.assertRaises(exception.NoMatchingPlugin,
                                    hybrid_game.get_detector, 'nosuch')
        self.assertEqual('nosuch', err.kwargs['plugin_name'])
