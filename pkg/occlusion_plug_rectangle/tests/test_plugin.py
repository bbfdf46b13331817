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
from oslo_config import fixture as config_fixture
import testtools

from hybrid_game import objects
from hybrid_game.objects import scenario as scenario_obj
from hybrid_game.objects import trajectory as trajectory_obj
from hybrid_game import visibility

from occlusion_plug_rectangle import rectangle


def rect(x, y, length, width):
    return scenario_obj.OrientedRectangle(center=np.array([x, y]),
                                          length=length, width=width,
                                          heading=0.0)


class PluginTest(testtools.TestCase):

    def __init__(self, *args, **kwargs):
        super(PluginTest, self).__init__(*args, **kwargs)

        objects.register_all()

        self.geometry = [rect(0.0, 0.0, 1.0, 1.0), rect(0.0, 0.0, 1.0, 1.0)]
        self.occluders = scenario_obj.OccluderSet(
            static=[rect(0.0, 0.0, 1.0, 20.0)])
        heights = [20.0, 0.0, 0.0, 20.0]

        self.trajectory = trajectory_obj.TrajectoryIterate(
            states=np.array([[-5.0, y, 0.0, 0.0, 5.0, y, 0.0, 0.0]
                             for y in heights]),
            controls=[np.zeros((4, 2)), np.zeros((4, 2))])

    def setUp(self):
        super(PluginTest, self).setUp()
        self.config = self.useFixture(config_fixture.Config())

    def test_load(self):
        plugin = rectangle.RectanglePlugin.load('rectangle')
        self.assertTrue(hasattr(cfg.CONF, "hybrid_game_rectangle"))
        self.assertEqual(3, plugin.config.samples_per_edge)

    def test_find_occlusions(self):
        plugin = rectangle.RectanglePlugin.load('rectangle')
        schedule = plugin.find_occlusions(self.trajectory, self.geometry,
                                          self.occluders, [[0, 1]])
        self.assertEqual('FB[1,1] + OL[2,3] + FB[4,4]', repr(schedule))
        self.assertEqual([False, True, True, False],
                         self.trajectory.occluded)

    @mock.patch.object(visibility, 'find_occlusions')
    def test_samples_per_edge(self, mock_find):
        plugin = rectangle.RectanglePlugin.load('rectangle')
        self.config.config(samples_per_edge=0,
                           group='hybrid_game_rectangle')
        plugin.find_occlusions(self.trajectory, self.geometry,
                               self.occluders, [[0, 1]])
        mock_find.assert_called_once_with(self.trajectory, self.geometry,
                                          self.occluders, [[0, 1]],
                                          samples_per_edge=0)
