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

from oslo_config import cfg

from hybrid_game import plugin
from hybrid_game import visibility


class RectanglePlugin(plugin.OcclusionPluginBase):
    """
    Line of sight between rectangular bodies, blocked by static
    rectangles and by the bodies of designated players.
    """

    CONFIG_OPTS = (
        cfg.IntOpt('samples_per_edge',
                   default=3,
                   min=0,
                   help='Interior boundary points sampled on each edge of '
                        'a body, in addition to its four corners.'),
    )

    def find_occlusions(self, trajectory, geometry, occluders, pairs):
        return visibility.find_occlusions(
            trajectory, geometry, occluders, pairs,
            samples_per_edge=self.config.samples_per_edge)
