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

from hybrid_game import game
from hybrid_game.objects import fields
from hybrid_game import plugin


class FixedPlugin(plugin.OcclusionPluginBase):
    """
    Reports the same information structure at every stage, without
    looking at the geometry.
    """

    MODE = None

    def find_occlusions(self, trajectory, geometry, occluders, pairs):
        schedule = game.single_period_schedule(trajectory.horizon,
                                               self.MODE)
        trajectory.occluded = game.flags_from_schedule(schedule)
        return schedule


class OpenLoopPlugin(FixedPlugin):
    """Every stage is occluded: one open-loop period over the horizon."""

    MODE = fields.InformationMode.OPEN_LOOP


class FeedbackPlugin(FixedPlugin):
    """Every stage is visible: one feedback period over the horizon."""

    MODE = fields.InformationMode.FEEDBACK
