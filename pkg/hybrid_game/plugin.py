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

import abc
from oslo_config import cfg
import six


CONF = cfg.CONF


@six.add_metaclass(abc.ABCMeta)
class OcclusionPluginBase(object):
    """Base class for all occlusion detector plugins."""

    # Override to provide a tuple of oslo_config.Opt instances for
    # the plugin config parameters
    CONFIG_OPTS = ()

    def __init__(self, config):
        """
        Initialize the plugin object with the provided config

        :param config: `oslo_config.ConfigOpts.GroupAttr` instance:
        """
        self.config = config

    @abc.abstractmethod
    def find_occlusions(self, trajectory, geometry, occluders, pairs):
        """
        Decide for every stage of a trajectory iterate whether the players
        are occluded, and return the resulting information schedule.

        Implementations store the per-stage flags in
        `trajectory.occluded`.

        :param trajectory: `TrajectoryIterate` of T stages.
        :param geometry: list of per-player `OrientedRectangle` templates.
        :param occluders: `OccluderSet`.
        :param pairs: list of 0-based interacting player pairs.
        :returns: `hybrid_game.objects.schedule.InformationSchedule`
        :raises `hybrid_game.exception.UnknownPlayer` for a pair that
                references a player outside the geometry list.
        """

    @classmethod
    def load(cls, plugin_name):
        """
        Load a plugin, registering its configuration options

        :param plugin_name: the name of the plugin extension

        :returns: an initialized instance of the class
        """
        cfg_group_name = "hybrid_game_" + plugin_name
        cfg_opts = getattr(cls, "CONFIG_OPTS")
        cfg_vals = None
        if cfg_opts and len(cfg_opts) > 0:
            cfg_group = cfg.OptGroup(
                cfg_group_name,
                "hybrid-game occlusion plugin %s options" % plugin_name)
            CONF.register_opts(cfg_opts, group=cfg_group)

            cfg_vals = getattr(CONF, cfg_group_name)
        return cls(cfg_vals)
