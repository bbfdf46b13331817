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

from oslo_log import log as logging
from stevedore import extension

import hybrid_game.exception
import hybrid_game.i18n
import hybrid_game.objects

_LE = hybrid_game.i18n._LE

_EXT_MANAGER = None
LOG = logging.getLogger('hybrid_game')

NAMESPACE = 'hybrid_game.occlusion'


def initialize(reset=False):
    """
    Loads all occlusion detector plugins and registers the versioned
    objects. Each plugin's configuration options are registered under
    its own group when it is loaded.

    :param reset: Recreate and load the detector plugin extensions.

    """
    global _EXT_MANAGER
    if reset or (_EXT_MANAGER is None):
        _EXT_MANAGER = extension.ExtensionManager(namespace=NAMESPACE,
                                                  invoke_on_load=False)
        for plugin_name in _EXT_MANAGER.names():
            cls = _EXT_MANAGER[plugin_name].plugin
            obj = cls.load(plugin_name)
            _EXT_MANAGER[plugin_name].obj = obj

        hybrid_game.objects.register_all()


def get_detector(name):
    """
    Return the loaded occlusion detector plugin called `name`.

    :raises `exception.LibraryNotInitialized` if hybrid_game.initialize()
            was not called first.
    :raises `exception.NoMatchingPlugin` if no plugin has that name.
    """
    if _EXT_MANAGER is None:
        raise hybrid_game.exception.LibraryNotInitialized()

    try:
        return _EXT_MANAGER[name].obj
    except KeyError:
        raise hybrid_game.exception.NoMatchingPlugin(plugin_name=name)


def find_occlusions(detector_name, trajectory, geometry, occluders, pairs):
    """
    Run the named detector on a trajectory iterate and return the
    information schedule derived from its per-stage occlusion flags.

    :param detector_name: name of the `hybrid_game.occlusion` extension.
    :param trajectory: `hybrid_game.objects.trajectory.TrajectoryIterate`.
    :param geometry: per-player `OrientedRectangle` body templates.
    :param occluders: `hybrid_game.objects.scenario.OccluderSet`.
    :param pairs: list of 0-based (i, j) player pairs that must see each
                  other for a stage to count as visible.
    :raises `exception.LibraryNotInitialized`, `exception.NoMatchingPlugin`
    :raises `exception.DetectorException` if the plugin fails.
    """
    detector = get_detector(detector_name)

    try:
        LOG.debug("Finding occlusions with detector %s", detector_name)
        return detector.find_occlusions(trajectory, geometry, occluders,
                                        pairs)
    except hybrid_game.exception.UnknownPlayer:
        raise
    except Exception as err:
        LOG.error(_LE("Occlusion detector %(name)s failed. "
                      "Got error: %(err)s"),
                  {'name': detector_name, 'err': err})
        raise hybrid_game.exception.DetectorException(
            plugin_name=detector_name, err=err)
