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

from hybrid_game.i18n import _


class ExceptionBase(Exception):
    """Base Exception

    To correctly use this class, inherit from it and define
    a 'msg_fmt' property. That msg_fmt will get printf'd
    with the keyword arguments provided to the constructor.

    """
    msg_fmt = _("An unknown exception occurred.")

    def __init__(self, message=None, **kwargs):
        self.kwargs = kwargs

        if not message:
            try:
                message = self.msg_fmt % kwargs
            except Exception:
                # at least get the core message out if something happened
                message = self.msg_fmt

        self.message = message
        super(ExceptionBase, self).__init__(message)

    def format_message(self):
        return self.args[0]


class LibraryNotInitialized(ExceptionBase):
    msg_fmt = _("Before using the hybrid_game library, you need to call "
                "hybrid_game.initialize()")


class NoMatchingPlugin(ExceptionBase):
    msg_fmt = _("No occlusion detector plugin was found with the name "
                "%(plugin_name)s")


class DetectorException(ExceptionBase):
    msg_fmt = _("Occlusion detector %(plugin_name)s failed. "
                "Got error: %(err)s")


class EmptyFlagSequence(ExceptionBase):
    msg_fmt = _("Cannot build an information schedule from an empty "
                "flag sequence")


class InvalidSchedule(ExceptionBase):
    msg_fmt = _("Invalid information schedule: %(reason)s")


class DimensionMismatch(ExceptionBase):
    msg_fmt = _("Dimension mismatch at stage %(stage)s: %(reason)s")


class IllConditionedCoupling(ExceptionBase):
    msg_fmt = _("Open-loop coupling matrix is singular or ill-conditioned "
                "at stage %(stage)s (reciprocal condition %(rcond)s)")


class SingularCoupledSystem(ExceptionBase):
    msg_fmt = _("Coupled feedback gain system is singular at stage "
                "%(stage)s (reciprocal condition %(rcond)s)")


class AsymmetricValue(ExceptionBase):
    msg_fmt = _("Value matrix of player %(player)s is not symmetric at "
                "stage %(stage)s (deviation %(deviation)s)")


class PeriodSolveFailed(ExceptionBase):
    msg_fmt = _("Solving period %(period)s failed. Got error: %(err)s")


class SingularKKTSystem(ExceptionBase):
    msg_fmt = _("Stacked KKT system is singular: the game has no unique "
                "open-loop equilibrium")


class UnknownPlayer(ExceptionBase):
    msg_fmt = _("Player index %(player)s is out of range for a "
                "%(n_players)s player game")


class NonFiniteRollout(ExceptionBase):
    msg_fmt = _("Rollout produced a non-finite state at stage %(stage)s")


class RolloutDiverged(ExceptionBase):
    msg_fmt = _("Rollout stayed non-finite after %(backoffs)s step size "
                "reductions at iteration %(iteration)s")


class ScenarioParseError(ExceptionBase):
    msg_fmt = _("Unable to parse scenario %(path)s at line %(line)s: "
                "%(reason)s")


class ScenarioValidationError(ExceptionBase):
    msg_fmt = _("Invalid scenario value at %(field)s: %(reason)s")
