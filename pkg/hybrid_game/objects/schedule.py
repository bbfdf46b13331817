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

from oslo_versionedobjects import base
from oslo_versionedobjects import fields

from hybrid_game.objects import base as hg_base
from hybrid_game.objects import fields as hg_fields


@base.VersionedObjectRegistry.register
class Period(hg_base.VersionedObject, base.ComparableVersionedObject):
    """A maximal run of stages sharing one information structure."""
    VERSION = '1.0'

    fields = {
        # 1-based, inclusive
        'start': fields.IntegerField(),
        'end': fields.IntegerField(),
        'mode': hg_fields.InformationModeField(),
    }

    @property
    def occluded(self):
        return self.mode == hg_fields.InformationMode.OPEN_LOOP

    @property
    def stages(self):
        return range(self.start, self.end + 1)

    def __len__(self):
        return self.end - self.start + 1

    def __repr__(self):
        return '%s[%d,%d]' % ('OL' if self.occluded else 'FB',
                              self.start, self.end)


@base.VersionedObjectRegistry.register
class InformationSchedule(hg_base.VersionedObject,
                          base.ComparableVersionedObject):
    """Ordered partition of 1..T into open-loop and feedback periods."""
    VERSION = '1.0'

    fields = {
        'periods': fields.ListOfObjectsField('Period'),
    }

    @property
    def horizon(self):
        return self.periods[-1].end

    @property
    def occluded_count(self):
        return sum(1 for p in self.periods if p.occluded)

    @property
    def visible_count(self):
        return sum(1 for p in self.periods if not p.occluded)

    def period_of(self, t):
        for index, period in enumerate(self.periods):
            if period.start <= t <= period.end:
                return index, period
        raise IndexError(t)

    def __repr__(self):
        return ' + '.join(repr(p) for p in self.periods)
