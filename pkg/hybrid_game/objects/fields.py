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

import numpy as np
from oslo_versionedobjects import fields

from hybrid_game.i18n import _


class NDArray(fields.FieldType):
    """A dense float64 array, serialized as nested lists."""

    @staticmethod
    def coerce(obj, attr, value):
        try:
            array = np.array(value, dtype=np.float64)
        except (TypeError, ValueError):
            raise ValueError(_("Field %(attr)s requires a numeric array, "
                               "not %(type)s") %
                             {'attr': attr, 'type': type(value).__name__})
        if array.dtype == object:
            raise ValueError(_("Field %s requires a rectangular array") %
                             attr)
        return array

    @staticmethod
    def from_primitive(obj, attr, value):
        return np.array(value, dtype=np.float64)

    @staticmethod
    def to_primitive(obj, attr, value):
        return np.asarray(value).tolist()

    @staticmethod
    def stringify(value):
        return 'array%s' % (np.shape(value),)


class NDArrayField(fields.AutoTypedField):
    AUTO_TYPE = NDArray()


class ListOfArraysField(fields.AutoTypedField):
    AUTO_TYPE = fields.List(NDArray())


class ListOfListOfArraysField(fields.AutoTypedField):
    AUTO_TYPE = fields.List(fields.List(NDArray()))


class ListOfBooleansField(fields.AutoTypedField):
    AUTO_TYPE = fields.List(fields.Boolean())


class ListOfFloatsField(fields.AutoTypedField):
    AUTO_TYPE = fields.List(fields.Float())


class ListOfIntegerPairsField(fields.AutoTypedField):
    AUTO_TYPE = fields.List(fields.List(fields.Integer()))


class InformationMode(fields.Enum):
    OPEN_LOOP = 'openloop'
    FEEDBACK = 'feedback'

    ALL = (OPEN_LOOP, FEEDBACK)

    def __init__(self):
        super(InformationMode, self).__init__(
            valid_values=InformationMode.ALL)


class InformationModeField(fields.BaseEnumField):
    AUTO_TYPE = InformationMode()


class RunMode(fields.Enum):
    HYBRID = 'hybrid'
    OPEN_LOOP = 'openloop'
    FEEDBACK = 'feedback'

    ALL = (HYBRID, OPEN_LOOP, FEEDBACK)

    def __init__(self):
        super(RunMode, self).__init__(
            valid_values=RunMode.ALL)


class RunModeField(fields.BaseEnumField):
    AUTO_TYPE = RunMode()
