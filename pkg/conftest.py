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

"""pytest wiring for the testtools-based suite.

oslo.versionedobjects' TestCase registers a cleanup that deletes every
public instance attribute. Under pytest that includes the bound test
method pytest sets on the instance and deletes itself afterwards, so
pytest's own teardown raises AttributeError. Leave that one attribute
in place; everything else is cleared as before.

testscenarios.WithScenarios multiplies a test inside run() by copying
the instance, which under pytest also copies the bound method pytest
attached to the unscenarioed original. Expand such classes into one
class per scenario at collection time instead, as testtools' loader
does.
"""

import inspect

from _pytest import unittest as pytest_unittest
from oslo_versionedobjects import test as ovo_test
import testscenarios

_orig_clear_attrs = ovo_test.TestCase._clear_attrs


def _clear_attrs(self):
    method = self.__dict__.pop(self._testMethodName, None)
    _orig_clear_attrs(self)
    if method is not None:
        self.__dict__[self._testMethodName] = method


ovo_test.TestCase._clear_attrs = _clear_attrs


def pytest_pycollect_makeitem(collector, name, obj):
    if not (inspect.isclass(obj)
            and issubclass(obj, testscenarios.WithScenarios)
            and getattr(obj, 'scenarios', None)):
        return None
    items = []
    for scenario_name, params in obj.scenarios:
        attrs = dict(params)
        attrs['scenarios'] = None
        cls = type('%s(%s)' % (name, scenario_name), (obj,), attrs)
        cls.__module__ = obj.__module__
        item = pytest_unittest.UnitTestCase.from_parent(
            collector, name=cls.__name__)
        item.obj = cls
        items.append(item)
    return items
