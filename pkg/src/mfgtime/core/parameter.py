import math

from mfgtime.core.errors import ConfigError
from mfgtime.utils.formatting import warning


class Descriptor:
    """
    Base class for descriptors (configuration values that are not bounded numbers).
    """

    def __init__(self,
                 value,
                 name,
                 pretty_name=None,
                 units=None,
                 description=None,
                 editable=True):
        self._value = value
        self._description = description
        self._editable = editable
        self.pretty_name = pretty_name or name
        self.name = name
        self.units = units
        self.is_parameter = False  # Differentiates from Parameter class

    @property
    def value(self):
        return self._value

    @value.setter
    def value(self, new_value):
        if self._editable:
            self._value = new_value
        else:
            print(warning(f"The value '{self.name}' is derived from other settings and cannot be changed manually."))

    @property
    def description(self):
        return self._description

    @property
    def editable(self):
        return self._editable

    def __repr__(self):
        units = f" {self.units}" if self.units else ""
        return f"{self.__class__.__name__}({self.name}={self._value!r}{units})"


class Parameter(Descriptor):
    """
    A numeric setting with optional bounds, checked on every assignment.

    `min_value`/`max_value` are inclusive unless `strict_min` is set, in
    which case the value must be strictly greater than `min_value`.
    """

    def __init__(self,
                 value,
                 name,
                 pretty_name=None,
                 units=None,
                 description=None,
                 min_value=None,
                 max_value=None,
                 strict_min=False,
                 integer=False,
                 editable=True):
        self.min = min_value
        self.max = max_value
        self.strict_min = strict_min
        self.integer = integer
        super().__init__(self._validate(value, name),
                         name,
                         pretty_name,
                         units,
                         description,
                         editable)
        self.is_parameter = True  # Flag to detect parameters

    def _validate(self, value, name=None):
        name = name or self.name
        try:
            number = int(value) if self.integer else float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"Parameter '{name}' must be a number, got {value!r}.")
        if self.integer and number != value:
            raise ConfigError(f"Parameter '{name}' must be an integer, got {value!r}.")
        if not self.integer and math.isnan(number):
            raise ConfigError(f"Parameter '{name}' must not be NaN.")
        if self.min is not None:
            if self.strict_min and number <= self.min:
                raise ConfigError(f"Parameter '{name}' must be > {self.min}, got {number}.")
            if number < self.min:
                raise ConfigError(f"Parameter '{name}' must be ≥ {self.min}, got {number}.")
        if self.max is not None and number > self.max:
            raise ConfigError(f"Parameter '{name}' must be ≤ {self.max}, got {number}.")
        return number

    @property
    def value(self):
        return self._value

    @value.setter
    def value(self, new_value):
        Descriptor.value.fset(self, self._validate(new_value))
