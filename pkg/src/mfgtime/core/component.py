from abc import ABC, abstractmethod

from mfgtime.core.parameter import Descriptor
from mfgtime.utils.formatting import error, paragraph, table


class ComponentBase(ABC):
    """
    Base class for all configuration components.
    """
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._locked = False  # If adding new attributes is locked


class StandardComponent(ComponentBase):
    """
    A named group of descriptors and parameters, e.g. the space-time grid
    or a speed model. Assigning a plain value to an existing descriptor
    attribute updates that descriptor's value.
    """
    @property
    @abstractmethod
    def category_name(self):
        """
        Must be implemented in subclasses to return the scenario section name.
        """
        pass

    def __setattr__(self, name, value):
        """
        If the object is locked, new attributes are refused.
        If the attribute exists and is a Descriptor, its value is set.
        """
        if getattr(self, "_locked", False) and not hasattr(self, name):
            print(error(f"Cannot add new setting '{name}' to '{self.category_name}'"))
            return

        attr = self.__dict__.get(name, None)
        if isinstance(attr, Descriptor) and not isinstance(value, Descriptor):
            attr.value = value
        else:
            super().__setattr__(name, value)

    def descriptors(self):
        """Descriptors in declaration order."""
        return [attr for attr in self.__dict__.values() if isinstance(attr, Descriptor)]

    def as_dict(self):
        d = {}
        for attr_obj in self.descriptors():
            d[attr_obj.name] = attr_obj.value
        return d

    def show(self):
        rows = []
        for attr_obj in self.descriptors():
            rows.append([attr_obj.pretty_name, attr_obj.value, attr_obj.units or ""])
        print(paragraph(f"Settings of '{self.category_name}'"))
        print(table(rows, headers=["setting", "value", "units"]))
