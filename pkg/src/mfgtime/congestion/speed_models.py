import math
from abc import abstractmethod

import numpy as np

from mfgtime.congestion.kernel_density import kernel_density, kernel_gradient_sup
from mfgtime.core.component import StandardComponent
from mfgtime.core.errors import ConfigError
from mfgtime.core.parameter import Parameter
from mfgtime.model.measures import EmpiricalMeasure, as_points


class SpeedModelBase(StandardComponent):
    """
    A speed law K(mu, nu, x) with values in [K_min, K_max], where mu is the
    agent's own population and nu the mixture of the other populations.
    """

    type_name = None

    @property
    def category_name(self):
        return "speed_model"

    @property
    def k_min(self) -> float:
        return self._k_min.value

    @property
    def k_max(self) -> float:
        return self._k_max.value

    def validate(self):
        if self.k_min <= 0:
            raise ConfigError(f"K_min must be positive, got {self.k_min}.")
        if self.k_max < self.k_min:
            raise ConfigError(f"K_max must be at least K_min, got K_min={self.k_min}, K_max={self.k_max}.")

    @property
    @abstractmethod
    def depends_on_measures(self) -> bool:
        """Whether the speed changes with the crowd at all."""
        pass

    @abstractmethod
    def speed(self, own: EmpiricalMeasure, other: EmpiricalMeasure, points) -> np.ndarray:
        pass

    @abstractmethod
    def lipschitz_x(self, dim) -> float:
        """Spatial Lipschitz constant of x -> K(mu, nu, x), uniform in the measures."""
        pass

    def lipschitz_w1(self, dim):
        """
        Lipschitz constants of K in W_1 for the own and for the other measure,
        uniform in x. Crowd-independent models return zeros.
        """
        return 0.0, 0.0

    def as_config(self):
        config = {"type": self.type_name}
        config.update(self.as_dict())
        return config


class ExponentialCongestion(SpeedModelBase):
    """
    K = K_min + (K_max - K_min) * exp(-a_self * rho_mu(x) - a_cross * rho_nu(x)),
    with Gaussian kernel densities of bandwidth sigma.
    """

    type_name = "exponential"

    def __init__(self, k_min, k_max, sigma, a_self=0.0, a_cross=0.0):
        super().__init__()
        self._k_min = Parameter(value=k_min,
                                name="k_min",
                                pretty_name="minimal speed",
                                units="m/s",
                                min_value=0.0,
                                strict_min=True)
        self._k_max = Parameter(value=k_max,
                                name="k_max",
                                pretty_name="maximal speed",
                                units="m/s",
                                min_value=0.0,
                                strict_min=True)
        self.sigma = Parameter(value=sigma,
                               name="sigma",
                               pretty_name="kernel bandwidth",
                               units="m",
                               min_value=0.0,
                               strict_min=True)
        self.a_self = Parameter(value=a_self,
                                name="a_self",
                                pretty_name="own-population sensitivity",
                                min_value=0.0)
        self.a_cross = Parameter(value=a_cross,
                                 name="a_cross",
                                 pretty_name="other-population sensitivity",
                                 min_value=0.0)
        self.validate()
        self._locked = True

    @property
    def depends_on_measures(self):
        return self.k_max > self.k_min and (self.a_self.value > 0 or self.a_cross.value > 0)

    def speed(self, own, other, points):
        points = as_points(points, _measure_dim(own, other))
        if not self.depends_on_measures:
            return np.full(points.shape[0], self.k_max)
        exponent = np.zeros(points.shape[0])
        if self.a_self.value > 0:
            exponent -= self.a_self.value * kernel_density(own, points, self.sigma.value)
        if self.a_cross.value > 0 and not other.is_zero:
            exponent -= self.a_cross.value * kernel_density(other, points, self.sigma.value)
        return self.k_min + (self.k_max - self.k_min) * np.exp(exponent)

    def lipschitz_x(self, dim):
        sensitivity = self.a_self.value + self.a_cross.value
        return (self.k_max - self.k_min) * sensitivity * kernel_gradient_sup(self.sigma.value, dim)

    def lipschitz_w1(self, dim):
        gradient = (self.k_max - self.k_min) * kernel_gradient_sup(self.sigma.value, dim)
        return gradient * self.a_self.value, gradient * self.a_cross.value


class SinusoidalLandscape(SpeedModelBase):
    """
    Exogenous field k(x) = base + amplitude * prod_j sin(frequency * x_j),
    independent of the crowd.
    """

    type_name = "landscape"

    def __init__(self, base, amplitude, frequency=1.0):
        super().__init__()
        self.base = Parameter(value=base,
                              name="base",
                              pretty_name="mean speed",
                              units="m/s",
                              min_value=0.0,
                              strict_min=True,
                              editable=False)
        self.amplitude = Parameter(value=amplitude,
                                   name="amplitude",
                                   pretty_name="speed modulation",
                                   units="m/s",
                                   editable=False)
        self.frequency = Parameter(value=frequency,
                                   name="frequency",
                                   pretty_name="spatial frequency",
                                   units="1/m",
                                   editable=False)
        self._k_min = Parameter(value=self.base.value - abs(self.amplitude.value),
                                name="k_min",
                                pretty_name="minimal speed",
                                units="m/s",
                                editable=False)
        self._k_max = Parameter(value=self.base.value + abs(self.amplitude.value),
                                name="k_max",
                                pretty_name="maximal speed",
                                units="m/s",
                                editable=False)
        self.validate()
        self._locked = True

    @property
    def depends_on_measures(self):
        return False

    def speed(self, own, other, points):
        points = as_points(points, _measure_dim(own, other))
        modulation = np.prod(np.sin(self.frequency.value * points), axis=1)
        return self.base.value + self.amplitude.value * modulation

    def lipschitz_x(self, dim):
        return abs(self.amplitude.value) * abs(self.frequency.value) * math.sqrt(dim)

    def as_config(self):
        return {"type": self.type_name,
                "base": self.base.value,
                "amplitude": self.amplitude.value,
                "frequency": self.frequency.value}


def speed(own: EmpiricalMeasure, other: EmpiricalMeasure, points, model: SpeedModelBase) -> np.ndarray:
    """K(mu, nu, x) at each of the given positions."""
    return model.speed(own, other, points)


def _measure_dim(own, other):
    # the zero measure still carries its dimension
    return other.dim if own.is_zero else own.dim
