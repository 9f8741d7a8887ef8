from abc import ABC, abstractmethod

import numpy as np

from mfgtime.core.errors import ConfigError
from mfgtime.model.measures import EmpiricalMeasure
from mfgtime.utils.formatting import paragraph, table


def population_rng(seed, index):
    """Independent, reproducible random stream for population `index`."""
    return np.random.default_rng([int(seed), int(index)])


class SamplerBase(ABC):
    """
    Builds an initial measure m0 from scenario parameters.
    """

    name = None

    @abstractmethod
    def sample(self, rng) -> EmpiricalMeasure:
        pass

    @abstractmethod
    def as_dict(self) -> dict:
        pass


class GridSampler(SamplerBase):
    """Equal-weight atoms on a tensor grid of `shape` points spanning [lo, hi]."""

    name = "grid"

    def __init__(self, lo, hi, shape):
        self.lo = np.asarray(lo, dtype=float).reshape(-1)
        self.hi = np.asarray(hi, dtype=float).reshape(-1)
        self.shape = [int(n) for n in np.atleast_1d(shape)]
        if not (self.lo.size == self.hi.size == len(self.shape)):
            raise ConfigError("Grid sampler needs lo, hi and shape of the same dimension.")
        if any(n < 1 for n in self.shape):
            raise ConfigError(f"Grid sampler shape must be positive, got {self.shape}.")

    def sample(self, rng=None):
        axes = [np.linspace(lo, hi, n) if n > 1 else np.array([0.5 * (lo + hi)])
                for lo, hi, n in zip(self.lo, self.hi, self.shape)]
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([m.reshape(-1) for m in mesh], axis=1)
        return EmpiricalMeasure(points)

    def as_dict(self):
        return {"sampler": self.name, "lo": self.lo.tolist(), "hi": self.hi.tolist(), "shape": self.shape}


class UniformSampler(SamplerBase):
    """`count` equal-weight atoms drawn uniformly from the box [lo, hi]."""

    name = "uniform"

    def __init__(self, lo, hi, count):
        self.lo = np.asarray(lo, dtype=float).reshape(-1)
        self.hi = np.asarray(hi, dtype=float).reshape(-1)
        self.count = int(count)
        if self.lo.size != self.hi.size or np.any(self.lo > self.hi):
            raise ConfigError("Uniform sampler needs lo <= hi of the same dimension.")
        if self.count < 1:
            raise ConfigError(f"Uniform sampler count must be positive, got {count}.")

    def sample(self, rng):
        points = rng.uniform(self.lo, self.hi, size=(self.count, self.lo.size))
        return EmpiricalMeasure(points)

    def as_dict(self):
        return {"sampler": self.name, "lo": self.lo.tolist(), "hi": self.hi.tolist(), "count": self.count}


class GaussianSampler(SamplerBase):
    """`count` equal-weight atoms drawn from an isotropic or diagonal normal law."""

    name = "gaussian"

    def __init__(self, mean, std, count):
        self.mean = np.asarray(mean, dtype=float).reshape(-1)
        self.std = np.broadcast_to(np.asarray(std, dtype=float), self.mean.shape).copy()
        self.count = int(count)
        if np.any(self.std < 0):
            raise ConfigError("Gaussian sampler std must be nonnegative.")
        if self.count < 1:
            raise ConfigError(f"Gaussian sampler count must be positive, got {count}.")

    def sample(self, rng):
        points = rng.normal(self.mean, self.std, size=(self.count, self.mean.size))
        return EmpiricalMeasure(points)

    def as_dict(self):
        return {"sampler": self.name, "mean": self.mean.tolist(), "std": self.std.tolist(), "count": self.count}


class ExplicitSampler(SamplerBase):
    """Atoms given verbatim as rows [x_1, ..., x_d, weight]."""

    name = "explicit"

    def __init__(self, atoms):
        atoms = np.asarray(atoms, dtype=float)
        if atoms.ndim != 2 or atoms.shape[1] < 2 or atoms.shape[0] < 1:
            raise ConfigError("Explicit atoms must be a nonempty list of [x_1, ..., x_d, weight] rows.")
        self.atoms = atoms

    def sample(self, rng=None):
        try:
            return EmpiricalMeasure(self.atoms[:, :-1], self.atoms[:, -1], dim=self.atoms.shape[1] - 1)
        except ValueError as exc:
            raise ConfigError(f"Invalid explicit measure: {exc}")

    def as_dict(self):
        return {"sampler": self.name, "atoms": self.atoms.tolist()}


class SamplerFactory:
    _supported = {
        'grid': {
            'description': 'Equal weights on a tensor grid: lo, hi, shape',
            'class': GridSampler,
        },
        'uniform': {
            'description': 'Seeded uniform draws in a box: lo, hi, count',
            'class': UniformSampler,
        },
        'gaussian': {
            'description': 'Seeded normal draws: mean, std, count',
            'class': GaussianSampler,
        },
        'explicit': {
            'description': 'Atom list of [x_1, ..., x_d, weight] rows: atoms',
            'class': ExplicitSampler,
        },
    }

    @classmethod
    def list_supported_samplers(cls):
        return list(cls._supported.keys())

    @classmethod
    def show_supported_samplers(cls):
        rows = [[name, config['description']] for name, config in cls._supported.items()]
        print(paragraph("Supported initial-measure samplers"))
        print(table(rows, headers=["Sampler", "Description"]))

    @classmethod
    def create(cls, spec: dict) -> SamplerBase:
        spec = dict(spec)
        kind = spec.pop("sampler", None)
        config = cls._supported.get(kind)
        if config is None:
            raise ConfigError(f"Unsupported sampler: '{kind}'.\n "
                              f"Supported samplers: {cls.list_supported_samplers()}")
        try:
            return config['class'](**spec)
        except TypeError as exc:
            raise ConfigError(f"Bad parameters for sampler '{kind}': {exc}")
