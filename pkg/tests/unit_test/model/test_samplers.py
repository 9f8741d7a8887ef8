import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from mfgtime.core.errors import ConfigError
from mfgtime.model.samplers import SamplerFactory, population_rng


def test_grid_sampler_spans_the_box():
    measure = SamplerFactory.create({"sampler": "grid", "lo": [-1.0, 0.0], "hi": [1.0, 0.0],
                                     "shape": [3, 1]}).sample(None)
    assert_allclose(measure.points, [[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    assert_allclose(measure.weights, 1.0 / 3.0)


def test_seeded_samplers_are_reproducible():
    sampler = SamplerFactory.create({"sampler": "gaussian", "mean": [0.0, 0.0], "std": 0.5, "count": 20})
    first = sampler.sample(population_rng(7, 1))
    second = sampler.sample(population_rng(7, 1))
    other = sampler.sample(population_rng(7, 2))
    assert_array_equal(first.points, second.points)
    assert not np.array_equal(first.points, other.points)


def test_uniform_sampler_stays_in_box():
    sampler = SamplerFactory.create({"sampler": "uniform", "lo": [0.0, 1.0], "hi": [1.0, 2.0], "count": 50})
    points = sampler.sample(population_rng(0, 0)).points
    assert points.shape == (50, 2)
    assert np.all(points >= [0.0, 1.0]) and np.all(points <= [1.0, 2.0])


def test_explicit_sampler_reads_weights():
    measure = SamplerFactory.create({"sampler": "explicit",
                                     "atoms": [[0.0, 0.0, 0.25], [1.0, 0.0, 0.75]]}).sample()
    assert_allclose(measure.weights, [0.25, 0.75])
    with pytest.raises(ConfigError, match="Invalid explicit measure"):
        SamplerFactory.create({"sampler": "explicit", "atoms": [[0.0, 0.5], [1.0, 0.4]]}).sample()


def test_unknown_sampler_and_bad_parameters():
    with pytest.raises(ConfigError, match="Unsupported sampler"):
        SamplerFactory.create({"sampler": "sobol"})
    with pytest.raises(ConfigError, match="Bad parameters"):
        SamplerFactory.create({"sampler": "grid", "lo": [0.0]})
