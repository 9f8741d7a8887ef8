import numpy as np
import pytest
from numpy.testing import assert_allclose

from mfgtime.congestion.speed_model_factory import SpeedModelFactory
from mfgtime.congestion.speed_models import ExponentialCongestion, SinusoidalLandscape, speed
from mfgtime.core.errors import ConfigError
from mfgtime.model.measures import EmpiricalMeasure
from mfgtime.transport.wasserstein import wasserstein_distance


def test_empty_crowd_moves_at_top_speed():
    model = ExponentialCongestion(0.2, 1.5, 0.1, a_self=1.0, a_cross=1.0)
    zero = EmpiricalMeasure.zero(2)
    assert_allclose(speed(zero, zero, np.array([[0.3, -0.2]]), model), [1.5])


def test_speed_stays_within_bounds_in_a_dense_crowd():
    model = ExponentialCongestion(0.2, 1.5, 0.5, a_self=2.0, a_cross=1.0)
    crowd = EmpiricalMeasure(np.zeros((4, 2)))
    values = model.speed(crowd, crowd, np.array([[0.0, 0.0], [0.5, 0.0], [3.0, 3.0]]))
    assert np.all(values >= 0.2) and np.all(values <= 1.5)
    assert values[0] < values[1] < values[2]
    assert_allclose(values[2], 1.5)


def test_flat_point_is_read_with_the_dimension_of_the_other_measure():
    model = ExponentialCongestion(0.2, 1.5, 0.3, a_self=1.0, a_cross=1.0)
    zero = EmpiricalMeasure.zero(2)
    other = EmpiricalMeasure.dirac([0.3, -0.2])
    values = model.speed(zero, other, [0.3, -0.2])
    assert values.shape == (1,)
    assert values[0] < 1.5
    assert model.speed(zero, zero, [0.3, -0.2]).shape == (1,)
    landscape = SinusoidalLandscape(1.0, 0.5)
    assert landscape.speed(zero, other, [0.3, -0.2]).shape == (1,)


def _crowds(rng):
    own = EmpiricalMeasure(rng.uniform(-0.5, 0.5, size=(6, 2)))
    other = EmpiricalMeasure(rng.uniform(-0.5, 0.5, size=(5, 2)))
    return own, other


def test_speed_is_lipschitz_in_space():
    rng = np.random.default_rng(3)
    model = ExponentialCongestion(0.2, 1.5, 0.3, a_self=1.0, a_cross=2.0)
    bound = model.lipschitz_x(2)
    for _ in range(20):
        own, other = _crowds(rng)
        x = rng.uniform(-0.8, 0.8, size=(50, 2))
        y = x + rng.normal(scale=1e-3, size=x.shape)
        change = np.abs(model.speed(own, other, x) - model.speed(own, other, y))
        assert np.all(change <= bound * np.linalg.norm(x - y, axis=1) * (1.0 + 1e-9))


def test_speed_is_lipschitz_in_w1_of_each_measure():
    rng = np.random.default_rng(4)
    model = ExponentialCongestion(0.2, 1.5, 0.3, a_self=1.0, a_cross=2.0)
    own_rate, other_rate = model.lipschitz_w1(2)
    assert own_rate > 0.0 and other_rate == pytest.approx(2.0 * own_rate)
    x = rng.uniform(-0.8, 0.8, size=(100, 2))
    for _ in range(10):
        own, other = _crowds(rng)
        moved = EmpiricalMeasure(own.points + rng.normal(scale=0.05, size=own.points.shape))
        change = np.abs(model.speed(own, other, x) - model.speed(moved, other, x))
        assert change.max() <= own_rate * wasserstein_distance(own, moved, 1) + 1e-12
        shifted = EmpiricalMeasure(other.points + rng.normal(scale=0.05, size=other.points.shape))
        change = np.abs(model.speed(own, other, x) - model.speed(own, shifted, x))
        assert change.max() <= other_rate * wasserstein_distance(other, shifted, 1) + 1e-12
    assert SinusoidalLandscape(1.0, 0.5).lipschitz_w1(2) == (0.0, 0.0)


def test_own_and_cross_sensitivities_act_separately():
    own = EmpiricalMeasure.dirac([0.0, 0.0])
    other = EmpiricalMeasure.dirac([1.0, 0.0])
    model = ExponentialCongestion(0.5, 1.0, 0.2, a_self=0.0, a_cross=1.0)
    at_own, at_other = model.speed(own, other, np.array([[0.0, 0.0], [1.0, 0.0]]))
    assert_allclose(at_own, 1.0, atol=1e-4)
    assert at_other < 1.0


def test_model_without_sensitivity_ignores_the_crowd():
    assert not ExponentialCongestion(0.5, 1.0, 0.2).depends_on_measures
    assert not ExponentialCongestion(1.0, 1.0, 0.2, a_self=3.0).depends_on_measures
    assert ExponentialCongestion(0.5, 1.0, 0.2, a_cross=1.0).depends_on_measures


def test_landscape_bounds_and_values():
    model = SinusoidalLandscape(1.0, 0.5, frequency=np.pi)
    assert_allclose([model.k_min, model.k_max], [0.5, 1.5])
    zero = EmpiricalMeasure.zero(2)
    assert_allclose(model.speed(zero, zero, np.array([[0.5, 0.5], [0.0, 0.3]])), [1.5, 1.0])
    assert_allclose(model.lipschitz_x(2), 0.5 * np.pi * np.sqrt(2.0))


def test_factory_and_validation():
    model = SpeedModelFactory.create({"type": "landscape", "base": 2.0, "amplitude": 0.5})
    assert model.as_config()["type"] == "landscape"
    with pytest.raises(ConfigError, match="K_max must be at least K_min"):
        ExponentialCongestion(1.0, 0.5, 0.1)
    with pytest.raises(ConfigError, match="K_min must be positive"):
        SinusoidalLandscape(1.0, 1.0)
    with pytest.raises(ConfigError, match="Unsupported speed model"):
        SpeedModelFactory.create({"type": "linear"})
