import numpy as np
import pytest
from numpy.testing import assert_allclose

from mfgtime.model.measures import EmpiricalMeasure, as_points


def test_weights_default_to_uniform():
    measure = EmpiricalMeasure([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    assert_allclose(measure.weights, 0.25)
    assert_allclose(measure.mean(), [0.5, 0.5])


def test_weights_must_sum_to_one():
    with pytest.raises(ValueError, match="sum to 1"):
        EmpiricalMeasure([[0.0], [1.0]], [0.5, 0.6])
    measure = EmpiricalMeasure([[0.0], [1.0]], [1.0, 3.0], normalize=True)
    assert_allclose(measure.weights, [0.25, 0.75])


def test_negative_weights_are_rejected():
    with pytest.raises(ValueError):
        EmpiricalMeasure([[0.0], [1.0]], [1.5, -0.5])


def test_zero_measure_has_no_mass():
    zero = EmpiricalMeasure.zero(2)
    assert zero.is_zero
    assert zero.dim == 2
    assert zero.mass_in_ball(10.0) == 0.0


def test_mixture_rescales_weights():
    first = EmpiricalMeasure.dirac([0.0, 0.0])
    second = EmpiricalMeasure([[1.0, 0.0], [2.0, 0.0]])
    mixed = EmpiricalMeasure.mixture([first, second], [0.5, 0.5])
    assert mixed.n_atoms == 3
    assert_allclose(mixed.weights, [0.5, 0.25, 0.25])


def test_as_points_reads_one_dimensional_input():
    assert as_points([1.0, 2.0, 3.0]).shape == (3, 1)
    assert as_points([1.0, 2.0], dim=2).shape == (1, 2)
    with pytest.raises(ValueError):
        as_points(np.zeros((2, 3)), dim=2)


def test_mass_in_ball_and_support_radius():
    measure = EmpiricalMeasure([[3.0, 4.0], [0.0, 1.0]])
    assert_allclose(measure.support_radius(), 5.0)
    assert_allclose(measure.mass_in_ball(1.0), 0.5)
