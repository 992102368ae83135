"""Tests for Mittag-Leffler and Gamma evaluation."""
import math

import numpy as np
import pytest
from scipy import integrate, special

from solver import mlf
from solver.errors import DomainError, RangeError
from solver.fracops import FractionalOrder


def test_alpha_one_is_exponential():
    x = np.linspace(-10.0, 10.0, 101)
    np.testing.assert_allclose(mlf.mlf_array(1.0, 1.0, x), np.exp(x), rtol=1e-12)


def test_alpha_two_is_cosine():
    x = np.linspace(0.0, 10.0, 51)
    np.testing.assert_allclose(mlf.mlf_array(2.0, 1.0, -x ** 2), np.cos(x), rtol=0, atol=1e-10)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 1.0, 1.5, 2.0])
@pytest.mark.parametrize("beta", [0.2, 0.7, 1.0, 1.6, 2.0])
def test_value_at_zero(alpha, beta):
    assert mlf.mlf_eval(mlf.MlfParams(alpha, beta), 0.0) == pytest.approx(1.0 / math.gamma(beta), abs=1e-13)


@pytest.mark.parametrize("x", [0.1, 1.0, 2.5, 5.0, 20.0, 49.0, 60.0, 400.0, 1.0e4])
def test_half_order_matches_scaled_complementary_error_function(x):
    # E_{1/2,1}(-x) = exp(x^2) erfc(x) covers the series, contour and asymptotic regimes
    assert mlf.mlf_eval(mlf.MlfParams(0.5, 1.0), -x) == pytest.approx(special.erfcx(x), rel=1e-9)


@pytest.mark.parametrize("z", [-0.5, -2.0, -6.0, -15.0])
def test_agrees_with_extended_precision_series(z):
    value = mlf.mlf_eval(mlf.MlfParams(0.7, 1.2), z)
    assert value == pytest.approx(mlf.mlf_reference(0.7, 1.2, z, terms=400, digits=80), rel=1e-9)


def test_recurrence_between_beta_levels():
    # E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z)
    alpha, beta, z = 0.6, 0.9, -8.0
    lhs = mlf.mlf_eval(mlf.MlfParams(alpha, beta), z)
    rhs = 1.0 / math.gamma(beta) + z * mlf.mlf_eval(mlf.MlfParams(alpha, alpha + beta), z)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_kernel_at_zero_lag():
    order = FractionalOrder(0.4)
    assert mlf.mlf_kernel(order, 0.0) == pytest.approx(1.0 / math.gamma(0.4), rel=1e-14)


def test_kernel_decreases_with_lag():
    order = FractionalOrder(0.6)
    values = [mlf.mlf_kernel(order, s) for s in (0.0, 0.1, 0.5, 1.0, 4.0)]
    assert all(b < a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("alpha,beta", [(0.0, 1.0), (-0.5, 1.0), (0.5, 0.0), (float("nan"), 1.0)])
def test_rejects_invalid_parameters(alpha, beta):
    with pytest.raises(DomainError):
        mlf.MlfParams(alpha, beta)


def test_rejects_large_positive_argument():
    with pytest.raises(RangeError):
        mlf.mlf_eval(mlf.MlfParams(0.5, 1.0), 25.0)


def test_rejects_argument_beyond_certified_range():
    with pytest.raises(RangeError):
        mlf.mlf_eval(mlf.MlfParams(0.5, 1.0), -1.0e13)


def test_gamma_domain():
    assert mlf.gamma(5.0) == pytest.approx(24.0)
    with pytest.raises(DomainError):
        mlf.gamma(-1.0)
    with pytest.raises(RangeError):
        mlf.gamma(200.0)


def test_kernel_rejects_negative_lag():
    with pytest.raises(DomainError):
        mlf.mlf_kernel(FractionalOrder(0.5), -1.0)


@pytest.mark.parametrize("alpha", [0.9999, 1.0 - 1.0e-6])
@pytest.mark.parametrize("beta_is_alpha", [False, True])
@pytest.mark.parametrize("z", [-3.5, -10.0, -20.0, -35.0, -49.0])
def test_contour_resolves_pole_as_alpha_approaches_one(alpha, beta_is_alpha, z):
    beta = alpha if beta_is_alpha else 1.0
    value = mlf.mlf_eval(mlf.MlfParams(alpha, beta), z)
    assert value == pytest.approx(mlf.mlf_reference(alpha, beta, z, terms=400, digits=80), rel=1e-10)


def test_nearly_exponential_at_moderate_argument():
    value = mlf.mlf_eval(mlf.MlfParams(1.0 - 1.0e-6, 1.0), -3.5)
    assert value == pytest.approx(math.exp(-3.5), rel=1e-4)


def test_extended_series_keeps_gamma_argument_precision():
    # E_{1,b}(-x) = int_0^1 exp(-x t) (1 - t)^(b - 2) dt / Gamma(b - 1) for b > 1
    integral, _ = integrate.quad(lambda t: math.exp(-50.0 * t), 0.0, 1.0, weight="alg", wvar=(0.0, -0.4))
    expected = integral / math.gamma(0.6)
    assert mlf.mlf_eval(mlf.MlfParams(1.0, 1.6), -50.0) == pytest.approx(expected, rel=1e-10)


def test_reference_series_value():
    assert mlf.mlf_reference(0.7, 1.2, -15.0, terms=400, digits=80) == pytest.approx(0.0383387, rel=1e-5)


@pytest.mark.parametrize("alpha", [0.25, 0.6, 0.95, 0.9999, 1.0])
def test_two_parameter_kernel_function_is_positive_bounded_and_monotone(alpha):
    z = np.linspace(-60.0, 0.0, 1000)
    values = mlf.mlf_array(alpha, alpha, z)
    assert np.all(values > 0)
    assert np.all(values <= 1.0 / math.gamma(alpha) * (1.0 + 1e-12))
    assert np.all(np.diff(values) >= 0)


def test_kernel_vanishes_at_long_lag():
    # gamma = 1 at alpha = 1/2, and E_{1/2,1/2}(-x) = 1/sqrt(pi) - x erfcx(x)
    x = math.sqrt(1.0e3)
    expected = 1.0 / math.sqrt(math.pi) - x * special.erfcx(x)
    value = mlf.mlf_kernel(FractionalOrder(0.5), 1.0e3)
    assert value == pytest.approx(expected, rel=1e-8)
    assert 0 < value < 1e-3
