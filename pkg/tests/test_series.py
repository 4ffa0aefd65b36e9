import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shearlab.errors import NearZeroConstantTerm, NotUnitConstantTerm, NotZeroConstantTerm, OutsideDisc
from shearlab.series import (
    TruncatedSeries,
    binomial_series,
    differentiate,
    evaluate,
    exp_series,
    integrate,
    log_unit,
    mul,
    pow_alpha,
    reciprocal,
)


def unit_series(seed, order=64):
    """c0 = 1, c_k = u_k 2^-k with |u_k| <= 1; zero-free in the disc."""
    r = np.random.default_rng(seed)
    u = r.uniform(-1, 1, order) + 1j * r.uniform(-1, 1, order)
    u /= np.maximum(1.0, np.abs(u))
    return TruncatedSeries(np.concatenate([[1.0], u * 2.0 ** -np.arange(1, order + 1)]))


seeds = st.integers(0, 2**32 - 1)


# frozen oracles

def test_geometric_reciprocal():
    assert np.allclose(reciprocal(TruncatedSeries([1, -1], order=10)).coeffs, np.ones(11), atol=0)


def test_exp_of_z_is_inverse_factorials():
    e = exp_series(TruncatedSeries.identity(12))
    assert np.allclose(e.coeffs.real, [1 / math.factorial(k) for k in range(13)], rtol=1e-15, atol=0)


def test_log_of_one_plus_z():
    lg = log_unit(TruncatedSeries([1, 1], order=10))
    expected = [0] + [(-1) ** (k + 1) / k for k in range(1, 11)]
    assert np.allclose(lg.coeffs, expected, atol=1e-15)


def test_binomial_minus_two_gives_k_plus_one():
    assert np.array_equal(binomial_series(-2, 8).coeffs.real, np.arange(1, 10, dtype=float))


def test_binomial_half():
    c = binomial_series(0.5, 4).coeffs.real
    assert np.allclose(c, [1, -0.5, -0.125, -0.0625, -0.0390625], atol=1e-16)


def test_evaluate_truncated_derivative_series():
    s = TruncatedSeries(np.arange(1, 201))
    assert abs(evaluate(s, 0.5) - 4.0) < 1e-9


def test_evaluate_vectorized_shape():
    s = TruncatedSeries([1, 2, 3])
    z = np.array([[0, 0.5], [0.1j, -0.2]])
    assert evaluate(s, z).shape == (2, 2)
    assert evaluate(s, 0.5) == 1 + 1 + 0.75


def test_mul_truncates_to_smaller_order():
    a = TruncatedSeries([1, 1], order=5)
    b = TruncatedSeries([1, 1], order=3)
    assert mul(a, b).order == 3
    assert np.array_equal(mul(a, b).coeffs.real, [1, 2, 1, 0])


def test_operators():
    a = TruncatedSeries([1, 2], order=3)
    assert (a + 1).coeffs[0] == 2
    assert (1 - a).coeffs[1] == -2
    assert (2 * a).coeffs[1] == 4
    assert np.allclose((a / a).coeffs, [1, 0, 0, 0])
    assert a(0) == 1


def test_integrate_raises_order():
    a = TruncatedSeries([1, 2, 3])
    i = integrate(a)
    assert i.order == 3 and i.coeffs[0] == 0
    assert np.array_equal(differentiate(i).coeffs, a.coeffs)


def test_pow_alpha_edges():
    a = unit_series(1, 16)
    assert np.array_equal(pow_alpha(a, 0).coeffs, np.eye(1, 17)[0])
    assert np.max(np.abs(pow_alpha(a, 1).coeffs - a.coeffs)) < 1e-13


# errors

def test_errors():
    with pytest.raises(NearZeroConstantTerm):
        reciprocal(TruncatedSeries([1e-15, 1]))
    with pytest.raises(NotUnitConstantTerm):
        log_unit(TruncatedSeries([2, 1]))
    with pytest.raises(NotUnitConstantTerm):
        pow_alpha(TruncatedSeries([1 + 1e-9, 1]), 0.5)
    with pytest.raises(NotZeroConstantTerm):
        exp_series(TruncatedSeries([0.1, 1]))
    with pytest.raises(OutsideDisc):
        evaluate(TruncatedSeries([1]), 1.0)
    with pytest.raises(ValueError):
        TruncatedSeries([np.nan])
    with pytest.raises(ValueError):
        differentiate(TruncatedSeries([1]))


def test_immutable():
    a = TruncatedSeries([1, 2])
    with pytest.raises(ValueError):
        a.coeffs[0] = 3


# properties

@given(seeds)
def test_reciprocal_round_trip(seed):
    a = unit_series(seed)
    one = mul(a, reciprocal(a)).coeffs.copy()
    one[0] -= 1
    assert np.max(np.abs(one)) < 1e-10


@given(seeds)
def test_exp_log_branch(seed):
    a = unit_series(seed)
    assert np.max(np.abs(exp_series(log_unit(a)).coeffs - a.coeffs)) < 1e-10
    lg = log_unit(a)
    assert lg.coeffs[0] == 0


@given(seeds, st.floats(-2, 2), st.floats(-2, 2))
def test_pow_group_law(seed, al, be):
    a = unit_series(seed)
    lhs = pow_alpha(a, al + be)
    rhs = mul(pow_alpha(a, al), pow_alpha(a, be))
    assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-9


@given(seeds)
def test_differentiate_integrate_inverse(seed):
    a = unit_series(seed)
    assert np.max(np.abs(differentiate(integrate(a)).coeffs - a.coeffs)) < 1e-13


@given(seeds, st.floats(0, 0.9), st.floats(0, 2 * np.pi))
def test_mul_is_pointwise_product(seed, r, t):
    a, b = unit_series(seed, 48), unit_series(seed + 1, 48)
    z = r * np.exp(1j * t)
    assert abs(mul(a, b)(z) - a(z) * b(z)) < 1e-12


def test_numpy_scalars_defer_to_series_operators():
    a = TruncatedSeries([1, 0.5], order=4)
    for s in (np.float64(2.0), np.complex128(1j), np.int64(3)):
        assert isinstance(s * a, TruncatedSeries)
        assert isinstance(a * s, TruncatedSeries)
        np.testing.assert_allclose((s * a).coeffs, complex(s) * a.coeffs)
