import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conescatter import _backend, specfun
from conescatter.errors import DomainError, InvalidParams, NonConvergence, QuadratureFailure
from conescatter.specfun import SeriesConfig, bessel_i, bessel_i_integral, bessel_j, bessel_j_array
from conescatter.verify import oracle_bessel_i_series, oracle_bessel_series

# 40-digit multiprecision reference values, frozen
J_FROZEN = [
    (1.0, 1.0, 0.44005058574493351596),
    (0.1, 2.0, 0.30004715009213750464),
    (1.7, 30.0, 0.016771672441977255824),
    (3.2, 0.001, 3.5239324837512590830e-12),
    (0.0, 50.0, 0.055812327669251815005),
    (250.3, 200.0, 2.0281528467929083624e-12),
    (100.7, 300.0, 0.024824533998084024765),
    (600.25, 400.0, 4.0546427713727584220e-59),
]
I_FROZEN = [
    (0.0, 1.0, 1.26606587775200833560),
    (1.3, 2.0, 1.29081921513588002156),
    (3.2, 50.0, 2.6444519342157046177e20),
]


@pytest.mark.parametrize("nu,x,ref", J_FROZEN)
def test_bessel_j_frozen(nu, x, ref):
    got = bessel_j(nu, x)
    assert abs(got - ref) <= 1e-13 * max(1.0, abs(ref))
    assert abs(got - ref) <= 1e-11 * abs(ref)


@pytest.mark.parametrize("nu,x,ref", I_FROZEN)
def test_bessel_i_frozen(nu, x, ref):
    assert abs(bessel_i(nu, x) - ref) <= 1e-13 * abs(ref)


def test_trivial_values():
    assert bessel_j(0.0, 0.0) == 1.0
    assert bessel_j(2.5, 0.0) == 0.0
    assert bessel_i(0.0, 0.0) == 1.0
    assert abs(bessel_j(0.5, math.pi)) < 1e-15


@given(st.floats(1e-3, 60.0))
def test_half_order_closed_form(x):
    assert abs(bessel_j(0.5, x) - math.sqrt(2 / (math.pi * x)) * math.sin(x)) < 1e-13


@given(st.sampled_from([0.0, 0.25, 0.5, 1.0, 1.7, 3.2]) | st.floats(0.0, 3.2),
       st.floats(1e-3, 50.0))
def test_bessel_j_matches_series_oracle(nu, x):
    assert abs(bessel_j(nu, x) - oracle_bessel_series(nu, x)) <= 1e-10


@given(st.floats(0.0, 3.2), st.floats(1e-3, 50.0))
def test_bessel_i_matches_series_oracle(nu, x):
    ref = oracle_bessel_i_series(nu, x)
    assert abs(bessel_i(nu, x) - ref) <= 1e-10 * max(1.0, ref)


@given(st.sampled_from([0.0, 0.5, 1.7]) | st.floats(0.0, 3.2), st.floats(1e-6, 10.0))
def test_wick_identity(nu, x):
    rhs = cmath.exp(0.5j * nu * math.pi) * bessel_i(nu, x)
    assert abs(specfun.bessel_j_imag(nu, x) - rhs) <= 1e-10


@given(st.floats(0.0, 1.0), st.floats(40.0, 400.0))
def test_large_argument_leading_order(nu, x):
    lead = math.sqrt(2 / (math.pi * x)) * math.cos(x - nu * math.pi / 2 - math.pi / 4)
    assert abs(bessel_j(nu, x) - lead) <= 0.05 / x


@given(st.floats(1.0, 700.0), st.floats(0.5, 900.0))
def test_three_term_recurrence(nu, x):
    lhs = bessel_j(nu - 1, x) + bessel_j(nu + 1, x)
    rhs = 2 * nu / x * bessel_j(nu, x)
    scale = max(abs(bessel_j(nu - 1, x)), abs(bessel_j(nu + 1, x)), 1e-300)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, 2 * nu / x) + 1e-10 * scale


def test_array_matches_scalar():
    rng = np.random.default_rng(0)
    nu = rng.uniform(0, 200, 500)
    x = rng.uniform(0, 300, 500)
    arr = bessel_j_array(nu, x)
    assert arr.shape == (500,)
    for i in range(0, 500, 37):
        assert abs(arr[i] - bessel_j(nu[i], x[i])) <= 1e-13
    grid = bessel_j_array(np.arange(4)[:, None], np.linspace(0.1, 5, 3)[None, :])
    assert grid.shape == (4, 3)


@pytest.mark.parametrize("nu,x,regime", [
    (0.0, 0.0, "zero"), (1.0, 1.0, "series"), (0.0, 50.0, "hankel"),
    (250.3, 200.0, "recurrence"), (100.7, 300.0, "recurrence"),
])
def test_regime_selection(nu, x, regime):
    assert _backend.kernels.regime_j(nu, x) == regime


def test_domain_errors():
    with pytest.raises(DomainError):
        bessel_j(-0.5, 1.0)
    with pytest.raises(DomainError):
        bessel_j(1.0, -1.0)
    with pytest.raises(DomainError):
        bessel_i(1.0, math.inf)
    with pytest.raises(DomainError):
        bessel_j_array([1.0, -1.0], 1.0)


def test_nonconvergence():
    with pytest.raises(NonConvergence):
        bessel_j(300000.0, 250000.0)
    with pytest.raises(NonConvergence):
        bessel_i(1.3, 1.0, SeriesConfig(max_terms=1))


def test_series_config_validation():
    with pytest.raises(InvalidParams):
        SeriesConfig(abs_tol=0.0)
    with pytest.raises(InvalidParams):
        SeriesConfig(max_terms=0)


@given(st.floats(0.05, 170.0))
def test_gamma_relative_accuracy(x):
    assert abs(specfun.gamma(x) / math.gamma(x) - 1) <= 1e-13


@given(st.floats(0.05, 1e4))
def test_lgamma(x):
    ref = math.lgamma(x)
    assert abs(specfun.lgamma(x) - ref) <= 1e-13 * max(1.0, abs(ref))


def test_gamma_reflection_and_poles():
    assert abs(specfun.gamma(-0.5) + 2 * math.sqrt(math.pi)) < 1e-13
    assert math.isnan(specfun.gamma(-2.0))


def test_integral_representation_examples():
    assert abs(bessel_i_integral(0.0, 1.0) - 1.2660658777520084) <= 1e-8
    assert abs(bessel_i_integral(3.0, 0.0)) <= 1e-12
    assert abs(bessel_i_integral(1.3, 2.0) - 1.29081921513588002156) <= 1e-8


@given(st.floats(0.0, 3.0), st.floats(1e-3, 5.0))
def test_integral_representation_matches_series(eps, z):
    assert abs(bessel_i_integral(eps, z) - bessel_i(eps, z)) <= 1e-8


def test_integral_representation_complex_and_rejected():
    z = 2.0 + 1.5j
    ref = cmath.exp(-0.5j * math.pi * 0.7) * complex(
        __import__("mpmath").besselj(0.7, 1j * z))
    assert abs(bessel_i_integral(0.7, z) - ref) <= 1e-9
    with pytest.raises(QuadratureFailure):
        bessel_i_integral(0.7, -3j)
    with pytest.raises(QuadratureFailure):
        bessel_i_integral(0.7, -1.0)


def test_backend_name():
    assert specfun.backend_name() in ("cython", "python")
