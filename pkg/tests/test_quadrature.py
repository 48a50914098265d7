import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conescatter.errors import QuadratureFailure
from conescatter.quadrature import gauss_kronrod, quad, quad_semi_infinite


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=23), st.floats(-2, 0), st.floats(0.1, 2))
def test_kronrod_exact_for_degree_22(coeffs, a, w):
    b = a + w
    poly = np.polynomial.Polynomial(coeffs)
    val, _ = gauss_kronrod(poly, a, b)
    ref = poly.integ()(b) - poly.integ()(a)
    assert abs(val - ref) <= 1e-12 * max(1.0, sum(abs(c) for c in coeffs) * 2 ** len(coeffs))


def test_gauss_estimate_vanishes_for_low_degree():
    _, err = gauss_kronrod(lambda x: x ** 13 - 2 * x ** 4, -1.0, 1.0)
    assert err < 1e-14


def test_adaptive_oscillatory_complex():
    res = quad(lambda x: np.exp(1j * 40 * x), 0.0, math.pi / 2, abs_tol=1e-13)
    ref = (np.exp(20j * math.pi) - 1) / 40j
    assert abs(res.value - ref) < 1e-12
    assert res.error < 1e-12
    assert res.n_eval > 15


def test_endpoint_singularity():
    res = quad(lambda x: 1 / np.sqrt(x), 0.0, 1.0, abs_tol=1e-9, rel_tol=1e-12)
    assert abs(res.value - 2.0) < 1e-8


def test_empty_interval():
    assert quad(np.sin, 1.0, 1.0).value == 0.0


def test_semi_infinite():
    res = quad_semi_infinite(lambda x: np.exp(-x), 0.0, 1.0)
    assert abs(res.value - 1.0) < 1e-11
    res = quad_semi_infinite(lambda x: np.exp(-x * x), 0.0, 0.5)
    assert abs(res.value - math.sqrt(math.pi) / 2) < 1e-11


def test_failures():
    with pytest.raises(QuadratureFailure):
        quad(np.sin, 0.0, math.inf)
    with pytest.raises(QuadratureFailure):
        quad(lambda x: np.sin(400 * x), 0.0, 10.0, abs_tol=1e-14, max_intervals=3)
    with pytest.raises(QuadratureFailure):
        quad(lambda x: np.full(x.shape, np.nan), 0.0, 1.0)
    with pytest.raises(QuadratureFailure):
        quad_semi_infinite(lambda x: 1.0 / (1.0 + x), 0.0, 1.0, max_panels=10)
