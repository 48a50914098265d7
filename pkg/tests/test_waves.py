import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conescatter import waves
from conescatter.errors import (DomainError, ForwardSingularity, InvalidParams,
                                NearForwardSingularity, RegimeViolation, TruncationWarning)
from conescatter.model import ScatteringParams, derive
from conescatter.waves import PartialWaveConfig

ETA = math.sqrt(2.0)


def converged_cfg(p, r, dispersion="exact"):
    lo, hi = waves.suggest_l_range(p, r, dispersion)
    return PartialWaveConfig(l_max=hi, l_min=lo, dispersion=dispersion)


def test_config_validation():
    with pytest.raises(InvalidParams):
        PartialWaveConfig(l_max=0)
    with pytest.raises(InvalidParams):
        PartialWaveConfig(l_max=5, l_min=6)
    with pytest.raises(InvalidParams):
        PartialWaveConfig(dispersion="cubic")
    with pytest.raises(InvalidParams):
        PartialWaveConfig(quad_tol=0)


def test_channel_range_clamps_evanescent():
    p = ScatteringParams(varpi=0.5)
    ls = waves.channel_range(p, PartialWaveConfig(l_max=4))
    assert ls[0] == -2 and ls[-1] == 4
    assert waves.channel_range(ScatteringParams(), PartialWaveConfig(l_max=3))[0] == -4


def test_radial_solution():
    p = ScatteringParams()
    assert waves.radial_solution(p, 0, 0.0) == 1.0
    assert waves.radial_solution(p, 2, 0.0) == 0.0
    assert waves.radial_solution(p, 0, 1.0 / ETA, A=2.0) == pytest.approx(2 * 0.7651976865579666)
    np.testing.assert_allclose(waves.radial_solution(p, 1, np.array([1.0, 2.0]) / ETA),
                               [0.44005058574493351596, 0.5767248077568734], rtol=1e-13)


@pytest.mark.parametrize("phi", [0.0, 0.7, 2.0, math.pi, 5.0])
def test_flat_space_plane_wave(phi):
    p = ScatteringParams()
    r = 80.0 / ETA
    field = waves.partial_wave_field(p, r, phi, PartialWaveConfig(l_max=120))
    plane = cmath.exp(0.5j * phi) * cmath.exp(1j * ETA * r * math.cos(phi))
    assert abs(field - plane) <= 0.02


def test_flat_space_example_at_origin_direction():
    p = ScatteringParams()
    assert abs(waves.partial_wave_field(p, 80.0 / ETA, 0.0, PartialWaveConfig(l_max=120))
               - cmath.exp(80j)) < 1e-10


def test_cauchy_convergence_in_l_max():
    p = ScatteringParams(q=1.2)
    r = 50.0 / ETA
    vals = [waves.partial_wave_sum(p, r, 1.0, PartialWaveConfig(l_max=L)) for L in (100, 200)]
    assert abs(vals[1] - vals[0]) < 1e-12


def test_truncation_warning():
    with pytest.warns(TruncationWarning):
        waves.partial_wave_sum(ScatteringParams(), 50.0, 0.3, PartialWaveConfig(l_max=10))


def test_partial_wave_domain():
    p = ScatteringParams(varpi=0.01, q=1.2)
    with pytest.raises(DomainError):
        waves.partial_wave_sum(p, 0.0, 0.3)
    with pytest.raises(DomainError):
        waves.partial_wave_sum(p, 200.0, 0.3)


def test_partial_wave_broadcasts():
    p = ScatteringParams(q=1.2)
    cfg = PartialWaveConfig(l_max=60)
    r = np.array([5.0, 10.0])
    th = np.array([[0.1], [1.0], [2.0]])
    grid = waves.partial_wave_sum(p, r, th, cfg)
    assert grid.shape == (3, 2)
    assert grid[2, 1] == pytest.approx(waves.partial_wave_sum(p, 10.0, 2.0, cfg), abs=1e-14)


def test_wick_prefactor():
    assert waves.wick_prefactor(0.0, 1) == pytest.approx(1.0)
    assert waves.wick_prefactor(0.0, -1) == pytest.approx(-1.0)
    assert waves.wick_prefactor(1.0, 1) == pytest.approx(cmath.exp(0.5j))
    assert abs(waves.wick_prefactor(1.0, 1, verbatim=True) - waves.wick_prefactor(1.0, 1)) > 0.1


# incident wave

@given(st.floats(0.0, 100.0), st.floats(-3.0, 3.0))
def test_incident_flat(r, theta):
    p = ScatteringParams()
    assert abs(waves.incident_wave(p, r, theta) - cmath.exp(-1j * ETA * r * math.cos(theta))) < 1e-12


def test_incident_images():
    assert waves._images(math.pi, 1.5) == [(0, 1.0), (1, 1.0)]
    assert waves._images(0.0, 1.0) == [(0, 1.0)]
    assert waves._images(math.pi, 1.0) == [(0, 0.5), (1, 0.5)]


@given(st.floats(1.0, 1.9), st.floats(0.0, 2 * math.pi), st.floats(1.0, 50.0))
def test_incident_image_count_bound(q, theta, r):
    # at most two images, each of modulus 1/q
    p = ScatteringParams(q=q)
    assert abs(waves.incident_wave(p, r, theta)) <= 2.0 / q + 1e-12


def test_incident_requires_small_frequency():
    with pytest.raises(RegimeViolation):
        waves.incident_wave(ScatteringParams(varpi=0.1), 1.0, 0.0)


@pytest.mark.parametrize("q,s", [(1.0, 1), (1.0, -1), (1.2, 1), (1.2, -1)])
def test_field_matches_incident_away_from_forward(q, s):
    # at q = 1 there is no scattered wave; at q > 1 the static field minus the
    # incident wave decays like r**-1/2
    p = ScatteringParams(q=q, s=s)
    r = 160.0 / ETA
    cfg = converged_cfg(p, r)
    for th in (0.9, 2.0):
        diff = abs(waves.partial_wave_sum(p, r, th, cfg) - waves.incident_wave(p, r, th))
        bound = 1e-10 if q == 1 else 2.0 * abs(waves.amplitude_value(p, th)) / math.sqrt(r)
        assert diff <= bound


# scattered wave and amplitudes

def test_forward_distance():
    d, sign = waves.forward_distance(1.2 * math.pi - 0.01, 1.2)
    assert d == pytest.approx(0.01) and sign == 1
    d, sign = waves.forward_distance(-1.2 * math.pi, 1.2)
    assert d == pytest.approx(0.0, abs=1e-14) and sign == -1
    assert waves.forward_distance(1.2 * math.pi + 2 * math.pi, 1.2)[0] < 1e-12


def test_scattered_vanishes_in_flat_space():
    p = ScatteringParams()
    for dt in (0.5, 2.0, 4.0):
        assert abs(waves.scattered_quadrature(p, 100.0, dt)) < 1e-12


@pytest.mark.parametrize("dt", [1.0, 2.0, math.pi, 4.5])
def test_scattered_quadrature_approaches_closed_form(dt):
    p = ScatteringParams(q=1.2)
    r = 400.0 / ETA
    sv = waves.scattered_quadrature(p, r, dt)
    ref = cmath.sqrt(1j / r) * waves.amplitude_value(p, dt) * cmath.exp(400j)
    assert abs(sv - ref) <= 0.03 * abs(ref)


def test_scattered_forward_singularity():
    p = ScatteringParams(q=1.2)
    with pytest.raises(ForwardSingularity):
        waves.scattered_quadrature(p, 10.0, 1.2 * math.pi)
    with pytest.raises(InvalidParams):
        waves.scattered_quadrature(p, 10.0, 1.0, order="y4")
    assert np.isfinite(waves.scattered_quadrature(p, 10.0, 1.2 * math.pi, order="y2"))


def test_amplitude_example_backward():
    p = ScatteringParams(q=1.2)
    f = waves.amplitude(p, 10.0, math.pi).f
    # sin(pi/10) / (1 - cos(pi/5)) = (1 + sqrt 5)/2
    expected = -(1 + math.sqrt(5)) / math.sqrt(2 * math.pi * ETA)
    assert abs(f - expected) <= 1e-14


@given(st.floats(0.0, 2 * math.pi), st.sampled_from([1, -1]), st.floats(0.0, 0.05))
def test_amplitude_vanishes_without_cone(theta, s, varpi):
    p = ScatteringParams(varpi=varpi, s=s)
    assert waves.amplitude(p, 10.0, theta).f == 0


@given(st.floats(1.05, 1.95), st.floats(0.0, 2 * math.pi), st.floats(0.0, 0.05))
def test_spin_flip_negates_amplitude(q, theta, varpi):
    p = ScatteringParams(varpi=varpi, q=q, s=1)
    flip = ScatteringParams(varpi=varpi, q=q, s=-1)
    dt = theta + 2 * 5.0 * derive(p).omega_eff
    if waves.forward_distance(dt, q)[0] < 0.01:
        return
    assert waves.amplitude(p, 5.0, theta).f == -waves.amplitude(flip, 5.0, theta).f


@given(st.floats(1.05, 1.95), st.floats(0.05, math.pi - 0.05))
def test_cross_section_parity(q, theta):
    p = ScatteringParams(q=q)
    if waves.forward_distance(theta, q)[0] < 0.01:
        return
    a = waves.amplitude(p, 1.0, theta).dsigma
    b = waves.amplitude(p, 1.0, 2 * math.pi - theta).dsigma
    assert a == pytest.approx(b, rel=1e-12)


def test_rotation_shifts_pattern_and_rescales():
    p0 = ScatteringParams(q=1.2)
    p = ScatteringParams(varpi=0.01, q=1.2)
    d = derive(p)
    r = 20.0
    th = 1.0
    rec = waves.amplitude(p, r, th)
    assert rec.delta_theta == pytest.approx(th + 2 * r * d.omega_eff)
    f0 = waves.amplitude(p0, r, rec.delta_theta).f
    assert rec.f == pytest.approx(f0 / math.sqrt(d.dispersion_factor), rel=1e-14)


def test_near_forward_guard():
    p = ScatteringParams(q=1.2)
    with pytest.raises(NearForwardSingularity):
        waves.amplitude(p, 1.0, 1.2 * math.pi + 5e-4)
    waves.amplitude(p, 1.0, 1.2 * math.pi + 2e-3)
    # the guard is measured modulo 2 pi
    with pytest.raises(NearForwardSingularity):
        waves.amplitude(p, 1.0, 1.2 * math.pi - 2 * math.pi)


def test_forward_amplitude_example():
    p = ScatteringParams(q=1.5)
    f = waves.amplitude_forward(p, 1)
    body = -math.sin(math.pi / 4) + (1j / 6) * cmath.exp(-0.25j * math.pi)
    assert abs(f - body / math.sqrt(2 * math.pi * ETA)) < 1e-14


@given(st.floats(1.05, 1.95), st.sampled_from([1, -1]))
def test_forward_amplitude_spins_differ(q, sign):
    a = waves.amplitude_forward(ScatteringParams(q=q, s=1), sign)
    b = waves.amplitude_forward(ScatteringParams(q=q, s=-1), sign)
    assert abs(a + b) > 1e-6 * abs(a)


@pytest.mark.parametrize("q", [1.0, 2.0, 2.5])
def test_forward_amplitude_domain(q):
    with pytest.raises(DomainError):
        waves.amplitude_forward(ScatteringParams(q=q), 1)


def test_naive_amplitude():
    assert waves.naive_amplitude(ScatteringParams(), 1.0) == 0
    p = ScatteringParams(q=1.2)
    sums = [waves.naive_amplitude(p, 0.0, PartialWaveConfig(l_max=L)) for L in (20, 40, 80, 160)]
    assert abs(sums[3] - sums[2]) > 0.5 * abs(sums[1] - sums[0])
    arr = waves.naive_amplitude(p, np.array([0.0, 1.0]), PartialWaveConfig(l_max=20))
    assert arr[0] == pytest.approx(sums[0])


def test_sweep_routes_forward_angles():
    p = ScatteringParams(q=1.2)
    theta = np.array([1.0, 1.2 * math.pi, 2.0])
    sw = waves.cross_section_sweep(p, theta, 10.0)
    assert [rec.branch for rec in sw.records] == ["generic", "forward", "generic"]
    assert sw.records[1].f == pytest.approx(waves.amplitude_forward(p, 1))
    assert sw.dsigma.shape == (3,) and not sw.errors


def test_sweep_collects_errors():
    # q = 2 has no regular forward value
    sw = waves.cross_section_sweep(ScatteringParams(q=2.0), np.array([1.0, 0.0]), 10.0)
    assert sw.records[1] is None and 1 in sw.errors
    assert np.isnan(sw.dsigma[1]) and np.isfinite(sw.dsigma[0])


def test_sweep_flat_space_is_zero():
    sw = waves.cross_section_sweep(ScatteringParams(), np.linspace(0, 6, 7), 10.0)
    assert np.all(sw.dsigma == 0)


def test_sweep_radius_domain():
    with pytest.raises(DomainError):
        waves.cross_section_sweep(ScatteringParams(varpi=0.01, q=1.2), [1.0], 500.0)


def test_rotating_amplitudes_require_small_frequency():
    p = ScatteringParams(varpi=0.2, q=1.2)
    with pytest.raises(RegimeViolation):
        waves.amplitude(p, 1.0, 1.0)
    with pytest.raises(RegimeViolation):
        waves.amplitude_forward(p, 1)
    with pytest.raises(RegimeViolation):
        waves.scattered_quadrature(p, 1.0, 1.0)
    with pytest.raises(RegimeViolation):
        waves.cross_section_sweep(p, [1.0], 1.0)
