"""Partial-wave field, incident and scattered waves, scattering amplitudes.

Angles: ``phi`` is the polar angle of the observation point, ``theta =
phi + pi`` the angle measured from the forward direction of the sums, and
``delta_theta = theta + 2 r omega_eff`` the rotation-shifted angle on which
the amplitude depends.

The field factorises as ``field = P(phi) * S(r, theta)`` with the spinor
phase ``P = exp(i(phi/2 + (1 - s) pi/2))`` and the reduced sum

.. math::

    S(r, \\vartheta) = \\sum_l e^{il\\vartheta} e^{ir\\delta\\eta_l}
        e^{-i\\epsilon_l\\pi/2} J_{\\epsilon_l}(\\eta_l r),
    \\qquad \\epsilon_l = q|l + \\beta_q|.

Incident and scattered waves are expressed in the same reduced convention.
"""
from dataclasses import dataclass, field as dc_field
import cmath
import math
import warnings

import numpy as np

from . import model
from .errors import (
    ConeScatterError,
    DomainError,
    ForwardSingularity,
    InvalidParams,
    NearForwardSingularity,
    TruncationWarning,
)
from .quadrature import quad
from .specfun import SeriesConfig, bessel_j, bessel_j_array

__all__ = [
    "EPS_ANG",
    "PartialWaveConfig",
    "FieldSample",
    "AmplitudeRecord",
    "AngularSweep",
    "channel_range",
    "suggest_l_range",
    "radial_solution",
    "wick_prefactor",
    "partial_wave_sum",
    "partial_wave_field",
    "incident_wave",
    "scattered_quadrature",
    "forward_distance",
    "amplitude",
    "amplitude_value",
    "amplitude_forward",
    "naive_amplitude",
    "cross_section_sweep",
]

#: half-width (rad) of the guard band around the forward directions +-q pi
EPS_ANG = 1e-3
# contour-rotated Gaussian variable is integrated to this many widths
_U_MAX = 12.0
_ROT = cmath.exp(0.25j * math.pi)
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PartialWaveConfig:
    """Truncation and tolerance settings.

    Attributes
    ----------
    l_max : int
        Largest retained channel.
    l_min : int or None
        Smallest retained channel; ``-(l_max + 1)`` when None. Always clamped
        at the evanescent boundary.
    series_tol : float
        Absolute tolerance for Bessel evaluations.
    quad_tol : float
        Relative tolerance for the scattered-wave quadrature.
    eta_r_min : float
        Smallest ``eta * r`` at which asymptotic comparisons are meaningful.
    truncation_tol : float
        Largest edge-channel magnitude tolerated without a warning.
    dispersion : {"exact", "linear"}
        Channel wavenumber ``sqrt(eta**2 + 2 m varpi (l + 1/2))`` or its
        first-order form ``eta + omega_eff (l + 1/2)``.
    """

    l_max: int = 30
    l_min: int | None = None
    series_tol: float = 1e-14
    quad_tol: float = 1e-10
    eta_r_min: float = 50.0
    truncation_tol: float = 1e-10
    dispersion: str = "exact"

    def __post_init__(self):
        if int(self.l_max) != self.l_max or self.l_max < 1:
            raise InvalidParams("l_max must be an integer >= 1, got %r" % self.l_max)
        if self.l_min is not None and (int(self.l_min) != self.l_min or self.l_min > self.l_max):
            raise InvalidParams("l_min must be an integer <= l_max, got %r" % self.l_min)
        for name in ("series_tol", "quad_tol", "eta_r_min", "truncation_tol"):
            if not getattr(self, name) > 0:
                raise InvalidParams("%s must be > 0" % name)
        if self.dispersion not in ("exact", "linear"):
            raise InvalidParams("dispersion must be 'exact' or 'linear'")

    @property
    def series(self):
        return SeriesConfig(abs_tol=self.series_tol)


@dataclass(frozen=True)
class FieldSample:
    """Field value at one point (``phi`` in [0, 2 pi))."""

    r: float
    phi: float
    value: complex


@dataclass(frozen=True)
class AmplitudeRecord:
    """Scattering amplitude at one observation angle.

    ``branch`` is ``"generic"`` for the closed form valid away from the
    forward directions and ``"forward"`` for the regularised value there.
    """

    theta: float
    delta_theta: float
    f: complex
    dsigma: float
    branch: str = "generic"


@dataclass(frozen=True)
class AngularSweep:
    """Amplitudes over a grid of angles at fixed radius.

    ``records[i]`` is None when angle ``i`` failed; the reason is in
    ``errors[i]``.
    """

    theta: np.ndarray
    r: float
    records: tuple
    errors: dict = dc_field(default_factory=dict)

    @property
    def dsigma(self):
        return np.array([np.nan if rec is None else rec.dsigma for rec in self.records])

    @property
    def f(self):
        return np.array([np.nan if rec is None else rec.f for rec in self.records],
                        dtype=complex)


# ---------------------------------------------------------------------------
# channels

def _eta_channels(p, d, l, dispersion):
    if dispersion == "linear":
        model.check_small_frequency(p)
        el = d.eta + d.omega_eff * (l + 0.5)
        return el, el - d.eta
    return model.eta_l(p, l, d), model.delta_eta_exact(p, l, d)


def _l_floor(p, d, dispersion):
    """Smallest propagating channel for the chosen dispersion (None if unbounded)."""
    if p.varpi == 0:
        return None
    if dispersion == "linear":
        return math.floor(-d.eta / d.omega_eff - 0.5) + 1
    return model.evanescent_l_min(p)


def channel_range(p, cfg=PartialWaveConfig(), d=None):
    """Retained channels ``l_min..l_max`` after the evanescent clamp."""
    d = model.derive(p) if d is None else d
    lo = -(cfg.l_max + 1) if cfg.l_min is None else cfg.l_min
    floor = _l_floor(p, d, cfg.dispersion)
    if floor is not None:
        lo = max(lo, floor)
    if lo > cfg.l_max:
        raise DomainError("no propagating channels in [%d, %d]" % (lo, cfg.l_max))
    return np.arange(lo, cfg.l_max + 1)


def suggest_l_range(p, r, dispersion="exact", d=None):
    """Channel range for which the partial-wave sum converges at radius ``r``.

    Keeps every channel whose Bessel order does not yet exceed its argument by
    ``8 x**(1/3) + 10`` (beyond that ``J`` is below ~1e-15).
    """
    d = model.derive(p) if d is None else d
    floor = _l_floor(p, d, dispersion)

    def cut(sign):
        n = 64
        while True:
            l = sign * np.arange(n) + (0 if sign > 0 else -1)
            if floor is not None and sign < 0:
                l = l[l >= floor]
                if l.size == 0:
                    return floor
            el, _ = _eta_channels(p, d, l.astype(float), dispersion)
            x = el * r
            order = p.q * np.abs(l + d.beta_q)
            ok = order >= x + 8.0 * np.cbrt(x) + 10.0
            if ok.any():
                return int(l[np.argmax(ok)])
            if floor is not None and sign < 0 and l[-1] == floor:
                return floor
            if n > 10_000_000:
                raise DomainError("partial-wave sum does not converge at r = %g" % r)
            n *= 4

    return cut(-1), cut(+1)


def radial_solution(p, l, r, A=1.0, cfg=PartialWaveConfig(), d=None):
    """Regular radial solution ``A J_{q|nu|}(eta_l r)``.

    Raises
    ------
    EvanescentMode
        If channel ``l`` does not propagate.
    """
    d = model.derive(p) if d is None else d
    el, _ = _eta_channels(p, d, np.asarray(l, dtype=float), cfg.dispersion)
    order = p.q * abs(l + d.beta_q)
    r = np.asarray(r, dtype=float)
    if r.ndim == 0:
        return A * bessel_j(order, float(el) * float(r), cfg.series)
    return A * bessel_j_array(order, el * r, cfg.series)


def wick_prefactor(phi, s, verbatim=False):
    """Spinor phase relating the field to the reduced sum.

    ``exp(i(phi/2 + (1 - s) pi/2))``. With ``verbatim=True`` returns
    ``exp(i (phi + 1 - s) pi/2)``, which differs from the former by a
    ``phi``-dependent phase and does not reproduce the field.
    """
    phi = np.asarray(phi, dtype=float)
    if verbatim:
        return np.exp(0.5j * math.pi * (phi + (1 - s)))
    return np.exp(1j * (0.5 * phi + 0.5 * math.pi * (1 - s)))


def _bessel_table(p, d, cfg, ls, r_unique):
    el, deta = _eta_channels(p, d, ls.astype(float), cfg.dispersion)
    order = p.q * np.abs(ls + d.beta_q)
    jv = bessel_j_array(order[:, None], el[:, None] * r_unique[None, :], cfg.series)
    return order, deta, jv


def _check_radius(d, r):
    if np.any(r <= 0) or not np.all(np.isfinite(r)):
        raise DomainError("r must be positive and finite")
    if np.any(r >= d.r_max):
        raise DomainError("r must stay inside the light cylinder r < %g" % d.r_max)


def partial_wave_sum(p, r, theta, cfg=PartialWaveConfig(), d=None):
    """Reduced partial-wave sum ``S(r, theta)`` (broadcast over ``r`` and ``theta``).

    Warns
    -----
    TruncationWarning
        If an edge channel still contributes more than ``cfg.truncation_tol``.
    """
    d = model.derive(p) if d is None else d
    r_b, th_b = np.broadcast_arrays(np.asarray(r, dtype=float),
                                    np.asarray(theta, dtype=float))
    _check_radius(d, r_b)
    ls = channel_range(p, cfg, d)
    r_u, inv = np.unique(r_b.ravel(), return_inverse=True)
    order, deta, jv = _bessel_table(p, d, cfg, ls, r_u)
    edge = max(np.abs(jv[0]).max(), np.abs(jv[-1]).max())
    if edge > cfg.truncation_tol:
        warnings.warn("edge channel magnitude %.3g exceeds %.3g; raise l_max"
                      % (edge, cfg.truncation_tol), TruncationWarning, stacklevel=2)
    rr = r_u[inv]
    th = th_b.ravel()
    phase = (ls[:, None] * th[None, :] + deta[:, None] * rr[None, :]
             - 0.5 * math.pi * order[:, None])
    out = np.einsum("ln,ln->n", np.exp(1j * phase), jv[:, inv])
    out = out.reshape(r_b.shape)
    return complex(out) if out.ndim == 0 else out


def partial_wave_field(p, r, phi, cfg=PartialWaveConfig(), d=None):
    """Truncated partial-wave field at polar coordinates ``(r, phi)``.

    Each channel carries ``exp(i(r delta_eta_l + delta_l + |nu_{s,1}| pi/2))
    R_l(r) exp(i(l + 1/2) phi)``.
    """
    d = model.derive(p) if d is None else d
    phi = np.asarray(phi, dtype=float)
    return wick_prefactor(phi, p.s) * partial_wave_sum(p, r, phi + math.pi, cfg, d)


# ---------------------------------------------------------------------------
# incident wave

def _images(theta, q):
    """Integers n with |theta - 2 pi n| <= q pi and their weights (1/2 on ties)."""
    lo = math.ceil((theta - q * math.pi) / _TWO_PI - 1e-9)
    hi = math.floor((theta + q * math.pi) / _TWO_PI + 1e-9)
    out = []
    for n in range(lo, hi + 1):
        gap = abs(theta - _TWO_PI * n) - q * math.pi
        if gap > 1e-12:
            continue
        out.append((n, 0.5 if abs(gap) <= 1e-12 else 1.0))
    return out


def incident_wave(p, r, theta, d=None):
    """Incident wave in the reduced convention, as a finite image sum.

    ``(e^{i r w/2} / q) sum_n e^{-i r eta (1 + w/2eta) cos((theta - 2 pi n)/q)}
    e^{-i beta_q (theta - 2 pi n)}`` over images with
    ``|theta - 2 pi n| <= q pi``; ties on the boundary carry weight 1/2.
    Here ``w = omega_eff``.

    Raises
    ------
    RegimeViolation
        Outside the small-frequency regime.
    """
    model.check_small_frequency(p)
    d = model.derive(p) if d is None else d
    r = np.asarray(r, dtype=float)
    theta = float(theta)
    k = d.eta * d.dispersion_factor
    tot = np.zeros(r.shape, dtype=complex)
    for n, w in _images(theta, p.q):
        t = theta - _TWO_PI * n
        tot = tot + w * np.exp(-1j * r * k * math.cos(t / p.q) - 1j * d.beta_q * t)
    out = np.exp(0.5j * r * d.omega_eff) / p.q * tot
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# scattered wave and amplitudes

def _wrap(a):
    """Map an angle to (-pi, pi]."""
    w = math.remainder(a, _TWO_PI)
    return math.pi if w == -math.pi else w


def forward_distance(delta_theta, q):
    """Angular distance of ``delta_theta`` to the nearest of ``+-q pi`` (mod 2 pi).

    Returns ``(distance, sign)`` with ``sign`` the nearer direction.
    """
    dp = abs(_wrap(delta_theta - q * math.pi))
    dm = abs(_wrap(delta_theta + q * math.pi))
    return (dp, 1) if dp <= dm else (dm, -1)


def _sw_integrand(q, beta, delta_theta, er, c, order):
    sq = math.sqrt(er)
    phases = [(j, cmath.exp(1j * math.pi * j * q * beta), delta_theta + j * q * math.pi)
              for j in (1, -1)]

    def f(u):
        y = (u / sq) * _ROT
        tot = np.zeros(u.shape, dtype=complex)
        for j, ph, a in phases:
            ea = cmath.exp(-1j * a)
            s2 = 2.0 * math.sin(0.5 * a) ** 2
            if order == "full":
                num = (2.0 * np.sinh(0.5 * q * y) * np.sinh(0.5 * q * (1.0 - 2.0 * beta) * y)
                       + np.cosh(q * beta * y) * (1.0 - ea))
                den = 2.0 * np.sinh(0.5 * q * y) ** 2 + s2
            else:
                y2 = 0.5 * q * q * y * y
                num = (1.0 - ea) + y2 * ((1.0 - beta) ** 2 - beta ** 2 * ea)
                den = s2 + y2
            tot += j * ph * num / den
        return tot * np.exp(-0.5 * c * u * u) * (_ROT / sq)

    return f


def scattered_quadrature(p, r, delta_theta, order="full", cfg=PartialWaveConfig(), d=None):
    """Scattered wave by direct quadrature of its integral representation.

    .. math::

        S_{sc} = -\\frac{e^{i\\eta r}}{2\\pi i}\\sum_{j=\\pm} j e^{j\\pi i q\\beta_q}
            \\int_0^\\infty dy\\,
            \\frac{\\cosh(qy(1-\\beta_q)) - \\cosh(q\\beta_q y) e^{-ia_j}}
                 {e^{-i\\eta r c y^2/2}[\\cosh(qy) - \\cos a_j]}

    with ``a_j = delta_theta + j q pi`` and ``c = 1 + omega_eff / 2 eta``.
    The contour is rotated to ``y = t e^{i pi/4}``, where the Gaussian factor
    decays as ``exp(-eta r c t**2/2)``; no poles lie between the two rays.
    The variable ``u = t sqrt(eta r)`` is integrated over [0, 12].

    Parameters
    ----------
    order : {"full", "y2"}
        Exact hyperbolic functions, or their expansion to second order in
        ``y`` (the form that stays regular at the forward directions).

    Raises
    ------
    ForwardSingularity
        ``order="full"`` exactly at ``delta_theta = +-q pi``.
    QuadratureFailure
    """
    if order not in ("full", "y2"):
        raise InvalidParams("order must be 'full' or 'y2'")
    model.check_small_frequency(p)
    d = model.derive(p) if d is None else d
    if not r > 0:
        raise DomainError("r must be positive")
    if order == "full" and forward_distance(delta_theta, p.q)[0] < 1e-12:
        raise ForwardSingularity("full integrand at delta_theta = +-q pi; use order='y2'")
    er = d.eta * r
    f = _sw_integrand(p.q, d.beta_q, float(delta_theta), er, d.dispersion_factor, order)
    res = quad(f, 0.0, _U_MAX, abs_tol=1e-3 * cfg.quad_tol / math.sqrt(er),
               rel_tol=cfg.quad_tol, max_intervals=4000)
    return -cmath.exp(1j * er) / (2j * math.pi) * res.value


def amplitude_value(p, delta_theta, d=None):
    """Closed-form amplitude at the shifted angle, without guard checks.

    ``[2i cos(S/2)/sqrt(2 pi eta)] sin(w_cs/2) sin(dt/2) e^{-i dt/2}
    / (cos w_cs + cos dt) * (1 + omega_eff/2 eta)**(-1/2)``.
    Vectorised over ``delta_theta``.

    Raises
    ------
    RegimeViolation
        Outside the small-frequency regime.
    """
    model.check_small_frequency(p)
    d = model.derive(p) if d is None else d
    dt = np.asarray(delta_theta, dtype=float)
    if p.q == 1:
        out = np.zeros(dt.shape, dtype=complex)
    else:
        pre = 2j * math.cos(0.5 * d.S) / math.sqrt(2.0 * math.pi * d.eta)
        out = (pre * math.sin(0.5 * d.omega_cs) * np.sin(0.5 * dt) * np.exp(-0.5j * dt)
               / (math.cos(d.omega_cs) + np.cos(dt)) / math.sqrt(d.dispersion_factor))
    return complex(out) if out.ndim == 0 else out


def amplitude(p, r, theta, eps_ang=EPS_ANG, d=None):
    """Scattering amplitude at observation angle ``theta`` and radius ``r``.

    The rotation enters only through ``delta_theta = theta + 2 r omega_eff``
    and the factor ``(1 + omega_eff / 2 eta)**(-1/2)``. Vanishes identically
    without a cone (``q = 1``).

    Raises
    ------
    NearForwardSingularity
        If ``delta_theta`` lies within ``eps_ang`` of ``+-q pi``; use
        :func:`amplitude_forward` there.
    RegimeViolation
        Outside the small-frequency regime.
    """
    d = model.derive(p) if d is None else d
    dt = float(theta) + 2.0 * r * d.omega_eff
    if p.q != 1 and forward_distance(dt, p.q)[0] < eps_ang:
        raise NearForwardSingularity(
            "delta_theta = %.6g is within %g rad of a forward direction" % (dt, eps_ang))
    f = amplitude_value(p, dt, d)
    return AmplitudeRecord(float(theta), dt, f, abs(f) ** 2, "generic")


def amplitude_forward(p, sign, d=None):
    """Regularised amplitude at ``delta_theta = sign * q pi``.

    ``[e^{iS/2}/sqrt(2 pi eta)] (-(e^{+-i w/2}/2) cot w - sin(w/2)
    +- i beta_q e^{-+i w/2}) (1 + omega_eff/2 eta)**(-1/2)`` with ``w = omega_cs``.

    Raises
    ------
    DomainError
        Unless ``1 < q < 2`` (``sin omega_cs`` vanishes at both ends).
    RegimeViolation
        Outside the small-frequency regime.
    """
    if sign not in (1, -1):
        raise InvalidParams("sign must be +1 or -1")
    model.check_small_frequency(p)
    if not 1.0 < p.q < 2.0:
        raise DomainError("forward amplitude needs 1 < q < 2, got q = %g" % p.q)
    d = model.derive(p) if d is None else d
    w = d.omega_cs
    if abs(math.sin(w)) < 1e-12:
        raise DomainError("sin(omega_cs) = 0: forward amplitude undefined")
    body = (-0.5 * cmath.exp(sign * 0.5j * w) * math.cos(w) / math.sin(w)
            - math.sin(0.5 * w)
            + sign * 1j * d.beta_q * cmath.exp(-sign * 0.5j * w))
    return (cmath.exp(0.5j * d.S) / math.sqrt(2.0 * math.pi * d.eta) * body
            / math.sqrt(d.dispersion_factor))


def naive_amplitude(p, theta, cfg=PartialWaveConfig(), r=None, d=None):
    """Textbook partial-wave amplitude ``(1/sqrt(-2 pi eta)) sum_l (e^{2i delta_l} - 1) e^{i(l+1/2) theta}``.

    Diagnostic only: for ``q > 1`` the partial sums do not converge (their
    limit is a distribution). ``sqrt(-1)`` is taken as ``i``. With ``r`` given
    the rotational phase ``r delta_eta_l`` is included in ``delta_l``.
    """
    d = model.derive(p) if d is None else d
    ls = channel_range(p, cfg, d)
    delta = model.delta_topology(p.q, ls, p.s)
    if r is not None:
        delta = delta + r * _eta_channels(p, d, ls.astype(float), cfg.dispersion)[1]
    th = np.asarray(theta, dtype=float)
    terms = (np.exp(2j * delta)[:, None] - 1.0) * np.exp(1j * (ls[:, None] + 0.5) * th.ravel()[None, :])
    out = terms.sum(axis=0).reshape(th.shape) / (1j * math.sqrt(2.0 * math.pi * d.eta))
    return complex(out) if out.ndim == 0 else out


def cross_section_sweep(p, theta, r, eps_ang=EPS_ANG, d=None):
    """Amplitudes and ``|f|**2`` over observation angles ``theta`` at radius ``r``.

    Angles whose shifted angle falls inside the forward guard band use the
    regularised forward value. Failures are collected in ``errors`` instead of
    aborting the sweep.

    Raises
    ------
    DomainError
        If ``r`` lies outside ``0 < r < r_max``.
    RegimeViolation
        Outside the small-frequency regime.
    """
    model.check_small_frequency(p)
    d = model.derive(p) if d is None else d
    if not 0 < r < d.r_max:
        raise DomainError("r = %g outside 0 < r < %g" % (r, d.r_max))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    records = []
    errors = {}
    for i, th in enumerate(theta):
        try:
            try:
                rec = amplitude(p, r, th, eps_ang, d)
            except NearForwardSingularity:
                dt = th + 2.0 * r * d.omega_eff
                f = amplitude_forward(p, forward_distance(dt, p.q)[1], d)
                rec = AmplitudeRecord(float(th), dt, f, abs(f) ** 2, "forward")
        except ConeScatterError as exc:
            rec = None
            errors[i] = "%s: %s" % (type(exc).__name__, exc)
        records.append(rec)
    return AngularSweep(theta, float(r), tuple(records), errors)
