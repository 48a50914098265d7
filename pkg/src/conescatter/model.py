"""Physical inputs, derived symbols and phase shifts.

Natural units, hbar = c = 1. A spin-1/2 particle of mass ``m`` and energy
``E`` moves on a cone with deficit parameter ``q = 1/alpha`` in a frame
rotating at angular frequency ``varpi``; ``s = +-1`` is the spin projection.
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np

from .errors import DomainError, DomainWarning, EvanescentMode, InvalidParams, RegimeViolation

__all__ = [
    "SMALL_FREQUENCY_RATIO",
    "ScatteringParams",
    "DerivedParams",
    "TopologicalShift",
    "derive",
    "nu",
    "eta_l",
    "delta_eta_exact",
    "delta_eta_approx",
    "delta_topology",
    "delta_topology_piecewise",
    "topological_shift",
    "delta_total",
    "rotational_frequency_special",
    "max_radius",
    "evanescent_l_min",
    "check_small_frequency",
]

#: approximate (small-frequency) formulas require varpi <= this * E
SMALL_FREQUENCY_RATIO = 0.05


@dataclass(frozen=True)
class ScatteringParams:
    """Raw physical inputs.

    Attributes
    ----------
    mass : float
        Particle mass, > 0.
    energy : float
        Kinetic energy, > 0.
    varpi : float
        Frame rotation frequency, >= 0.
    q : float
        Deficit parameter, ``q = 1/alpha >= 1``; ``q = 1`` is flat space.
    s : int
        Spin projection, +1 or -1.
    """

    mass: float = 1.0
    energy: float = 1.0
    varpi: float = 0.0
    q: float = 1.0
    s: int = 1

    def __post_init__(self):
        for name in ("mass", "energy", "varpi", "q"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.integer, np.floating)) or not math.isfinite(v):
                raise InvalidParams("%s must be a finite number, got %r" % (name, v))
        if self.mass <= 0:
            raise InvalidParams("mass must be > 0, got %r" % self.mass)
        if self.energy <= 0:
            raise InvalidParams("energy must be > 0, got %r" % self.energy)
        if self.varpi < 0:
            raise InvalidParams("varpi must be >= 0, got %r" % self.varpi)
        if self.q < 1:
            raise InvalidParams("q must be >= 1, got %r" % self.q)
        if self.s not in (1, -1):
            raise InvalidParams("s must be +1 or -1, got %r" % self.s)
        object.__setattr__(self, "s", int(self.s))

    @classmethod
    def from_alpha(cls, alpha, **kw):
        """Build from the deficit angle parameter ``alpha = 1/q``."""
        if not (math.isfinite(alpha) and 0 < alpha <= 1):
            raise InvalidParams("alpha must lie in (0, 1], got %r" % alpha)
        return cls(q=1.0 / alpha, **kw)

    @property
    def small_frequency(self):
        """True when ``varpi <= 0.05 E`` (the approximate formulas apply)."""
        return self.varpi <= SMALL_FREQUENCY_RATIO * self.energy


@dataclass(frozen=True)
class DerivedParams:
    """Symbols derived from :class:`ScatteringParams`.

    Attributes
    ----------
    eta : float
        Wavenumber ``sqrt(2 m E)``.
    alpha : float
        ``1/q``.
    omega_eff : float
        ``sqrt(m / 2E) * varpi``.
    beta_q : float
        ``(q - s) / 2q``, in [0, 1).
    omega_cs : float
        Classical scattering angle ``pi (q - 1)``.
    S : float
        Spin phase ``pi (1 - s)``, either 0 or 2 pi.
    r_max : float
        Radius ``q / varpi`` of the light cylinder (inf when not rotating).
    """

    eta: float
    alpha: float
    omega_eff: float
    beta_q: float
    omega_cs: float
    S: float
    r_max: float

    @property
    def dispersion_factor(self):
        """``1 + omega_eff / 2 eta``."""
        return 1.0 + self.omega_eff / (2.0 * self.eta)


def derive(p):
    """Compute every derived symbol.

    Examples
    --------
    >>> d = derive(ScatteringParams(1.0, 1.0, 0.01, 1.2, 1))
    >>> round(d.beta_q * 12, 12)
    1.0
    """
    if not isinstance(p, ScatteringParams):
        raise InvalidParams("expected ScatteringParams, got %r" % type(p))
    alpha = 1.0 / p.q
    return DerivedParams(
        eta=math.sqrt(2.0 * p.mass * p.energy),
        alpha=alpha,
        omega_eff=math.sqrt(p.mass / (2.0 * p.energy)) * p.varpi,
        beta_q=(p.q - p.s) / (2.0 * p.q),
        omega_cs=math.pi * (p.q - 1.0),
        S=math.pi * (1 - p.s),
        r_max=math.inf if p.varpi == 0 else 1.0 / (alpha * p.varpi),
    )


def _d(p, d):
    return derive(p) if d is None else d


def nu(l, s, q):
    """``nu_{s,q} = l + 1/2 - s/2q``; array-valued for array ``l``."""
    out = np.asarray(l, dtype=float) + 0.5 - s / (2.0 * q)
    return float(out) if out.ndim == 0 else out


def check_small_frequency(p):
    """Raise :class:`RegimeViolation` unless ``varpi <= 0.05 E``."""
    if not p.small_frequency:
        raise RegimeViolation(
            "small-frequency formulas need varpi <= %g*E; got varpi/E = %g"
            % (SMALL_FREQUENCY_RATIO, p.varpi / p.energy))


def evanescent_l_min(p):
    """Smallest ``l`` whose channel propagates (``eta_l**2 > 0``); None if unbounded."""
    if p.varpi == 0:
        return None
    return math.floor(-p.energy / p.varpi - 0.5) + 1


def _radicand(p, d, l):
    return d.eta ** 2 + 2.0 * p.mass * p.varpi * (np.asarray(l, dtype=float) + 0.5)


def eta_l(p, l, d=None):
    """Channel wavenumber ``sqrt(eta**2 + 2 m varpi (l + 1/2))``.

    Raises
    ------
    EvanescentMode
        If the radicand is <= 0 for any requested ``l``.
    """
    d = _d(p, d)
    rad = _radicand(p, d, l)
    if np.any(rad <= 0):
        bad = np.asarray(l)[rad <= 0] if np.ndim(l) else l
        raise EvanescentMode("eta_l**2 <= 0 for l = %s (l must exceed %g)"
                             % (bad, -p.energy / max(p.varpi, 1e-300) - 0.5))
    out = np.sqrt(rad)
    return float(out) if np.ndim(l) == 0 else out


def delta_eta_exact(p, l, d=None):
    """Rotational wavenumber shift ``eta_l - eta``.

    Written as ``2 m varpi (l + 1/2) / (eta_l + eta)`` to avoid cancellation.
    """
    d = _d(p, d)
    el = eta_l(p, l, d)
    out = 2.0 * p.mass * p.varpi * (np.asarray(l, dtype=float) + 0.5) / (el + d.eta)
    return float(out) if np.ndim(l) == 0 else out


def delta_eta_approx(p, l, d=None):
    """First-order shift ``omega_eff (l + 1/2)``.

    Raises
    ------
    RegimeViolation
        If ``varpi > 0.05 E``.
    """
    check_small_frequency(p)
    d = _d(p, d)
    out = d.omega_eff * (np.asarray(l, dtype=float) + 0.5)
    return float(out) if np.ndim(l) == 0 else out


def delta_topology(q, l, s):
    """Topological phase shift ``(pi/2)(|nu_{s,1}| - q |nu_{s,q}|)``."""
    l = np.asarray(l, dtype=float)
    out = 0.5 * math.pi * (np.abs(l + 0.5 - 0.5 * s) - q * np.abs(l + 0.5 - s / (2.0 * q)))
    return float(out) if out.ndim == 0 else out


def delta_topology_piecewise(q, l):
    """Reduced form ``-/+ (l + 1/2) omega_cs / 2`` for ``l >= 0`` / ``l < 0``."""
    l = np.asarray(l, dtype=float)
    omega_cs = math.pi * (q - 1.0)
    out = np.where(l >= 0, -0.5, 0.5) * (l + 0.5) * omega_cs
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TopologicalShift:
    """Direct and piecewise topological shifts for one channel.

    ``value`` is the direct formula, which is authoritative; ``mismatch`` flags
    channels where the piecewise reduction differs from it.
    """

    l: int
    s: int
    value: float
    piecewise: float
    mismatch: bool


def topological_shift(q, l, s, atol=1e-12):
    """Evaluate both forms of the topological shift and flag disagreement."""
    v = delta_topology(q, l, s)
    pw = delta_topology_piecewise(q, l)
    return TopologicalShift(int(l), int(s), v, pw, abs(v - pw) > atol * max(1.0, abs(v)))


def delta_total(p, l, r, d=None):
    """Total phase ``r * delta_eta_l + delta_topology`` at radius ``r``.

    The rotational part grows with ``r``: it is a wavenumber shift, not a
    constant phase.
    """
    return r * delta_eta_exact(p, l, d) + delta_topology(p.q, l, p.s)


def rotational_frequency_special(p, phi, r, d=None):
    """Rotation frequency ``sqrt(2E/m) (omega_cs - phi) / 2r`` singled out by the scattered phase.

    Raises
    ------
    DomainError
        If ``r <= 0``.

    Warns
    -----
    DomainWarning
        If the result places ``r`` outside ``0 < r < q / varpi``.
    """
    if not (r > 0 and math.isfinite(r)):
        raise DomainError("r must be positive and finite, got %r" % r)
    d = _d(p, d)
    w = math.sqrt(2.0 * p.energy / p.mass) * (d.omega_cs - phi) / (2.0 * r)
    if w > 0 and r >= p.q / w:
        warnings.warn("r = %g lies outside 0 < r < q/varpi = %g" % (r, p.q / w),
                      DomainWarning, stacklevel=2)
    return w


def max_radius(d):
    """Light-cylinder radius ``1 / (alpha varpi)``; inf without rotation."""
    return d.r_max
