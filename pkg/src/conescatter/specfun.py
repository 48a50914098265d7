"""Bessel functions of real nonnegative order.

Public entry points validate their inputs and dispatch to the compiled kernels
when they are available (see ``_backend``). Regimes for :math:`J_\\nu(x)`:

* ascending series while its rounding error stays below ``abs_tol``
  (in practice ``x <= 12`` or ``x**2 <= 4(nu + 1)``);
* Hankel expansion for ``x >= max(12, 2 nu)`` when it converges to ``abs_tol``;
* Miller backward recurrence otherwise, which covers the large-order,
  large-argument corner reached by partial-wave sums.
"""
from dataclasses import dataclass
import cmath
import math

import numpy as np

from . import _backend
from .errors import DomainError, InvalidParams, NonConvergence, QuadratureFailure
from .quadrature import quad, quad_semi_infinite

__all__ = [
    "SeriesConfig",
    "bessel_j",
    "bessel_j_array",
    "bessel_i",
    "bessel_j_imag",
    "bessel_i_integral",
    "gamma",
    "lgamma",
    "backend_name",
]


@dataclass(frozen=True)
class SeriesConfig:
    """Accuracy controls for series and expansions.

    Attributes
    ----------
    abs_tol : float
        Target absolute error (relative to ``max(1, |I|)`` for ``bessel_i``).
    max_terms : int
        Term budget per series or expansion.
    """

    abs_tol: float = 1e-14
    max_terms: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise InvalidParams("abs_tol must be positive, got %r" % self.abs_tol)
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise InvalidParams("max_terms must be an integer >= 1, got %r"
                                % self.max_terms)


_DEFAULT = SeriesConfig()


def backend_name():
    """Name of the active kernel backend, ``'cython'`` or ``'python'``."""
    return _backend.NAME


def _check(nu, x):
    if not (math.isfinite(nu) and nu >= 0):
        raise DomainError("order must be finite and >= 0, got %r" % nu)
    if not (math.isfinite(x) and x >= 0):
        raise DomainError("argument must be finite and >= 0, got %r" % x)


def lgamma(x):
    """log|Gamma(x)| (Lanczos, g = 7)."""
    return _backend.kernels.lgamma(float(x))


def gamma(x):
    """Gamma(x) with relative error below 1e-13 for 0 < x < 171."""
    return _backend.kernels.gamma(float(x))


def bessel_j(nu, x, cfg=_DEFAULT):
    """Bessel function of the first kind :math:`J_\\nu(x)`.

    Parameters
    ----------
    nu : float
        Order, ``nu >= 0``.
    x : float
        Argument, ``x >= 0``.
    cfg : SeriesConfig, optional

    Returns
    -------
    float

    Raises
    ------
    DomainError
        Negative or non-finite inputs.
    NonConvergence
        No regime reaches ``cfg.abs_tol``.

    Examples
    --------
    >>> round(bessel_j(1.0, 1.0), 10)
    0.4400505857
    """
    nu = float(nu)
    x = float(x)
    _check(nu, x)
    return _backend.kernels.bessel_j(nu, x, cfg.abs_tol, cfg.max_terms)


def bessel_j_array(nu, x, cfg=_DEFAULT):
    """Elementwise :math:`J_\\nu(x)` over broadcast arrays of orders and arguments."""
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    if not (np.all(np.isfinite(nu)) and np.all(nu >= 0)):
        raise DomainError("orders must be finite and >= 0")
    if not (np.all(np.isfinite(x)) and np.all(x >= 0)):
        raise DomainError("arguments must be finite and >= 0")
    return _backend.kernels.bessel_j_array(nu, x, cfg.abs_tol, cfg.max_terms)


def bessel_i(nu, x, cfg=_DEFAULT):
    """Modified Bessel function :math:`I_\\nu(x)`.

    Ascending series (all terms positive, no cancellation), or the
    large-argument expansion when the series needs more than
    ``cfg.max_terms`` terms. Accuracy is relative to ``max(1, I_nu(x))``.
    """
    nu = float(nu)
    x = float(x)
    _check(nu, x)
    return _backend.kernels.bessel_i(nu, x, cfg.abs_tol, cfg.max_terms)


def bessel_j_imag(nu, x, cfg=_DEFAULT):
    """:math:`J_\\nu(ix)` summed directly as a complex power series in ``ix``.

    Principal branch, so ``(ix)**nu = e^{i nu pi/2} x**nu``. Kept separate
    from :func:`bessel_i` so that the rotation identity
    ``J_nu(ix) = e^{i nu pi/2} I_nu(x)`` compares two independent sums.
    """
    nu = float(nu)
    x = float(x)
    _check(nu, x)
    if x == 0.0:
        return complex(1.0 if nu == 0.0 else 0.0)
    z = 1j * x
    w = -0.25 * z * z
    pref = cmath.exp(nu * cmath.log(0.5 * z) - lgamma(nu + 1.0))
    t = 1.0 + 0j
    s = 1.0 + 0j
    for k in range(1, cfg.max_terms + 1):
        t *= w / (k * (nu + k))
        s += t
        if k * (nu + k) > abs(w) and abs(t) < 0.1 * cfg.abs_tol * abs(s):
            return pref * s
    raise NonConvergence("series for J_%g(i*%g) did not converge in %d terms"
                         % (nu, x, cfg.max_terms))


def bessel_i_integral(eps, z, quad_tol=1e-10):
    r"""Integral representation of :math:`I_\epsilon(z)`.

    .. math::

        I_\epsilon(z) = \frac{1}{\pi}\int_0^\pi \cos(\epsilon y) e^{z\cos y}\,dy
            - \frac{\sin\pi\epsilon}{\pi}\int_0^\infty e^{-z\cosh y - \epsilon y}\,dy

    Parameters
    ----------
    eps : float
        Order, ``eps >= 0``.
    z : complex
        Argument with ``Re z > 0``, or ``z = 0``.
    quad_tol : float
        Absolute tolerance handed to the adaptive quadrature.

    Raises
    ------
    QuadratureFailure
        For ``Re z <= 0`` with ``z != 0``. On the imaginary axis the second
        integral only converges conditionally; inside the scattered-wave
        integral the Gaussian factor supplies the damping instead.
    """
    eps = float(eps)
    z = complex(z)
    if not (math.isfinite(eps) and eps >= 0):
        raise DomainError("order must be finite and >= 0, got %r" % eps)
    if z != 0 and not z.real > 0:
        raise QuadratureFailure(
            "undamped integral representation requested at z=%r; only Re z > 0 "
            "is evaluated standalone" % z)
    tol = 0.1 * quad_tol

    def first(y):
        return np.cos(eps * y) * np.exp(z * np.cos(y))

    total = quad(first, 0.0, math.pi, abs_tol=tol, rel_tol=1e-14).value / math.pi
    if eps != math.floor(eps):
        def second(y):
            return np.exp(-z * np.cosh(y) - eps * y)

        tail = quad_semi_infinite(second, 0.0, 1.0, abs_tol=tol, rel_tol=1e-14)
        total -= math.sin(math.pi * eps) / math.pi * tail.value
    return total
