"""Pure-Python (numpy) Bessel and gamma kernels.

This is the reference fallback for the compiled ``_ckernels`` module and
implements the same algorithms with the same regime selection:

* ascending power series, used when its rounding-error estimate is below
  the requested absolute tolerance;
* Hankel large-argument expansion, for ``x >= max(SERIES_X, 2*nu)`` when the
  expansion reaches the tolerance before its terms start to grow;
* Miller backward recurrence normalised with
  ``(x/2)**mu = sum_k (mu+2k) Gamma(mu+k)/k! J_{mu+2k}(x)``, for everything else.
"""
import math

import numpy as np

from .errors import NonConvergence

NAME = "python"

SERIES_X = 12.0
EPS = 2.220446049250313e-16
MILLER_CAP = 200_000
_BIG = 1e250
_TINY = 1e-280
_CHUNK = 4096

# g = 7, n = 9 Lanczos coefficients
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def lgamma(x):
    """log|Gamma(x)| via the Lanczos approximation."""
    x = float(x)
    if x < 0.5:
        s = math.sin(math.pi * x)
        if s == 0.0 or x == math.floor(x):
            return math.inf
        return math.log(math.pi / abs(s)) - lgamma(1.0 - x)
    x -= 1.0
    a = _LANCZOS[0]
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(a)


def gamma(x):
    """Gamma(x) via the Lanczos approximation, with reflection for x < 0.5."""
    x = float(x)
    if x < 0.5:
        s = math.sin(math.pi * x)
        if s == 0.0 or x == math.floor(x):
            return math.nan
        return math.pi / (s * gamma(1.0 - x))
    if x > 171.7:
        return math.inf
    if x > 20.0:
        # the large power in the Lanczos form loses ~x ulps; shift down instead
        n = int(x) - 10
        y = x - n
        p = 1.0
        for k in range(n):
            p *= y + k
        return gamma(y) * p
    x -= 1.0
    a = _LANCZOS[0]
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    h = t ** (0.5 * x + 0.25)
    return math.sqrt(2.0 * math.pi) * h * math.exp(-t) * h * a


def lgamma_array(x):
    """Vectorised lgamma for x >= 0.5."""
    x = np.asarray(x, dtype=float) - 1.0
    a = np.full_like(x, _LANCZOS[0])
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * np.log(t) - t + np.log(a)


def miller_start(nu, x):
    """Starting index of the backward recurrence for J_nu(x)."""
    top = np.maximum(np.floor(nu), x)
    return (top + 15.0 * np.cbrt(top) + 30.0).astype(np.int64)


def _series_j(nu, x, abs_tol, max_terms):
    """Ascending series. Returns (value, ok) arrays."""
    with np.errstate(divide="ignore", under="ignore"):
        pref = np.exp(nu * np.log(0.5 * x) - lgamma_array(nu + 1.0))
    q = 0.25 * x * x
    t = np.ones_like(x)
    s = np.ones_like(x)
    mag = np.ones_like(x)
    done = np.zeros(x.shape, dtype=bool)
    for k in range(1, max_terms + 1):
        t = t * (-q / (k * (nu + k)))
        s = np.where(done, s, s + t)
        mag = np.where(done, mag, mag + np.abs(t))
        past_peak = k * (nu + k) > q
        small = np.abs(t) * pref < 1e-3 * abs_tol
        done |= past_peak & small & (np.abs(t) < 0.5 * EPS * mag)
        if done.all():
            break
    ok = done & (EPS * mag * pref <= abs_tol)
    return pref * s, ok


def _hankel_j(nu, x, abs_tol, max_terms):
    """Hankel expansion sqrt(2/pi x) (P cos chi - Q sin chi)."""
    mu4 = 4.0 * nu * nu
    scale = np.sqrt(2.0 / (math.pi * x))
    p = np.ones_like(x)
    q = np.zeros_like(x)
    t = np.ones_like(x)
    peak = np.ones_like(x)
    done = np.zeros(x.shape, dtype=bool)
    failed = np.zeros(x.shape, dtype=bool)
    signs = (1.0, 1.0, -1.0, -1.0)
    for k in range(1, max_terms + 1):
        ratio = (mu4 - (2 * k - 1) ** 2) / (8.0 * k * x)
        growing = (np.abs(ratio) >= 1.0) & ((2 * k - 1) ** 2 > mu4)
        failed |= growing & ~done
        live = ~(done | failed)
        t = np.where(live, t * ratio, t)
        peak = np.maximum(peak, np.abs(t))
        if k % 2 == 0:
            p = np.where(live, p + signs[k % 4] * t, p)
        else:
            q = np.where(live, q + signs[k % 4] * t, q)
        done |= live & (scale * np.abs(t) < 0.1 * abs_tol)
        if (done | failed).all():
            break
    chi = x - (0.5 * nu + 0.25) * math.pi
    ok = done & (4.0 * EPS * peak * scale <= abs_tol)
    return scale * (p * np.cos(chi) - q * np.sin(chi)), ok


def _miller_j(nu, x):
    """Backward recurrence over orders mu + k, vectorised over elements."""
    n = np.floor(nu).astype(np.int64)
    mu = nu - n
    mstart = miller_start(nu, x)
    if mstart.size and mstart.max() > MILLER_CAP:
        raise NonConvergence(
            "backward recurrence would need more than %d steps" % MILLER_CAP)
    out = np.empty_like(x)
    order = np.argsort(mstart, kind="stable")
    for lo in range(0, order.size, _CHUNK):
        idx = order[lo:lo + _CHUNK]
        out[idx] = _miller_chunk(mu[idx], n[idx], x[idx], mstart[idx])
    return out


def _miller_chunk(mu, n, x, mstart):
    top = int(mstart.max())
    j0 = top // 2
    g = np.exp(lgamma_array(mu + j0) - lgamma_array(np.full_like(mu, j0 + 1.0)))
    g1 = np.zeros_like(mu)
    fk = np.zeros_like(x)
    fkp1 = np.zeros_like(x)
    s = np.zeros_like(x)
    res = np.zeros_like(x)
    two_over_x = 2.0 / x
    for k in range(top, -1, -1):
        fk = np.where(mstart == k, _TINY, fk)
        res = np.where(n == k, fk, res)
        if k % 2 == 0:
            j = k // 2
            if j >= 1:
                s += (mu + 2.0 * j) * g * fk
                if j == 1:
                    g1 = g.copy()
                else:
                    g = g * (j / (mu + j - 1.0))
            else:
                s += g1 * fk
        if k == 0:
            break
        fkm1 = two_over_x * (mu + k) * fk - fkp1
        big = np.abs(fkm1) > _BIG
        if big.any():
            scale = np.where(big, 1.0 / _BIG, 1.0)
            fkm1 *= scale
            fk *= scale
            s *= scale
            res *= scale
        fkp1, fk = fk, fkm1
    return res * np.power(0.5 * x, mu) / s


def bessel_j_array(nu, x, abs_tol=1e-14, max_terms=200):
    """J_nu(x) elementwise for nu >= 0, x >= 0 (broadcast)."""
    nu, x = np.broadcast_arrays(np.asarray(nu, dtype=float),
                                np.asarray(x, dtype=float))
    shape = x.shape
    nu = nu.ravel().copy()
    x = x.ravel().copy()
    out = np.empty_like(x)
    zero = x == 0.0
    out[zero] = np.where(nu[zero] == 0.0, 1.0, 0.0)
    todo = np.flatnonzero(~zero)

    cand = todo[(x[todo] <= SERIES_X) | (x[todo] ** 2 <= 4.0 * (nu[todo] + 1.0))]
    if cand.size:
        val, ok = _series_j(nu[cand], x[cand], abs_tol, max_terms)
        out[cand[ok]] = val[ok]
        done = np.zeros(x.shape, dtype=bool)
        done[cand[ok]] = True
        todo = todo[~done[todo]]

    cand = todo[x[todo] >= np.maximum(SERIES_X, 2.0 * nu[todo])]
    if cand.size:
        val, ok = _hankel_j(nu[cand], x[cand], abs_tol, max_terms)
        out[cand[ok]] = val[ok]
        done = np.zeros(x.shape, dtype=bool)
        done[cand[ok]] = True
        todo = todo[~done[todo]]

    if todo.size:
        out[todo] = _miller_j(nu[todo], x[todo])
    return out.reshape(shape)


def bessel_j(nu, x, abs_tol=1e-14, max_terms=200):
    return float(bessel_j_array(nu, x, abs_tol, max_terms))


def regime_j(nu, x, abs_tol=1e-14, max_terms=200):
    """Name of the regime bessel_j would use: 'zero', 'series', 'hankel' or 'recurrence'."""
    nu = np.array([float(nu)])
    x = np.array([float(x)])
    if x[0] == 0.0:
        return "zero"
    if x[0] <= SERIES_X or x[0] ** 2 <= 4.0 * (nu[0] + 1.0):
        if _series_j(nu, x, abs_tol, max_terms)[1][0]:
            return "series"
    if x[0] >= max(SERIES_X, 2.0 * nu[0]):
        if _hankel_j(nu, x, abs_tol, max_terms)[1][0]:
            return "hankel"
    if miller_start(nu, x)[0] > MILLER_CAP:
        return "failed"
    return "recurrence"


def bessel_i(nu, x, abs_tol=1e-14, max_terms=200):
    """I_nu(x) for nu >= 0, x >= 0; tolerance is relative to max(1, I)."""
    nu = float(nu)
    x = float(x)
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    q = 0.25 * x * x
    t = 1.0
    s = 1.0
    for k in range(1, max_terms + 1):
        t *= q / (k * (nu + k))
        s += t
        if k * (nu + k) > q and t < 1e-17 * s:
            return math.exp(nu * math.log(0.5 * x) - lgamma(nu + 1.0)) * s
    # large argument: e^x / sqrt(2 pi x) * sum_k (-1)^k a_k / x^k
    mu4 = 4.0 * nu * nu
    t = 1.0
    s = 1.0
    for k in range(1, max_terms + 1):
        ratio = (mu4 - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(ratio) >= 1.0 and (2 * k - 1) ** 2 > mu4:
            break
        t *= -ratio
        s += t
        if abs(t) < 0.1 * abs_tol * abs(s):
            return math.exp(x) / math.sqrt(2.0 * math.pi * x) * s
    raise NonConvergence("I_%g(%g): neither series nor asymptotic expansion "
                         "converged in %d terms" % (nu, x, max_terms))
