# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Bessel and gamma kernels.

Same algorithms and regime selection as ``_pykernels``; see that module for
the description. Each element is evaluated independently in a C loop.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cbrt, cos, exp, fabs, floor, log, pow, sin, sqrt, INFINITY, NAN

from .errors import NonConvergence

cnp.import_array()

NAME = "cython"

SERIES_X = 12.0
EPS = 2.220446049250313e-16
MILLER_CAP = 200000

cdef double _EPS = 2.220446049250313e-16
cdef double _SERIES_X = 12.0
cdef long _MILLER_CAP = 200000
cdef double _BIG = 1e250
cdef double _TINY = 1e-280
cdef double _PI = 3.141592653589793
cdef double _HALF_LOG_2PI = 0.9189385332046728
cdef double _LG = 7.0
cdef double[9] _LANCZOS
_LANCZOS[:] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
]

# regime codes
cdef enum:
    R_ZERO = 0
    R_SERIES = 1
    R_HANKEL = 2
    R_MILLER = 3
    R_FAIL = -1


cdef inline double _lanczos_sum(double x) noexcept nogil:
    cdef double a = _LANCZOS[0]
    cdef int i
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    return a


cdef double c_lgamma(double x) noexcept nogil:
    cdef double s, t
    if x < 0.5:
        s = sin(_PI * x)
        if s == 0.0 or x == floor(x):
            return INFINITY
        return log(_PI / fabs(s)) - c_lgamma(1.0 - x)
    x -= 1.0
    t = x + _LG + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * log(t) - t + log(_lanczos_sum(x))


cdef double c_gamma(double x) noexcept nogil:
    cdef double s, t, h, y, p
    cdef long n, k
    if x < 0.5:
        s = sin(_PI * x)
        if s == 0.0 or x == floor(x):
            return NAN
        return _PI / (s * c_gamma(1.0 - x))
    if x > 171.7:
        return INFINITY
    if x > 20.0:
        n = <long>x - 10
        y = x - n
        p = 1.0
        for k in range(n):
            p *= y + k
        return c_gamma(y) * p
    x -= 1.0
    t = x + _LG + 0.5
    h = pow(t, 0.5 * x + 0.25)
    return sqrt(2.0 * _PI) * h * exp(-t) * h * _lanczos_sum(x)


cdef inline long _miller_start(double nu, double x) noexcept nogil:
    cdef double top = floor(nu)
    if x > top:
        top = x
    return <long>(top + 15.0 * cbrt(top) + 30.0)


cdef int _series_j(double nu, double x, double tol, int max_terms,
                   double* out) noexcept nogil:
    cdef double pref = exp(nu * log(0.5 * x) - c_lgamma(nu + 1.0))
    cdef double q = 0.25 * x * x
    cdef double t = 1.0, s = 1.0, mag = 1.0
    cdef int k, done = 0
    for k in range(1, max_terms + 1):
        t *= -q / (k * (nu + k))
        s += t
        mag += fabs(t)
        if (k * (nu + k) > q and fabs(t) * pref < 1e-3 * tol
                and fabs(t) < 0.5 * _EPS * mag):
            done = 1
            break
    out[0] = pref * s
    return done and _EPS * mag * pref <= tol


cdef int _hankel_j(double nu, double x, double tol, int max_terms,
                   double* out) noexcept nogil:
    cdef double mu4 = 4.0 * nu * nu
    cdef double scale = sqrt(2.0 / (_PI * x))
    cdef double p = 1.0, q = 0.0, t = 1.0, peak = 1.0, ratio, chi, odd
    cdef int k, m, done = 0
    for k in range(1, max_terms + 1):
        odd = 2.0 * k - 1.0
        ratio = (mu4 - odd * odd) / (8.0 * k * x)
        if fabs(ratio) >= 1.0 and odd * odd > mu4:
            break
        t *= ratio
        if fabs(t) > peak:
            peak = fabs(t)
        m = k % 4
        if m == 0:
            p += t
        elif m == 1:
            q += t
        elif m == 2:
            p -= t
        else:
            q -= t
        if scale * fabs(t) < 0.1 * tol:
            done = 1
            break
    chi = x - (0.5 * nu + 0.25) * _PI
    out[0] = scale * (p * cos(chi) - q * sin(chi))
    return done and 4.0 * _EPS * peak * scale <= tol


cdef int _miller_j(double nu, double x, double* out) noexcept nogil:
    cdef long n = <long>floor(nu)
    cdef double mu = nu - n
    cdef long top = _miller_start(nu, x)
    cdef long k, j
    cdef double g, g1 = 0.0, fk = _TINY, fkp1 = 0.0, fkm1
    cdef double s = 0.0, res = 0.0, two_over_x = 2.0 / x
    if top > _MILLER_CAP:
        return 0
    j = top // 2
    g = exp(c_lgamma(mu + j) - c_lgamma(j + 1.0))
    k = top
    while True:
        if k == n:
            res = fk
        if k % 2 == 0:
            j = k // 2
            if j >= 1:
                s += (mu + 2.0 * j) * g * fk
                if j == 1:
                    g1 = g
                else:
                    g *= j / (mu + j - 1.0)
            else:
                s += g1 * fk
        if k == 0:
            break
        fkm1 = two_over_x * (mu + k) * fk - fkp1
        if fabs(fkm1) > _BIG:
            fkm1 /= _BIG
            fk /= _BIG
            s /= _BIG
            res /= _BIG
        fkp1 = fk
        fk = fkm1
        k -= 1
    out[0] = res * pow(0.5 * x, mu) / s
    return 1


cdef int c_bessel_j(double nu, double x, double tol, int max_terms,
                    double* out) noexcept nogil:
    """Evaluate J_nu(x); returns the regime code used."""
    if x == 0.0:
        out[0] = 1.0 if nu == 0.0 else 0.0
        return R_ZERO
    if x <= _SERIES_X or x * x <= 4.0 * (nu + 1.0):
        if _series_j(nu, x, tol, max_terms, out):
            return R_SERIES
    if x >= _SERIES_X and x >= 2.0 * nu:
        if _hankel_j(nu, x, tol, max_terms, out):
            return R_HANKEL
    if _miller_j(nu, x, out):
        return R_MILLER
    return R_FAIL


def lgamma(double x):
    """log|Gamma(x)| via the Lanczos approximation."""
    return c_lgamma(x)


def gamma(double x):
    """Gamma(x) via the Lanczos approximation, with reflection for x < 0.5."""
    return c_gamma(x)


def bessel_j(double nu, double x, double abs_tol=1e-14, int max_terms=200):
    cdef double out
    if c_bessel_j(nu, x, abs_tol, max_terms, &out) == R_FAIL:
        raise NonConvergence(
            "backward recurrence would need more than %d steps" % MILLER_CAP)
    return out


def bessel_j_array(nu, x, double abs_tol=1e-14, int max_terms=200):
    """J_nu(x) elementwise for nu >= 0, x >= 0 (broadcast)."""
    nu_b, x_b = np.broadcast_arrays(np.asarray(nu, dtype=float),
                                    np.asarray(x, dtype=float))
    shape = x_b.shape
    cdef double[::1] nv = np.ascontiguousarray(nu_b).ravel()
    cdef double[::1] xv = np.ascontiguousarray(x_b).ravel()
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i, n = xv.shape[0]
    cdef int failed = 0
    with nogil:
        for i in range(n):
            if c_bessel_j(nv[i], xv[i], abs_tol, max_terms, &ov[i]) == R_FAIL:
                failed = 1
    if failed:
        raise NonConvergence(
            "backward recurrence would need more than %d steps" % MILLER_CAP)
    return out.reshape(shape)


def regime_j(double nu, double x, double abs_tol=1e-14, int max_terms=200):
    """Name of the regime bessel_j would use: 'zero', 'series', 'hankel' or 'recurrence'."""
    cdef double out
    code = c_bessel_j(nu, x, abs_tol, max_terms, &out)
    return {R_ZERO: "zero", R_SERIES: "series", R_HANKEL: "hankel",
            R_MILLER: "recurrence", R_FAIL: "failed"}[code]


def bessel_i(double nu, double x, double abs_tol=1e-14, int max_terms=200):
    """I_nu(x) for nu >= 0, x >= 0; tolerance is relative to max(1, I)."""
    cdef double q, t, s, mu4, ratio, odd
    cdef int k
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    q = 0.25 * x * x
    t = 1.0
    s = 1.0
    for k in range(1, max_terms + 1):
        t *= q / (k * (nu + k))
        s += t
        if k * (nu + k) > q and t < 1e-17 * s:
            return exp(nu * log(0.5 * x) - c_lgamma(nu + 1.0)) * s
    mu4 = 4.0 * nu * nu
    t = 1.0
    s = 1.0
    for k in range(1, max_terms + 1):
        odd = 2.0 * k - 1.0
        ratio = (mu4 - odd * odd) / (8.0 * k * x)
        if fabs(ratio) >= 1.0 and odd * odd > mu4:
            break
        t *= -ratio
        s += t
        if fabs(t) < 0.1 * abs_tol * fabs(s):
            return exp(x) / sqrt(2.0 * _PI * x) * s
    raise NonConvergence("I_%g(%g): neither series nor asymptotic expansion "
                         "converged in %d terms" % (nu, x, max_terms))
