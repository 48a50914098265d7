"""Compiled vs pure-Python Bessel kernels.

Times ``bessel_j_array`` on the order/argument table of a converged
partial-wave sum, a batch of scalar calls, and one full ``partial_wave_sum``
evaluation with each backend swapped in.

    python3 benchmarks/bench_kernels.py [--eta-r 400] [--repeat 5]
"""
import argparse
import math
import time

import numpy as np

from conescatter import _backend, _pykernels, waves
from conescatter.model import ScatteringParams, derive

try:
    from conescatter import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta-r", type=float, default=400.0, help="largest eta * r in the table")
    ap.add_argument("--radii", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    p = ScatteringParams(q=1.2)
    d = derive(p)
    r = np.linspace(0.5, 1.0, args.radii) * args.eta_r / d.eta
    lo, hi = waves.suggest_l_range(p, r[-1])
    ls = np.arange(lo, hi + 1)
    order = p.q * np.abs(ls + d.beta_q)
    nu = np.broadcast_to(order[:, None], (ls.size, r.size))
    x = np.broadcast_to(d.eta * r[None, :], nu.shape)
    scalar_pts = list(zip(nu.ravel()[::97], x.ravel()[::97]))
    cfg = waves.PartialWaveConfig(l_max=hi, l_min=lo)
    theta = np.linspace(0.1, 2 * math.pi - 0.1, 32)

    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.insert(0, ("cython", _ckernels))
    else:
        print("compiled extension not built; timing the fallback only")

    print("table: %d orders x %d radii (eta r up to %g)" % (ls.size, r.size, args.eta_r))
    print("%-8s %14s %14s %14s" % ("backend", "array [ms]", "scalar [us]", "pw sum [ms]"))
    results = {}
    saved = _backend.kernels
    try:
        for name, mod in backends:
            t_arr = best_of(lambda: mod.bessel_j_array(nu, x, 1e-14, 200), args.repeat)
            t_sc = best_of(lambda: [mod.bessel_j(a, b, 1e-14, 200) for a, b in scalar_pts],
                           args.repeat) / len(scalar_pts)
            _backend.kernels = mod
            t_pw = best_of(lambda: waves.partial_wave_sum(p, r[:, None], theta[None, :], cfg),
                           args.repeat)
            results[name] = (t_arr, t_sc, t_pw)
            print("%-8s %14.2f %14.2f %14.2f" % (name, 1e3 * t_arr, 1e6 * t_sc, 1e3 * t_pw))
    finally:
        _backend.kernels = saved
    if len(results) == 2:
        c, py = results["cython"], results["python"]
        print("speed-up %14.1fx %13.1fx %13.1fx" % tuple(b / a for a, b in zip(c, py)))


if __name__ == "__main__":
    main()
