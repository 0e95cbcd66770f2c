"""Numba kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py            # both paths, side by side
    python benchmarks/bench_kernels.py --worker   # current path only, JSON

Each path runs in its own process because ``MIXEDLIENARD_DISABLE_NUMBA`` is
read at import time.  The first call is timed separately so JIT compilation
does not pollute the steady-state numbers.
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _workloads():
    from mixedlienard.cases import is_alphas, is_equation, is_pairs, isochronous_equation
    from mixedlienard.quadrature import quadrature_solve
    from mixedlienard.specialfn import hyp2f1
    from mixedlienard.verify import rk_integrate

    iso = isochronous_equation(0)
    t_rk = np.linspace(0.0, 20.0, 2001)
    alphas = is_alphas(0.5, 0.75, 0.75)
    pair = is_pairs(alphas)[0]
    t_q = np.linspace(0.0, 10.0, 400)
    zs = np.linspace(0.01, 0.95, 400)
    hs = is_equation(alphas)

    def rk():
        rk_integrate(iso, 1.0, 0.0, t_rk, x_floor=None)

    def rk_mixed():
        rk_integrate(hs, 1.0, -0.9, t_q, rel_tol=1e-10)

    def quad():
        quadrature_solve(pair, 1.0, 0.0, t_q)

    def hyp():
        for z in zs:
            hyp2f1(1.0, 0.25, 1.25, z)
            hyp2f1(1.0, 1.0, 2.0, z)

    return {"rk_integrate": rk, "rk_integrate_mixed": rk_mixed, "quadrature_solve": quad, "hyp2f1_sweep": hyp}


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def worker(repeat: int) -> dict:
    from mixedlienard._jit import HAS_NUMBA

    out = {"numba": HAS_NUMBA, "results": {}}
    for name, fn in _workloads().items():
        t0 = time.perf_counter()
        fn()
        first = time.perf_counter() - t0
        out["results"][name] = {"first": first, "best": _time(fn, repeat)}
    return out


def run_mode(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, MIXEDLIENARD_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run(
        [sys.executable, __file__, "--worker", "--repeat", str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--worker", action="store_true", help="time the current path and print JSON")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if args.worker:
        print(json.dumps(worker(args.repeat)))
        return
    fast, slow = run_mode(False, args.repeat), run_mode(True, args.repeat)
    if not fast["numba"]:
        print("numba unavailable: both columns use the fallback")
    print(f"{'workload':<22}{'numba first':>13}{'numba best':>13}{'python best':>13}{'speedup':>10}")
    for name, r in fast["results"].items():
        p = slow["results"][name]["best"]
        print(f"{name:<22}{r['first']:>12.3f}s{r['best']:>12.4f}s{p:>12.4f}s{p / r['best']:>9.1f}x")


if __name__ == "__main__":
    main()
