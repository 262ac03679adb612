"""Compare the compiled stepper against the pure-Python fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeats N]

Three workloads, each timed under both kernels by toggling the dispatch
in-process (the same trick the parity test uses, so the numbers describe
exactly the code paths the library runs):

  raw-integrate   one tight-tolerance shot of the radial lane-emden system
  solve-profile   full secant search for the p=3, N=3 cone profile
  eigen-search    first weighted eigenvalue below zero for that profile

The compiled and pure results are also checked for bitwise agreement on
the raw workload before any timing is reported.
"""

import argparse
import statistics
import time

import numpy as np

from enstab import NonlinearitySpec, nuhat_first, solve_radial
from enstab import _kernel
from enstab.profiles import _profile_rhs, parse_nonlinearity


def _raw_shot():
    spec = _profile_rhs(parse_nonlinearity("lane-emden:3"), 3)
    return _kernel.integrate_raw(
        spec, 1e-6, np.array([6.896848619, 0.0]), 1.0, 1e-12, 1e-12
    )


def _solve():
    return solve_radial(NonlinearitySpec.lane_emden(3), 3)


def _eigen(profile):
    return nuhat_first(profile)


def _time(fn, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples), statistics.median(samples)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()

    if _kernel._compiled is None:
        print("compiled kernel unavailable (pure-Python build); nothing to compare")
        raw = _time(_raw_shot, args.repeats)
        print(f"python raw-integrate: best {raw[0] * 1e3:.2f} ms")
        return

    compiled = _kernel._compiled
    ts_c, ys_c, _, st_c = _raw_shot()
    _kernel._compiled = None
    try:
        ts_p, ys_p, _, st_p = _raw_shot()
    finally:
        _kernel._compiled = compiled
    same = (
        st_c == st_p
        and np.array_equal(ts_c, ts_p)
        and np.array_equal(ys_c, ys_p)
    )
    print(f"parity on raw workload: {'bitwise identical' if same else 'MISMATCH'}")
    if not same:
        raise SystemExit(1)

    profile = _solve()
    workloads = [
        ("raw-integrate", _raw_shot),
        ("solve-profile", _solve),
        ("eigen-search", lambda: _eigen(profile)),
    ]
    print(f"{'workload':<16}{'compiled best':>16}{'python best':>16}{'speedup':>10}")
    for name, fn in workloads:
        best_c, _ = _time(fn, args.repeats)
        _kernel._compiled = None
        try:
            best_p, _ = _time(fn, args.repeats)
        finally:
            _kernel._compiled = compiled
        print(f"{name:<16}{best_c * 1e3:>13.2f} ms{best_p * 1e3:>13.2f} ms"
              f"{best_p / best_c:>9.1f}x")


if __name__ == "__main__":
    main()
