"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--x 1000000] [--repeat 3]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from charlab import _fallback, arith

try:
    from charlab import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def workloads(x: int):
    rng = np.random.default_rng(0)
    spf = _fallback.spf_sieve(x)
    pv = np.zeros(x + 1, dtype=np.complex128)
    ps = arith.primes_up_to(x)
    pv[ps] = np.exp(2j * np.pi * rng.integers(0, 6, len(ps)) / 6)
    f = _fallback.extend_multiplicative(pv, spf, x)
    h = _fallback.divisor_sum(f)
    small = ps[ps <= 10**5].astype(float)
    dist = (np.log(small), 1 / small, np.cos(small), np.sin(small), np.linspace(-10, 10, 2000))
    return {
        "spf_sieve": lambda m: m.spf_sieve(x),
        "extend_multiplicative": lambda m: m.extend_multiplicative(pv, spf, x),
        "divisor_sum": lambda m: m.divisor_sum(f),
        "convolve_conj": lambda m: m.convolve_conj(h),
        "kahan_cumsum": lambda m: m.kahan_cumsum(f),
        "distance_grid": lambda m: m.distance_grid(*dist),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--x", type=int, default=10**6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"x = {args.x}, best of {args.repeat}")
    print(f"{'kernel':<24}{'compiled ms':>14}{'numpy ms':>12}{'speedup':>10}")
    for name, run in workloads(args.x).items():
        py = min(timeit.repeat(lambda: run(_fallback), number=1, repeat=args.repeat)) * 1e3
        if _kernels is None:
            print(f"{name:<24}{'-':>14}{py:>12.1f}{'-':>10}")
            continue
        c = min(timeit.repeat(lambda: run(_kernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<24}{c:>14.1f}{py:>12.1f}{py / c:>9.1f}x")


if __name__ == "__main__":
    main()
