"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""
from __future__ import annotations

import math

import numpy as np


def spf_sieve(n: int) -> np.ndarray:
    spf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        spf[1] = 1
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest[rest >= 2]] = rest[rest >= 2]
    return spf


def extend_multiplicative(prime_values: np.ndarray, spf: np.ndarray, x: int) -> np.ndarray:
    f = np.zeros(x + 1, dtype=np.complex128)
    if x < 1:
        return f
    f[1] = 1.0
    lo = 2
    # n // spf(n) < 2^k for n in [2^k, 2^(k+1)), so each dyadic block only reads finished entries
    while lo <= x:
        hi = min(2 * lo, x + 1)
        n = np.arange(lo, hi)
        p = spf[lo:hi]
        prime = p == n
        f[lo:hi] = np.where(prime, prime_values[lo:hi], f[p] * f[n // p])
        lo = hi
    return f


def divisor_sum(f: np.ndarray) -> np.ndarray:
    x = len(f) - 1
    h = np.zeros(x + 1, dtype=np.complex128)
    for d in range(1, x + 1):
        h[d::d] += f[d]
    return h


def convolve_conj(h: np.ndarray) -> np.ndarray:
    x = len(h) - 1
    g = np.zeros(x + 1, dtype=np.complex128)
    hc = np.conj(h)
    for d in range(1, x + 1):
        k = x // d
        g[d : d * k + 1 : d] += h[d] * hc[1 : k + 1]
    return g


def kahan_cumsum(v: np.ndarray) -> np.ndarray:
    # extended precision accumulation stands in for compensation here
    re = np.cumsum(v.real.astype(np.longdouble))
    im = np.cumsum(v.imag.astype(np.longdouble))
    return re.astype(np.float64) + 1j * im.astype(np.float64)


def distance_grid(logp, inv_p, re, im, ts) -> np.ndarray:
    out = np.empty(len(ts))
    chunk = max(1, 2_000_000 // max(len(logp), 1))
    for s in range(0, len(ts), chunk):
        th = np.outer(ts[s : s + chunk], logp)
        out[s : s + chunk] = (inv_p * (1.0 - (re * np.cos(th) + im * np.sin(th)))).sum(axis=1)
    return out
