"""Number-theoretic substrate: factorization, totients, orders, primitive roots.

Everything here is pure. The smallest-prime-factor sieve is cached per process
(and optionally on disk under ``$CHARLAB_CACHE_DIR``) and is read-only once built.
"""
from __future__ import annotations

import math
import os
import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from pathlib import Path

import numpy as np

from . import kernels

MAX_FACTOR_INPUT = 2**64
PRIME_SUM_LIMIT = 10**9
SPF_DEFAULT_LIMIT = 10**7

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class ResourceError(RuntimeError):
    """A request exceeds a documented size limit."""


@dataclass(frozen=True)
class FactoredModulus:
    q: int
    factors: tuple[tuple[int, int], ...]
    phi: int = field(init=False)
    radical: int = field(init=False)
    prime_recip_sum: Fraction = field(init=False)

    def __post_init__(self):
        phi = 1
        rad = 1
        for p, e in self.factors:
            phi *= p ** (e - 1) * (p - 1)
            rad *= p
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "radical", rad)
        object.__setattr__(
            self, "prime_recip_sum", sum((Fraction(1, p) for p, _ in self.factors), Fraction(0))
        )

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def prime_powers(self) -> tuple[int, ...]:
        return tuple(p**e for p, e in self.factors)

    def __int__(self):
        return self.q


# -- primality and factorization ---------------------------------------------

_SMALL_PRIMES: list[int] = []


def _small_primes() -> list[int]:
    if not _SMALL_PRIMES:
        _SMALL_PRIMES.extend(primes_up_to(1 << 16).tolist())
    return _SMALL_PRIMES


def is_prime(n: int) -> bool:
    """Miller-Rabin with the first 13 primes as witnesses (deterministic below 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _factor_into(n: int, out: dict[int, int], rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n, rng)
    _factor_into(d, out, rng)
    _factor_into(n // d, out, rng)


@lru_cache(maxsize=65536)
def factorize(n: int) -> FactoredModulus:
    """Complete factorization of ``n``: trial division, then Pollard-Brent above 10^12."""
    n = int(n)
    if n <= 0:
        raise ValueError(f"factorize needs a positive integer, got {n}")
    if n >= MAX_FACTOR_INPUT:
        raise ResourceError(f"factorize supports n < 2^64, got {n}")
    found: dict[int, int] = {}
    m = n
    spf = _cached_spf()
    if spf is not None and m < len(spf):
        while m > 1:
            p = int(spf[m])
            found[p] = found.get(p, 0) + 1
            m //= p
    else:
        for p in _small_primes():
            if p * p > m:
                break
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                found[p] = e
        if m > 1:
            if m < (1 << 32) or is_prime(m):
                # below 2^32 every leftover cofactor of trial division up to 2^16 is prime
                found[m] = found.get(m, 0) + 1
            else:
                _factor_into(m, found, random.Random(m))
    return FactoredModulus(n, tuple(sorted(found.items())))


def as_modulus(q: int | FactoredModulus) -> FactoredModulus:
    return q if isinstance(q, FactoredModulus) else factorize(q)


def euler_phi(n: int) -> int:
    return factorize(n).phi


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def mobius(n: int) -> int:
    fm = factorize(n)
    if any(e > 1 for _, e in fm.factors):
        return 0
    return -1 if len(fm.factors) % 2 else 1


def crt(residues, moduli) -> int:
    """Combine pairwise-coprime congruences x = r_i (mod m_i)."""
    x, m = 0, 1
    for r, mi in zip(residues, moduli):
        inv = pow(m, -1, mi) if mi > 1 else 0
        x = x + m * ((r - x) * inv % mi)
        m *= mi
    return x % m


def lcm(*args: int) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), args, 1)


# -- group structure -----------------------------------------------------------


def multiplicative_order(a: int, m: int | FactoredModulus) -> int:
    """Least d >= 1 with a^d = 1 (mod q), by stripping prime factors off phi(q)."""
    m = as_modulus(m)
    q = m.q
    if math.gcd(a, q) != 1:
        raise ValueError(f"{a} is not a unit modulo {q}")
    if q == 1:
        return 1
    d = m.phi
    for p, _ in factorize(m.phi).factors:
        while d % p == 0 and pow(a, d // p, q) == 1:
            d //= p
    return d


@lru_cache(maxsize=None)
def primitive_root(p: int, e: int = 1) -> int:
    """Smallest primitive root modulo p^e, p odd."""
    if p == 2:
        raise ValueError("no primitive root convention for powers of 2 here; see unit_group_generators")
    pe = p**e
    phi = pe // p * (p - 1)
    qs = factorize(phi).primes
    for g in range(2, pe):
        if g % p == 0:
            continue
        if all(pow(g, phi // r, pe) != 1 for r in qs):
            return g
    raise ArithmeticError(f"no primitive root mod {p}^{e}")  # pragma: no cover


@lru_cache(maxsize=None)
def unit_group_generators(p: int, e: int) -> tuple[tuple[int, int], ...]:
    """Fixed generator basis of (Z/p^e)^*, as (generator, order) pairs.

    Odd p: the smallest primitive root. 2^1: no generators. 2^2: (3, 2).
    2^e with e >= 3: (-1 as 2^e - 1, 2) then (5, 2^(e-2)). Character labels are
    exponent lists against exactly this basis.
    """
    if e < 1 or p < 2 or not is_prime(p):
        raise ValueError(f"invalid prime power {p}^{e}")
    if p == 2:
        if e == 1:
            return ()
        if e == 2:
            return ((3, 2),)
        return ((2**e - 1, 2), (5, 2 ** (e - 2)))
    return ((primitive_root(p, e), p ** (e - 1) * (p - 1)),)


# -- counting ------------------------------------------------------------------


def coprime_count(t: int, q: int | FactoredModulus) -> int:
    """#{1 <= n <= t : gcd(n, q) = 1} by Moebius inversion over divisors of rad(q)."""
    q = as_modulus(q)
    if t < 0:
        raise ValueError("t must be nonnegative")
    total = 0
    ps = q.primes
    for mask in range(1 << len(ps)):
        d, sign = 1, 1
        for i, p in enumerate(ps):
            if mask >> i & 1:
                d *= p
                sign = -sign
        total += sign * (t // d)
    return total


# -- sieves --------------------------------------------------------------------


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array."""
    n = int(n)
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _segmented_prime_sums(x: int, weight=None) -> float:
    base = primes_up_to(math.isqrt(x) + 1)
    seg = 1 << 23
    parts: list[float] = []
    lo = 2
    while lo <= x:
        hi = min(lo + seg, x + 1)
        block = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, (lo + p - 1) // p * p)
            block[start - lo :: p] = False
        ps = np.flatnonzero(block) + lo
        if weight is None:
            parts.append(math.fsum((1.0 / ps).tolist()))
        else:
            w = np.asarray(weight(ps), dtype=float)
            parts.append(math.fsum((w / ps).tolist()))
        lo = hi
    return math.fsum(parts)


def mertens_prime_sum(x: float, weight=None) -> float:
    """Sum of w(p)/p over primes p <= x (w = 1 by default).

    ``weight`` is a vectorized callable on an int array of primes.
    """
    if x < 2:
        raise ValueError("x must be at least 2")
    if x > PRIME_SUM_LIMIT:
        raise ResourceError(f"prime sums are sieved only up to {PRIME_SUM_LIMIT:.0e}")
    return _segmented_prime_sums(int(x), weight)


_SPF_LOCK = threading.Lock()
_SPF: np.ndarray | None = None


def _cached_spf() -> np.ndarray | None:
    return _SPF


def spf_table(n: int) -> np.ndarray:
    """Smallest-prime-factor table covering 0..n (may be longer). Cached, read-only."""
    global _SPF
    n = int(n)
    with _SPF_LOCK:
        if _SPF is not None and len(_SPF) > n:
            return _SPF
        size = max(n, min(SPF_DEFAULT_LIMIT, max(n, 1 << 16)))
        table = _load_spf(size)
        if table is None:
            table = kernels.spf_sieve(size)
            _store_spf(table)
        table.setflags(write=False)
        _SPF = table
        return table


def _cache_path(size: int) -> Path | None:
    root = os.environ.get("CHARLAB_CACHE_DIR")
    if not root:
        return None
    return Path(root) / f"spf_{size}.npy"


def _load_spf(size: int) -> np.ndarray | None:
    path = _cache_path(size)
    if path is None or not path.exists():
        return None
    try:
        return np.load(path)
    except (OSError, ValueError):
        return None


def _store_spf(table: np.ndarray) -> None:
    path = _cache_path(len(table) - 1)
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp.npy")
    np.save(tmp, table)
    os.replace(tmp, path)
