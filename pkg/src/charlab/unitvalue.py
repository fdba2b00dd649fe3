"""Exact roots of unity (and zero), plus exact sums of them in cyclotomic coordinates."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


class UnitValue:
    """Either zero or e(a/m) with 0 <= a < m and gcd(a, m) = 1 (m = 1 for the value 1)."""

    __slots__ = ("a", "m")

    def __init__(self, a: int, m: int):
        if m < 0:
            raise ValueError("denominator must be nonnegative")
        if m == 0:
            self.a, self.m = 0, 0
            return
        a %= m
        g = math.gcd(a, m)
        self.a, self.m = a // g, m // g

    @classmethod
    def zero(cls) -> UnitValue:
        return cls(0, 0)

    @classmethod
    def root(cls, a: int, m: int) -> UnitValue:
        if m < 1:
            raise ValueError("root of unity needs m >= 1")
        return cls(a, m)

    @property
    def is_zero(self) -> bool:
        return self.m == 0

    @property
    def is_one(self) -> bool:
        return self.m == 1

    def __mul__(self, other: UnitValue) -> UnitValue:
        if self.m == 0 or other.m == 0:
            return UnitValue.zero()
        m = self.m * other.m // math.gcd(self.m, other.m)
        return UnitValue(self.a * (m // self.m) + other.a * (m // other.m), m)

    def __pow__(self, k: int) -> UnitValue:
        if self.m == 0:
            if k <= 0:
                raise ZeroDivisionError("0 to a nonpositive power")
            return self
        return UnitValue(self.a * k, self.m)

    def conjugate(self) -> UnitValue:
        return self if self.m == 0 else UnitValue(-self.a, self.m)

    def __eq__(self, other) -> bool:
        if isinstance(other, UnitValue):
            return self.a == other.a and self.m == other.m
        if isinstance(other, (int, float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.m))

    def __complex__(self) -> complex:
        if self.m == 0:
            return 0j
        return complex(root_of_unity(self.a, self.m))

    def __repr__(self):
        return "Zero" if self.m == 0 else f"Root({self.a},{self.m})"


def root_of_unity(a: int, m: int) -> complex:
    """e(a/m), exact at multiples of 1/4."""
    a %= m
    if (4 * a) % m == 0:
        return (1, 1j, -1, -1j)[4 * a // m]
    th = 2 * math.pi * a / m
    return complex(math.cos(th), math.sin(th))


def roots_table(m: int) -> np.ndarray:
    """Array of e(k/m) for k = 0..m-1, exact at quarter turns."""
    return _roots_table(m).copy()


@lru_cache(maxsize=256)
def _roots_table(m: int) -> np.ndarray:
    k = np.arange(m)
    out = np.exp(2j * np.pi * k / m)
    quarter = (4 * k) % m == 0
    out[quarter] = np.array([1, 1j, -1, -1j])[(4 * k[quarter]) // m]
    out.setflags(write=False)
    return out


def phases_to_complex(num: np.ndarray, m: int) -> np.ndarray:
    """Map phase numerators (k means e(k/m), -1 means zero) to complex values."""
    roots = _roots_table(m)
    out = np.zeros(num.shape, dtype=np.complex128)
    nz = num >= 0
    out[nz] = roots[num[nz]]
    return out


# -- exact cyclotomic integers ---------------------------------------------------


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (lowest degree first) of the n-th cyclotomic polynomial."""
    # x^n - 1 divided by Phi_d for every proper divisor d
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _divide_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _divide_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            out[i - dn] = c
            for j in range(dn + 1):
                num[i - dn + j] -= c * den[j]
    if any(num[:dn]):
        raise ArithmeticError("inexact polynomial division")
    return out


def reduce_cyclotomic(coeffs, n: int) -> tuple[int, ...]:
    """Canonical form of sum_j coeffs[j] * e(j/n): remainder modulo Phi_n.

    Two integer combinations of n-th roots of unity are equal iff their reduced
    forms agree.
    """
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    c = [int(v) for v in coeffs]
    if len(c) < deg:
        c += [0] * (deg - len(c))
    for i in range(len(c) - 1, deg - 1, -1):
        lead = c[i]
        if lead:
            for j in range(deg + 1):
                c[i - deg + j] -= lead * phi[j]
    return tuple(c[:deg])


class CyclotomicInteger:
    """Exact element of Z[e(1/n)], stored as a count vector over the n-th roots."""

    __slots__ = ("n", "counts")

    def __init__(self, n: int, counts=None):
        self.n = n
        self.counts = [0] * n if counts is None else [int(v) for v in counts]

    def add_root(self, k: int, times: int = 1) -> None:
        self.counts[k % self.n] += times

    def add_unit(self, v: UnitValue) -> None:
        if v.is_zero:
            return
        if self.n % v.m:
            raise ValueError(f"e({v.a}/{v.m}) is not an {self.n}-th root of unity")
        self.add_root(v.a * (self.n // v.m))

    def copy(self) -> CyclotomicInteger:
        return CyclotomicInteger(self.n, self.counts)

    def canonical(self) -> tuple[int, ...]:
        return reduce_cyclotomic(self.counts, self.n)

    def is_zero(self) -> bool:
        return not any(self.canonical())

    def __eq__(self, other) -> bool:
        if not isinstance(other, CyclotomicInteger):
            return NotImplemented
        if self.n != other.n:
            raise ValueError("compare cyclotomic integers over a common n")
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash((self.n, self.canonical()))

    def __complex__(self) -> complex:
        roots = _roots_table(self.n)
        return complex(np.dot(np.asarray(self.counts, dtype=float), roots))

    def __repr__(self):
        return f"CyclotomicInteger(n={self.n}, canonical={self.canonical()})"
