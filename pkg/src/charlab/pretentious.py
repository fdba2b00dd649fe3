"""Pretentious distances between completely multiplicative functions.

A ``MultiplicativeModel`` is a completely multiplicative function given by its
values at the primes up to some bound. Distances are always reported squared.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import arith, kernels
from .arith import ResourceError
from .characters import DirichletCharacter, conjugate, enumerate_characters, multiply
from .unitvalue import UnitValue

MEAN_VALUE_LIMIT = 10**7
GOLDEN = (math.sqrt(5) - 1) / 2
_SCALE_BITS = 160  # fixed-point precision for rational distance terms


@dataclass
class MultiplicativeModel:
    """Values f(p) at the primes p <= x_max.

    ``kind`` is one of "character", "synthetic", "twisted". ``exact`` holds UnitValues
    when the values are roots of unity or zero.
    """

    x_max: int
    primes: np.ndarray
    values: np.ndarray
    kind: str = "synthetic"
    name: str = ""
    exact: list[UnitValue] | None = None
    character: DirichletCharacter | None = None

    def __post_init__(self):
        mods = np.abs(self.values)
        bad = np.minimum(np.abs(mods), np.abs(mods - 1)) > 1e-12
        if np.any(bad):
            raise ValueError("model values must have modulus 0 or 1")

    # constructors

    @classmethod
    def from_character(cls, chi: DirichletCharacter, x: int) -> MultiplicativeModel:
        primes = arith.primes_up_to(x)
        num, order = chi.phase_table()
        ph = num[primes % chi.q]
        exact = [UnitValue(int(k), order) if k >= 0 else UnitValue.zero() for k in ph]
        vals = np.array([complex(v) for v in exact], dtype=np.complex128)
        return cls(int(x), primes, vals, "character", chi.label, exact, chi)

    @classmethod
    def constant_root(cls, a: int, m: int, x: int, name: str | None = None) -> MultiplicativeModel:
        """f(p) = e(a/m) at every prime."""
        primes = arith.primes_up_to(x)
        v = UnitValue.root(a, m)
        return cls(int(x), primes, np.full(len(primes), complex(v)), "synthetic",
                   name or f"root:{a}/{m}", [v] * len(primes))

    @classmethod
    def one(cls, x: int) -> MultiplicativeModel:
        return cls.constant_root(0, 1, x, "one")

    @classmethod
    def minus_one(cls, x: int) -> MultiplicativeModel:
        return cls.constant_root(1, 2, x, "minus-one")

    @classmethod
    def archimedean(cls, t: float, x: int) -> MultiplicativeModel:
        """f(p) = p^(it)."""
        primes = arith.primes_up_to(x)
        return cls(int(x), primes, np.exp(1j * t * np.log(primes)), "twisted", f"n^(i*{t})")

    # derived models

    def tilde(self) -> MultiplicativeModel:
        """Zeros replaced by 1."""
        vals = np.where(np.abs(self.values) < 0.5, 1.0 + 0j, self.values)
        exact = None
        if self.exact is not None:
            exact = [UnitValue(0, 1) if v.is_zero else v for v in self.exact]
        return MultiplicativeModel(self.x_max, self.primes, vals, self.kind, self.name + "~", exact)

    def upto(self, x: float) -> tuple[np.ndarray, np.ndarray]:
        if x > self.x_max:
            raise ValueError(f"model {self.name!r} is defined only up to {self.x_max}, asked for {x}")
        k = int(np.searchsorted(self.primes, math.floor(x), side="right"))
        return self.primes[:k], self.values[:k]

    def value_at_prime(self, p: int) -> complex:
        i = int(np.searchsorted(self.primes, p))
        if i >= len(self.primes) or self.primes[i] != p:
            raise ValueError(f"{p} is not a tabulated prime")
        return complex(self.values[i])

    def exact_at_prime(self, p: int) -> UnitValue | None:
        if self.exact is None:
            return None
        i = int(np.searchsorted(self.primes, p))
        return self.exact[i]

    def extend(self, x: int) -> np.ndarray:
        """f(n) for n = 0..x (f(0) = 0), extended completely multiplicatively."""
        if x > self.x_max:
            raise ValueError(f"model {self.name!r} covers primes up to {self.x_max} only")
        spf = arith.spf_table(x)
        pv = np.zeros(x + 1, dtype=np.complex128)
        ps, vs = self.upto(x)
        pv[ps] = vs
        return kernels.extend_multiplicative(pv, spf, x)

    @cached_property
    def _logs(self) -> np.ndarray:
        return np.log(self.primes.astype(float))


# -- distances ----------------------------------------------------------------


def distance(f1: MultiplicativeModel, f2: MultiplicativeModel, x: float, exclude_r: int = 1) -> float:
    """Squared pretentious distance: sum over p <= x, p not dividing r, of (1 - Re f1(p) conj f2(p))/p."""
    if x < 2:
        raise ValueError("x must be at least 2")
    p1, v1 = f1.upto(x)
    p2, v2 = f2.upto(x)
    keep = np.gcd(p1, exclude_r) == 1 if exclude_r != 1 else np.ones(len(p1), dtype=bool)
    if f1.exact is not None and f2.exact is not None:
        # exact products: terms 0, 1/p, 2/p are summed in integers, the rest in floats
        one, minus = UnitValue(0, 1), UnitValue(1, 2)
        acc, rest = 0, []
        for p, a, b, k in zip(p1.tolist(), f1.exact, f2.exact, keep.tolist()):
            if not k:
                continue
            v = a * b.conjugate()
            if v == one:
                continue
            if v.is_zero or v == minus:
                acc += ((2 if not v.is_zero else 1) << _SCALE_BITS) // p
            else:
                rest.append((1.0 - complex(v).real) / p)
        exact = Fraction(acc, 1 << _SCALE_BITS)
        hi = float(exact)
        return math.fsum([hi, float(exact - hi), *rest])
    re = (v1 * np.conj(v2)).real
    terms = ((1.0 - re) / p1)[keep]
    return math.fsum(terms.tolist())


def _objective(f: MultiplicativeModel, x: float):
    ps, vs = f.upto(x)
    logp = np.log(ps.astype(float))
    inv = 1.0 / ps
    re = np.ascontiguousarray(vs.real)
    im = np.ascontiguousarray(vs.imag)

    def grid(ts: np.ndarray) -> np.ndarray:
        return kernels.distance_grid(logp, inv, re, im, np.ascontiguousarray(ts, dtype=float))

    def at(t: float) -> float:
        return float(grid(np.array([t]))[0])

    return grid, at


@dataclass
class DistanceReport:
    x: float
    T: float
    d0_squared: float
    t_star: float
    d_min_squared: float
    grid_spacing: float
    refinement_iterations: int
    c_gs: float
    lam: float = field(init=False)
    eta: float = field(init=False)

    def __post_init__(self):
        self.lam = self.d_min_squared + math.log1p(abs(self.t_star)) + self.c_gs
        self.eta = 1.0 / (self.lam * math.exp(self.lam))


def min_distance_over_t(f: MultiplicativeModel, x: float, T: float, c_gs: float = 2.0,
                        resolution: float = 1e-6) -> DistanceReport:
    """min over |t| <= T of D(f, n^it; x)^2: grid at spacing 1/(4 log x), then golden-section."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    grid, at = _objective(f, x)
    d0 = distance(f, MultiplicativeModel.one(int(math.floor(x))), x)
    spacing = 1.0 / (4.0 * math.log(x))
    if T == 0:
        return DistanceReport(x, T, d0, 0.0, d0, spacing, 0, c_gs)
    n = int(math.ceil(2 * T / spacing)) + 1
    ts = np.union1d(np.linspace(-T, T, n), [0.0])
    vals = grid(ts)
    i = int(np.argmin(vals))
    best_t, best_v = float(ts[i]), float(vals[i])
    if best_v >= d0:
        best_t, best_v = 0.0, d0
    lo = float(ts[max(i - 1, 0)])
    hi = float(ts[min(i + 1, len(ts) - 1)])
    iters = 0
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = at(c), at(d)
    while b - a > resolution:
        iters += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = at(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = at(d)
    t_ref = (a + b) / 2
    v_ref = at(t_ref)
    if v_ref < best_v:
        best_t, best_v = t_ref, v_ref
    return DistanceReport(x, T, d0, best_t, best_v, spacing, iters, c_gs)


def mean_value(f: MultiplicativeModel, x: int) -> complex:
    """(1/x) sum_{n <= x} f(n)."""
    if x > MEAN_VALUE_LIMIT:
        raise ResourceError(f"mean values are sieved only up to {MEAN_VALUE_LIMIT:.0e}")
    vals = f.extend(int(x))
    return complex(kernels.kahan_cumsum(vals)[-1]) / x


def hmt_bound(f: MultiplicativeModel, x: int, T: float) -> tuple[float, float, float]:
    """(bound, mean, ratio) with bound = D e^-D + 1/sqrt(T), D the minimal twisted distance."""
    if T <= 0:
        raise ValueError("T must be positive")
    if x > MEAN_VALUE_LIMIT:
        raise ResourceError(f"mean values are sieved only up to {MEAN_VALUE_LIMIT:.0e}")
    rep = min_distance_over_t(f, x, T)
    D = rep.d_min_squared
    bound = D * math.exp(-D) + 1.0 / math.sqrt(T)
    mean = abs(mean_value(f, x))
    return bound, mean, mean / bound


def _check_order(f: MultiplicativeModel, k: int) -> None:
    if f.exact is not None:
        bad = [v for v in f.exact if not v.is_zero and (v**k) != UnitValue(0, 1)]
        if bad:
            raise ValueError(f"f(p)^{k} != 1 at some prime (value {bad[0]})")
        return
    nz = np.abs(f.values) > 0.5
    if np.any(np.abs(f.values[nz] ** k - 1) > 1e-12):
        raise ValueError(f"f(p)^{k} != 1 at some prime")


def equiv_gap(f: MultiplicativeModel, x: float, T: float, k: int) -> tuple[float, float, float]:
    """(lhs, rhs_core, gap) for min_t D(f~, n^it; x) against min(sqrt(log log x), D(f~, 1; x)) / 2k.

    Zeros of f are replaced by 1 first, so the function is mu_k-valued.
    """
    if k < 1:
        raise ValueError("k must be positive")
    _check_order(f, k)
    ft = f.tilde()
    rep = min_distance_over_t(ft, x, T)
    lhs = math.sqrt(max(rep.d_min_squared, 0.0))
    rhs = min(math.sqrt(math.log(math.log(x))), math.sqrt(max(rep.d0_squared, 0.0))) / (2 * k)
    return lhs, rhs, lhs - rhs


# -- twists by small-conductor characters ------------------------------------------


@dataclass
class TwistEntry:
    conductor: int
    label: str
    order: int
    parity: int
    distance: float  # min over |t| <= T of D(chi conj(psi), n^it; q)^2
    t_star: float
    threshold: float
    below: bool


@dataclass
class OrdersReport:
    q: int
    chi: str
    g: int
    psi: str
    k: int
    m: int
    T: float
    distance: float
    t_star: float
    threshold: float
    cond_i: bool
    cond_ii: bool
    both_hold: bool
    regime_ok: bool
    scanned: list[TwistEntry]
    below_threshold: int
    nearest: TwistEntry | None


def _twist_distance(chi: DirichletCharacter, psi: DirichletCharacter, T: float) -> DistanceReport:
    q = chi.q
    model = MultiplicativeModel.from_character(multiply(chi, conjugate(psi)), q)
    return min_distance_over_t(model, q, T)


def small_primitive_characters(bound: float) -> list[DirichletCharacter]:
    """Non-trivial primitive characters of conductor <= bound, by (conductor, exponents)."""
    out = []
    for m in range(2, int(math.floor(bound)) + 1):
        out.extend(c for c in enumerate_characters(m, primitive_only=True) if not c.is_principal)
    return out


def twist_scan(chi: DirichletCharacter, T: float, conductor_bound: float | None = None) -> list[TwistEntry]:
    """Distances from chi to every non-trivial primitive psi of conductor <= log q."""
    q = chi.q
    bound = math.log(q) if conductor_bound is None else conductor_bound
    g = chi.order
    loglog = math.log(math.log(q)) if q > math.e else 0.0
    entries = []
    for psi in small_primitive_characters(bound):
        rep = _twist_distance(chi, psi, T)
        thr = loglog / (3.0 * (g * psi.order) ** 2)
        entries.append(TwistEntry(psi.q, psi.label, psi.order, psi.parity, rep.d_min_squared,
                                  rep.t_star, thr, rep.d_min_squared <= thr))
    return entries


def nearest_twist(entries: list[TwistEntry]) -> TwistEntry | None:
    if not entries:
        return None
    return min(entries, key=lambda e: (e.distance, e.conductor, e.label))


def orders_report(chi: DirichletCharacter, psi: DirichletCharacter, T: float) -> OrdersReport:
    """Finite-scale readout of the order dichotomy for chi (order g) against psi (order k)."""
    q = chi.q
    g, k, m = chi.order, psi.order, psi.q
    regime_ok = m <= math.log(q)
    if not regime_ok:
        warnings.warn(f"conductor {m} exceeds log q = {math.log(q):.3f}", stacklevel=2)
    rep = _twist_distance(chi, psi, T)
    thr = math.log(math.log(q)) / (3.0 * (g * k) ** 2)
    cond_i = rep.d_min_squared <= thr
    cond_ii = g % k != 0
    scanned = twist_scan(chi, T)
    return OrdersReport(
        q=q, chi=chi.label, g=g, psi=psi.label, k=k, m=m, T=T,
        distance=rep.d_min_squared, t_star=rep.t_star, threshold=thr,
        cond_i=cond_i, cond_ii=cond_ii, both_hold=cond_i and cond_ii, regime_ok=regime_ok,
        scanned=scanned, below_threshold=sum(e.below for e in scanned), nearest=nearest_twist(scanned),
    )
