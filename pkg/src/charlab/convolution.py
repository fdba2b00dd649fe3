"""Divisor-sieve convolutions h = 1*f and g = h*conj(h), the Fejer kernel, Dickman's rho,
and the mean-value reporters built on them.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import arith, kernels
from .arith import FactoredModulus, ResourceError
from .pretentious import MultiplicativeModel

TABLE_LIMIT = 10**7


@dataclass
class ConvolutionTable:
    """Dense tables of f, h = 1*f and g = 1*1*f*conj(f) on 0..x (index 0 unused)."""

    x: int
    model: MultiplicativeModel
    f: np.ndarray
    h: np.ndarray
    g: np.ndarray  # real part of the complex convolution
    g_imag_max: float

    def check_invariants(self, tol: float = 1e-9) -> dict:
        tau = divisor_counts(self.x)
        habs = np.abs(self.h[1:])
        return {
            "g_imag_max": self.g_imag_max,
            "g_min": float(self.g[1:].min()),
            "h_over_tau_max": float((habs - tau[1:]).max()),
            "ok": self.g_imag_max <= tol and self.g[1:].min() >= -tol
            and bool(np.all(habs <= tau[1:] + tol)),
        }


def build_convolution(f: MultiplicativeModel, x: int) -> ConvolutionTable:
    x = int(x)
    if x > TABLE_LIMIT:
        raise ResourceError(f"convolution tables are dense; x <= {TABLE_LIMIT:.0e}")
    if x < 1:
        raise ValueError("x must be positive")
    fv = f.extend(x)
    h = kernels.divisor_sum(fv)
    gc = kernels.convolve_conj(h)
    g = np.ascontiguousarray(gc.real)
    return ConvolutionTable(x, f, fv, h, g, float(np.abs(gc.imag).max()))


def divisor_counts(x: int) -> np.ndarray:
    return kernels.divisor_sum(np.ones(x + 1, dtype=np.complex128)).real


# -- Fejer kernel -----------------------------------------------------------------


def fejer_kernel(N: int, t: float) -> float:
    """K_N(t) = (1/N) (sin(pi N t)/sin(pi t))^2, equal to N at integers."""
    if N < 1:
        raise ValueError("N must be positive")
    s = math.sin(math.pi * t)
    if abs(s) < 1e-6:
        return fejer_kernel_sum(N, t)
    return (math.sin(math.pi * N * t) / s) ** 2 / N


def fejer_kernel_sum(N: int, t: float) -> float:
    """sum_{|j| < N} (1 - |j|/N) e(jt), real part (the imaginary part cancels)."""
    j = np.arange(1, N)
    return 1.0 + 2.0 * math.fsum(((1 - j / N) * np.cos(2 * math.pi * j * t)).tolist())


def _theta(f: MultiplicativeModel, p: int) -> float | None:
    ex = f.exact_at_prime(p)
    if ex is not None:
        return None if ex.is_zero else ex.a / ex.m
    v = f.value_at_prime(p)
    return None if abs(v) < 0.5 else math.atan2(v.imag, v.real) / (2 * math.pi)


def _g_prime_powers(fp: complex, kmax: int) -> list[complex]:
    # h(p^j) = sum_{u <= j} f(p)^u and g(p^k) = sum_j h(p^j) conj(h(p^(k-j)))
    hp, acc, pw = [], 0j, 1 + 0j
    for _ in range(kmax + 1):
        acc += pw
        hp.append(acc)
        pw *= fp
    return [sum(hp[j] * hp[k - j].conjugate() for j in range(k + 1)) for k in range(kmax + 1)]


def prime_power_closed_form(theta: float | None, k: int) -> float:
    """g(p^k) for f(p) = e(theta): sum over 0 <= j <= k/2 of (k+1-2j) K_{k+1-2j}(theta).

    The coefficient of e(w theta) in g(p^k) is floor((k-|w|+2)^2/4); its second
    differences in |w| pick out every other kernel. ``theta=None`` stands for
    f(p) = 0, where g(p^k) = k + 1.
    """
    if theta is None:
        return float(k + 1)
    return math.fsum(N * fejer_kernel(N, theta) for N in range(k + 1, 0, -2))


def prime_power_identity_check(f: MultiplicativeModel, p: int, kmax: int,
                               table: ConvolutionTable | None = None, closed_form: str = "single") -> float:
    """max over 1 <= k <= kmax of |g(p^k) - closed form|.

    ``closed_form="single"`` compares with (k+1) K_{k+1}(theta_p), which agrees with g
    only for k <= 1; ``"mixture"`` compares with the exact kernel combination.
    When f(p) = 0 both forms are k + 1.
    """
    if closed_form not in ("single", "mixture"):
        raise ValueError(f"unknown closed form {closed_form!r}")
    th = _theta(f, p)
    if table is not None and p**kmax <= table.x:
        gs = [complex(table.g[p**k]) for k in range(kmax + 1)]
    else:
        gs = _g_prime_powers(f.value_at_prime(p), kmax)
    worst = 0.0
    for k in range(1, kmax + 1):
        if th is None:
            expected = k + 1
        elif closed_form == "single":
            expected = (k + 1) * fejer_kernel(k + 1, th)
        else:
            expected = prime_power_closed_form(th, k)
        worst = max(worst, abs(gs[k] - expected))
    return worst


# -- logarithmic means -------------------------------------------------------------


def _max_log_mean(fv: np.ndarray, lo: int, hi: int) -> float:
    """max over integers y in [lo, hi] of |(1/log y) sum_{n <= y} f(n)/n|."""
    lo = max(lo, 2)
    n = np.arange(len(fv), dtype=float)
    n[0] = 1.0
    cum = kernels.kahan_cumsum(np.ascontiguousarray(fv / n))
    ys = np.arange(lo, hi + 1)
    return float((np.abs(cum[ys]) / np.log(ys)).max())


def _table_for(f: MultiplicativeModel, x: int, table: ConvolutionTable | None) -> ConvolutionTable:
    if table is not None and table.x >= x:
        return table
    return build_convolution(f, x)


def revtonn_check(f: MultiplicativeModel, t: int, t0: int = 100,
                  table: ConvolutionTable | None = None) -> tuple[float, float, float]:
    """(lhs, rhs_core, ratio) for the two-sided bound relating log means of f to the mean of g."""
    if t < t0:
        raise ValueError(f"t = {t} is below the configured t0 = {t0}")
    t = int(t)
    tab = _table_for(f, t, table)
    L = math.log(t)
    lhs = _max_log_mean(tab.f[: t + 1], math.isqrt(t - 1) + 1, t) + 1.0 / L
    rhs = math.fsum(tab.g[1 : t + 1].tolist()) / t / L**3
    return lhs, rhs, lhs / rhs


# -- Dickman-de Bruijn ---------------------------------------------------------------

DICKMAN_MAX_U = 50.0
DICKMAN_STEP = 1e-3
_RHO_LOCK = threading.Lock()
_RHO: dict[str, object] = {}


def _rho_grid(h: float, umax: float) -> np.ndarray:
    # trapezoid on u rho(u) = int_{u-1}^{u} rho(s) ds; every term is positive, so
    # small values keep their relative accuracy far out in u
    n1 = int(round(1 / h))
    K = int(round(umax / h))
    rho = np.ones(K + 1)
    if K <= n1:
        return rho
    out = rho.tolist()
    inner = math.fsum(out[1:n1])  # rho_{k-n1+1} + ... + rho_{k-1} for k = n1 + 1
    for k in range(n1 + 1, K + 1):
        inner += out[k - 1]
        inner -= out[k - n1]
        out[k] = h * (out[k - n1] / 2 + inner) / (k * h - h / 2)
        if k % n1 == 0:
            inner = math.fsum(out[k - n1 + 1 : k])
    return np.array(out)


def _rho_table() -> np.ndarray:
    with _RHO_LOCK:
        if "rho" not in _RHO:
            coarse = _rho_grid(DICKMAN_STEP, DICKMAN_MAX_U)
            fine = _rho_grid(DICKMAN_STEP / 2, DICKMAN_MAX_U)
            diff = np.abs(fine[::2] - coarse)
            if diff.max() > 1e-7:
                raise ArithmeticError(f"rho integrator step check failed ({diff.max():.2e})")
            _RHO["rho"] = coarse
            _RHO["diff"] = diff
        return _RHO["rho"]  # type: ignore[return-value]


def dickman_step_check(umax: float = DICKMAN_MAX_U) -> float:
    """Largest disagreement between the 1e-3 and 5e-4 step solutions on [0, umax]."""
    _rho_table()
    diff = _RHO["diff"]
    return float(diff[: int(round(umax / DICKMAN_STEP)) + 1].max())  # type: ignore[index]


def dickman_rho(u: float) -> float:
    """rho(u) from u rho'(u) = -rho(u-1), rho = 1 on [0, 1]."""
    if u < 0:
        raise ValueError("rho is defined for u >= 0")
    if u > DICKMAN_MAX_U:
        raise ResourceError(f"rho is tabulated for u <= {DICKMAN_MAX_U}")
    if u <= 1:
        return 1.0
    rho = _rho_table()
    h = DICKMAN_STEP
    k = int(math.floor(u / h + 1e-9))
    uk = k * h
    if u - uk < 1e-12:
        return float(rho[k])
    return float(rho[k] - (u - uk) / 2 * (dickman_rho(uk - 1) / uk + dickman_rho(u - 1) / u))


def sigma_minus(u: float) -> float:
    return u * dickman_rho(u)


def hildebrand_lower(f: MultiplicativeModel, x: int,
                     table: ConvolutionTable | None = None) -> tuple[float, float]:
    """(lower, actual): the smooth-number lower expression for the mean of g, and the mean itself."""
    tab = _table_for(f, x, table)
    ps = arith.primes_up_to(x)
    gp = tab.g[ps]
    s1 = math.fsum(((gp - 1) / ps).tolist())
    s2 = math.fsum((np.maximum(0.0, 1 - gp) / ps).tolist())
    lower = math.exp(s1) * sigma_minus(math.exp(s2))
    actual = math.fsum(tab.g[1 : x + 1].tolist()) / x
    return lower, actual


# -- growth families and Q(xi) ---------------------------------------------------------


def _iterated_log(t: float, k: int) -> float:
    for _ in range(k):
        if t <= 0:
            raise ValueError("iterated logarithm undefined here")
        t = math.log(t)
    return t


@dataclass(frozen=True)
class XiFamily:
    """A named growth function t -> xi(t). ``t0`` marks where it is positive and non-decreasing."""

    name: str
    kind: str
    params: tuple
    fn: Callable[[float], float] = field(compare=False, repr=False)
    t0: float = 0.0

    def __call__(self, t: float) -> float:
        return self.fn(t)

    @classmethod
    def log_power(cls, k: int, A: float) -> XiFamily:
        """(log_k t)^A with log_k the k-fold logarithm."""
        t0 = 1.0
        for _ in range(k):
            t0 = math.exp(t0)
        return cls(f"log-power:{k},{A:g}", "log-power", (k, A),
                   lambda t: _iterated_log(t, k) ** A, t0)

    @classmethod
    def nested_xi(cls, g: int, a: XiFamily) -> XiFamily:
        """(log a(t) / (13 log log a(t)))^(1/(19 g^2))."""

        def fn(t: float) -> float:
            at = a(t)
            if at <= math.e:
                raise ValueError(f"inner growth {a.name} is {at} at t = {t}; needs a(t) > e")
            return (math.log(at) / (13 * math.log(math.log(at)))) ** (1.0 / (19 * g * g))

        return cls(f"nested-xi:{g},{a.name}", "nested-xi", (g, a.name), fn, _threshold(a, math.exp(math.e)))

    @classmethod
    def parse(cls, spec: str) -> XiFamily:
        named = {"log2-quarter": (2, 0.25), "log2-half": (2, 0.5), "log3-one": (3, 1.0)}
        if spec in named:
            return cls.log_power(*named[spec])
        kind, _, rest = spec.partition(":")
        if kind == "log-power":
            k, A = rest.split(",")
            return cls.log_power(int(k), float(A))
        if kind == "nested-xi":
            g, inner = rest.split(",", 1)
            return cls.nested_xi(int(g), cls.parse(inner))
        raise ValueError(f"unknown growth family {spec!r}")


def _threshold(a: XiFamily, level: float) -> float:
    """Smallest t (to bisection precision) with a(t) >= level; a is non-decreasing past a.t0."""

    def ok(s: float) -> bool:
        try:
            return a(math.exp(s)) >= level
        except ValueError:
            return False

    lo = math.log(max(a.t0, 1.0))
    hi = 700.0
    if not ok(hi):
        return math.inf
    for _ in range(80):
        mid = (lo + hi) / 2
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return math.exp(hi)


@dataclass
class QMembership:
    q: int
    prime_recip_sum: Fraction
    log_xi: float
    member: bool
    borderline: bool

    def __bool__(self) -> bool:
        return self.member


def q_class_membership(q: int | FactoredModulus, xi: XiFamily) -> QMembership:
    """Whether sum_{p | q} 1/p < log xi(q); ``borderline`` when within 1e-12 of equality."""
    Q = arith.as_modulus(q)
    xq = xi(Q.q)
    if xq <= 1:
        raise ValueError(f"xi({Q.q}) = {xq} must exceed 1")
    lx = math.log(xq)
    s = Q.prime_recip_sum
    return QMembership(Q.q, s, lx, s < Fraction(lx), abs(float(s) - lx) <= 1e-12)


def _model_order(f: MultiplicativeModel) -> int:
    if f.character is not None:
        return f.character.order
    if f.exact is not None:
        return arith.lcm(*(v.m for v in f.exact if not v.is_zero))
    raise ValueError("order of a non-exact model must be given")


def _json_ratio(log_ratio: float) -> float | None:
    return math.exp(log_ratio) if log_ratio < 700 else None


def cestolog_report(f: MultiplicativeModel, x: int, xi: XiFamily, k: int | None = None) -> dict:
    """Logarithmic-mean lower bounds for f of order k, reported against the observed value.

    The bounds are returned in log form too since the first one underflows quickly.
    """
    k = _model_order(f) if k is None else k
    x = int(x)
    xx = xi(x)
    if xx <= 1:
        raise ValueError(f"xi({x}) = {xx} must exceed 1")
    fv = f.extend(x)
    mean = abs(complex(kernels.kahan_cumsum(fv)[-1])) / x
    lhs = _max_log_mean(fv, math.isqrt(x) + 1, x) + 1.0 / math.log(x)
    lxi = math.log(xx)
    log_a = -38 * k * k * xx ** (19 * k * k) * lxi
    rec = {
        "model": f.name,
        "k": k,
        "x": x,
        "xi": xi.name,
        "xi_x": xx,
        "mean": mean,
        "hypothesis": mean > 1.0 / xx,
        "lhs": lhs,
        "log_rhs_a": log_a,
        "rhs_a": math.exp(log_a) if log_a > -745 else 0.0,
        "ratio_a": _json_ratio(math.log(lhs) - log_a),
    }
    if k % 2:
        log_b = -72 * k * k * lxi
        rec.update(log_rhs_b=log_b, rhs_b=math.exp(log_b) if log_b > -745 else 0.0,
                   ratio_b=_json_ratio(math.log(lhs) - log_b))
    else:
        rec.update(log_rhs_b=None, rhs_b=None, ratio_b=None)
    return rec

