"""Partial-sum engines for Dirichlet characters.

Cesaro and logarithmic prefix sums, Gauss sums, the Polya Fourier expansion,
two-sided twisted logarithmic sums, the Granville-Soundararajan decomposition
of e(bn/r) into characters, rational approximation with arc labels, and the
savings / short-sum metrics read off a single prefix pass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import arith, kernels
from .arith import ResourceError
from .characters import (
    DirichletCharacter,
    conjugate,
    enumerate_characters,
    multiply,
    n_chi,
    value_matrix,
)
from .unitvalue import CyclotomicInteger, roots_table

STREAM_THRESHOLD = 10**8
TWO_PI = 2.0 * math.pi


def _fsum_complex(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real.tolist()), math.fsum(values.imag.tolist()))


def _residue_values(chi: DirichletCharacter) -> np.ndarray:
    return value_matrix([chi])[0]


def _values_upto(chi: DirichletCharacter, N: int) -> np.ndarray:
    """chi(n) for n = 0..N as complex."""
    table = _residue_values(chi)
    return table[np.arange(N + 1) % chi.q]


# -- prefix sums -----------------------------------------------------------------


@dataclass
class SumSeries:
    chi: DirichletCharacter
    T: int
    cesaro: np.ndarray | None  # S(t) for t = 0..T, S(0) = 0
    logsum: np.ndarray | None  # L(N) for N = 0..T, L(0) = 0
    pv_max: float
    pv_argmax: int
    log_max: float
    log_argmax: int

    def S(self, t: int) -> complex:
        if self.cesaro is None:
            raise ValueError("streamed series keeps only running maxima")
        return complex(self.cesaro[t])


def _first_argmax(a: np.ndarray) -> tuple[float, int]:
    # np.argmax returns the first index among ties
    i = int(np.argmax(a))
    return float(a[i]), i


def _period_prefix(chi: DirichletCharacter) -> np.ndarray:
    vals = _residue_values(chi)
    period = np.empty(chi.q + 1, dtype=np.complex128)
    period[0] = 0
    # residues 1..q, with q itself at index 0 of the residue table
    period[1:] = kernels.kahan_cumsum(np.ascontiguousarray(vals[np.arange(1, chi.q + 1) % chi.q]))
    return period


def build_series(chi: DirichletCharacter, T: int, streaming: bool = False) -> SumSeries:
    """Prefix sums of chi(n) and chi(n)/n for n <= T, with running maxima (first index on ties)."""
    if T < 1:
        raise ValueError("T must be positive")
    if T > STREAM_THRESHOLD and not streaming:
        raise ResourceError(f"T = {T} exceeds {STREAM_THRESHOLD}; pass streaming=True to keep only maxima")
    q = chi.q
    period = _period_prefix(chi)
    full = period[q]
    if streaming:
        return _streamed_series(chi, T, period)
    t = np.arange(T + 1)
    cesaro = period[t % q] + (t // q) * full
    vals = _residue_values(chi)[t % q] / np.maximum(t, 1)
    vals[0] = 0
    logsum = kernels.kahan_cumsum(np.ascontiguousarray(vals))
    pv_max, pv_arg = _first_argmax(np.abs(cesaro[1:]))
    log_max, log_arg = _first_argmax(np.abs(logsum[1:]))
    return SumSeries(chi, T, cesaro, logsum, pv_max, pv_arg + 1, log_max, log_arg + 1)


def _streamed_series(chi: DirichletCharacter, T: int, period: np.ndarray) -> SumSeries:
    q = chi.q
    table = _residue_values(chi)
    full = period[q]
    best = (-1.0, 0)
    best_log = (-1.0, 0)
    carry = 0j
    chunk = 1 << 22
    start = 1
    while start <= T:
        stop = min(T, start + chunk - 1)
        t = np.arange(start, stop + 1)
        ces = np.abs(period[t % q] + (t // q) * full)
        m, i = _first_argmax(ces)
        if m > best[0]:
            best = (m, start + i)
        logs = kernels.kahan_cumsum(np.ascontiguousarray(table[t % q] / t)) + carry
        carry = complex(logs[-1])
        m, i = _first_argmax(np.abs(logs))
        if m > best_log[0]:
            best_log = (m, start + i)
        start = stop + 1
    return SumSeries(chi, T, None, None, best[0], best[1], best_log[0], best_log[1])


def exact_prefix_sums(chi: DirichletCharacter, T: int) -> list[CyclotomicInteger]:
    """S(0..T) accumulated exactly in Z[e(1/order)]."""
    num, order = chi.phase_table()
    acc = CyclotomicInteger(order)
    out = [acc.copy()]
    for n in range(1, T + 1):
        k = int(num[n % chi.q])
        if k >= 0:
            acc.add_root(k)
        out.append(acc.copy())
    return out


# -- Gauss sums and the Polya expansion --------------------------------------------


def gauss_sum(chi: DirichletCharacter, check: bool = True) -> complex:
    """tau(chi) = sum_{a mod q} chi(a) e(a/q) by direct summation."""
    q = chi.q
    if q > 10**6:
        raise ResourceError("direct Gauss sums are limited to q <= 10^6")
    terms = _residue_values(chi) * roots_table(q)
    tau = _fsum_complex(terms)
    if check and chi.is_primitive and abs(abs(tau) ** 2 - q) > 1e-6 * q:
        raise ArithmeticError(f"|tau|^2 = {abs(tau) ** 2} differs from q = {q} for {chi}")
    return tau


def polya_expansion_error(chi: DirichletCharacter) -> tuple[float, int]:
    """sup over 1 <= t <= q of |S(t) - polya(t)| and the first t attaining it.

    polya(t) = tau(chi)/(2 pi i) * sum_{1 <= |n| <= q} conj(chi)(n)/n * (1 - e(-nt/q)).
    """
    if not chi.is_primitive:
        raise ValueError(f"{chi} is not primitive")
    if chi.q < 3:
        raise ValueError("the expansion is checked for q >= 3")
    err = polya_errors([chi])[0]
    return float(err[0]), int(err[1])


def polya_errors(chars: Sequence[DirichletCharacter]) -> np.ndarray:
    """(len(chars), 2) array of (sup_error, argmax_t) for primitive characters sharing one modulus."""
    q = chars[0].q
    V = value_matrix(list(chars))  # residues 0..q-1
    k = len(chars)
    r = np.arange(q)
    # exact regrouping of the n and -n terms by residue r = n mod q
    Vbar = np.conj(V)
    parity = np.array([c.parity for c in chars], dtype=float)
    C = np.zeros((k, q), dtype=np.complex128)
    C[:, 1:] = Vbar[:, 1:] / r[1:] - parity[:, None] * Vbar[:, (q - r[1:]) % q] / (q - r[1:])
    t = np.arange(1, q + 1)
    E = np.exp(-2j * np.pi * np.outer(r, t) / q)  # e(-r t / q)
    osc = C @ E
    const = C.sum(axis=1)
    tau = np.array([gauss_sum(c) for c in chars])
    rhs = (tau / (2j * math.pi))[:, None] * (const[:, None] - osc)
    S = np.cumsum(V[:, t % q], axis=1)
    err = np.abs(S - rhs)
    arg = np.argmax(err, axis=1)
    return np.stack([err[np.arange(k), arg], arg + 1], axis=1)


# -- twisted logarithmic sums ----------------------------------------------------------


def twisted_log_sum(chi: DirichletCharacter, alpha: float, N: int, two_sided: bool = False) -> complex:
    """sum over 1 <= n <= N (or 1 <= |n| <= N) of chi(n) e(n alpha) / n."""
    if N < 1:
        raise ValueError("N must be positive")
    n = np.arange(1, N + 1)
    vals = _values_upto(chi, N)[1:] / n
    phase = np.exp(2j * np.pi * ((n * alpha) % 1.0))
    terms = vals * phase
    if two_sided:
        # chi(-n) e(-n alpha) / (-n)
        terms = terms - chi.parity * vals * np.conj(phase)
    return _fsum_complex(terms)


@lru_cache(maxsize=64)
def _chars_mod(s: int) -> tuple[DirichletCharacter, ...]:
    return tuple(enumerate_characters(s))


@lru_cache(maxsize=256)
def _gauss_cached(chi: DirichletCharacter) -> complex:
    return gauss_sum(chi, check=False)


def gs_identity_check(
    chi: DirichletCharacter, psi: DirichletCharacter, b: int, r: int, N: int
) -> tuple[complex, complex, float]:
    """Both sides of the expansion of sum_{1<=|n|<=N} chi psi(n) e(bn/r)/n over d | r and psi' mod r/d.

    rhs = sum_{d|r} F(d)/d * 1/phi(r/d) * sum_{psi'} (1 - F(-1) psi'(-1)) tau(psi') conj(psi')(b)
          * sum_{1<=m<=N/d} F(m) conj(psi')(m) / m,   with F = chi psi.
    """
    if r < 1:
        raise ValueError("r must be positive")
    if math.gcd(b, r) != 1:
        raise ValueError(f"gcd({b}, {r}) != 1")
    F = multiply(chi, psi)
    lhs = complex(twisted_log_sum(F, (b % r) / r, N, two_sided=True))
    rhs = complex(_gs_rhs(F, b, r, N))
    return lhs, rhs, float(abs(lhs - rhs))


def _gs_rhs(F: DirichletCharacter, b: int, r: int, N: int) -> complex:
    Fvals = _values_upto(F, N)
    n = np.arange(N + 1)
    total = 0j
    for d in arith.divisors(r):
        Fd = Fvals[d] if d <= N else complex(F(d))
        if Fd == 0:
            continue
        s = r // d
        M = N // d
        if M < 1:
            continue
        inner = 0j
        for pp in _chars_mod(s):
            factor = 1 - F.parity * pp.parity
            if factor == 0:
                continue
            pbar = np.conj(_values_upto(pp, M))
            log_part = _fsum_complex(Fvals[1 : M + 1] * pbar[1:] / n[1 : M + 1])
            inner += factor * _gauss_cached(pp) * np.conj(complex(pp(b))) * log_part
        total += Fd / d * inner / arith.euler_phi(s)
    return total


def gs_identity_grid(
    chi: DirichletCharacter, psi: DirichletCharacter, r_max: int, Ns: Sequence[int]
) -> list[tuple[int, int, int, complex, complex]]:
    """(r, b, N, lhs, rhs) for every 1 <= r <= r_max, b mod r a unit, N in Ns.

    Vectorized over n; both sides are built from separate sums.
    """
    F = multiply(chi, psi)
    Nmax = max(Ns)
    Fv = _values_upto(F, Nmax)
    n = np.arange(1, Nmax + 1)
    base = Fv[1:] / n
    par = F.parity
    pairs = [(r, b) for r in range(1, r_max + 1) for b in range(r) if math.gcd(b, r) == 1]
    # lhs: sum_{n<=N} F(n)/n (e(bn/r) - F(-1) e(-bn/r)), with r = 1 meaning b = 0
    ph = np.exp(2j * np.pi * ((np.outer([b for _, b in pairs], n) % np.array([r for r, _ in pairs])[:, None])
                              / np.array([r for r, _ in pairs])[:, None]))
    lhs_cum = np.cumsum(base * (ph - par * np.conj(ph)), axis=1)
    # rhs building blocks: P[psi'](M) = sum_{m<=M} F(m) conj(psi')(m)/m
    blocks: dict[DirichletCharacter, np.ndarray] = {}
    for s in range(1, r_max + 1):
        for pp in _chars_mod(s):
            if 1 - par * pp.parity == 0:
                continue
            pbar = np.conj(_values_upto(pp, Nmax)[1:])
            blocks[pp] = np.concatenate([[0], np.cumsum(base * pbar)])
    out = []
    for idx, (r, b) in enumerate(pairs):
        divs = arith.divisors(r)
        for N in Ns:
            total = 0j
            for d in divs:
                M = N // d
                Fd = Fv[d] if d <= Nmax else complex(F(d))
                if M < 1 or Fd == 0:
                    continue
                s = r // d
                inner = 0j
                for pp in _chars_mod(s):
                    blk = blocks.get(pp)
                    if blk is None:
                        continue
                    # 1 - F(-1) psi'(-1) is 0 or 2
                    inner += 2 * _gauss_cached(pp) * np.conj(complex(pp(b))) * blk[M]
                total += Fd / d * inner / arith.euler_phi(s)
            out.append((r, b, N, complex(lhs_cum[idx, N - 1]), total))
    return out


def orthogonality_twist_check(
    chi: DirichletCharacter, psi: DirichletCharacter, N: int
) -> tuple[complex, complex, float]:
    """Averaging the twisted sums against conj(psi)(b) over b mod l isolates chi psi.

    lhs = 1/phi(l) sum_b conj(psi)(b) sum_{1<=|n|<=N} chi(n)(1 - e(nb/l))/n
    rhs = -2 tau(conj psi)/phi(l) sum_{1<=n<=N} chi psi(n)/n
    """
    lhs, rhs = orthogonality_twist_series(chi, psi, N)
    return complex(lhs[N - 1]), complex(rhs[N - 1]), float(abs(lhs[N - 1] - rhs[N - 1]))


def orthogonality_twist_series(chi: DirichletCharacter, psi: DirichletCharacter, N: int):
    """Both sides for every N' = 1..N, as two arrays."""
    if not psi.is_primitive or psi.is_principal:
        raise ValueError("psi must be primitive and non-principal")
    if chi.parity * psi.parity != -1:
        raise ValueError("chi psi must be odd")
    ell = psi.q
    n = np.arange(1, N + 1)
    cv = _values_upto(chi, N)[1:] / n
    pv = _residue_values(psi)
    lhs_terms = np.zeros(N, dtype=np.complex128)
    for b in range(ell):
        w = np.conj(pv[b])
        if w == 0:
            continue
        e = np.exp(2j * np.pi * ((n * b) % ell) / ell)
        lhs_terms += w * cv * ((1 - e) - chi.parity * (1 - np.conj(e)))
    lhs = np.cumsum(lhs_terms) / arith.euler_phi(ell)
    tau_bar = gauss_sum(conjugate(psi))
    cpv = cv * pv[n % ell]
    rhs = -2 * tau_bar / arith.euler_phi(ell) * np.cumsum(cpv)
    return lhs, rhs


# -- rational approximation ------------------------------------------------------------


@dataclass(frozen=True)
class RationalApprox:
    alpha: float
    b: int
    r: int
    err: float
    arc: str  # "Major" or "Minor"
    R: float
    M: float


def _convergents(x: Fraction):
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while True:
        a = math.floor(x)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield h1, k1
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def dirichlet_approx(alpha: float, R: float, M: float) -> RationalApprox:
    """Smallest-denominator convergent b/r of alpha with r <= R and |alpha - b/r| <= 1/(rR).

    The arc is Major when r <= M.
    """
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    if not 1 <= M <= R:
        raise ValueError("need 1 <= M <= R")
    x = Fraction(alpha)
    for b, r in _convergents(x):
        if r > R:
            break
        err = abs(x - Fraction(b, r))
        if err * r * Fraction(R) <= 1:
            return RationalApprox(alpha, b, r, float(err), "Major" if r <= M else "Minor", R, M)
    raise ArithmeticError("no admissible convergent")  # pragma: no cover - Dirichlet's theorem


def default_arc_parameters(q: int, a_q: float) -> tuple[float, float]:
    """R = (log q)^5 and M = a(q)^(2/3), clipped into [1, R]."""
    R = max(1.0, math.log(q) ** 5)
    M = min(R, max(1.0, a_q ** (2.0 / 3.0)))
    return R, M


# -- savings metrics ------------------------------------------------------------------


@dataclass
class SavingsProfile:
    q: int
    pv_max: float
    pv_argmax: int
    a_q: float
    eps_grid: list[float]
    delta_eps: list[float]
    delta_argmax: list[int]
    n_chi: int | None
    series: SumSeries | None = field(default=None, repr=False)


def window_start(q: int, eps: float) -> int:
    """Smallest integer t with t > q^eps."""
    x = eps * math.log(q)
    c = math.floor(math.exp(x))
    t0 = c + 1
    if abs(math.log(t0) - x) < 1e-12:
        t0 += 1
    if c >= 1 and math.log(c) > x + 1e-12:
        t0 = c
    return t0


def savings_profile(chi: DirichletCharacter, eps_grid: Sequence[float], keep_series: bool = False) -> SavingsProfile:
    """pv_max, a(q) = sqrt(q) log q / pv_max, and max_{q^eps < t <= q} |S(t)|/t for each eps.

    An empty window falls back to t = q.
    """
    if chi.is_principal:
        raise ValueError("savings are defined for non-principal characters")
    q = chi.q
    series = build_series(chi, q)
    absS = np.abs(series.cesaro)
    deltas, args = [], []
    t = np.arange(q + 1)
    ratio = np.zeros(q + 1)
    ratio[1:] = absS[1:] / t[1:]
    for eps in eps_grid:
        if not 0 < eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        lo = window_start(q, eps)
        if lo > q:
            deltas.append(float(ratio[q]))
            args.append(q)
        else:
            m, i = _first_argmax(ratio[lo:])
            deltas.append(m)
            args.append(lo + i)
    a_q = math.sqrt(q) * math.log(q) / series.pv_max
    return SavingsProfile(
        q=q,
        pv_max=series.pv_max,
        pv_argmax=series.pv_argmax,
        a_q=a_q,
        eps_grid=list(eps_grid),
        delta_eps=deltas,
        delta_argmax=args,
        n_chi=n_chi(chi),
        series=series if keep_series else None,
    )


def thmgen_rhs(t: float, g: int, a_of_t: float) -> float:
    """(log log a / log a)^(1/(19 g^2)): the short-sum bound shape divided by t."""
    if not a_of_t > math.exp(math.e):
        raise ValueError("need a(t) > e^e")
    if g < 1:
        raise ValueError("g must be positive")
    la = math.log(a_of_t)
    return (math.log(la) / la) ** (1.0 / (19 * g * g))


def delta_g(g: int) -> float:
    """1 - (g/pi) sin(pi/g) for odd g >= 3."""
    if g < 3 or g % 2 == 0:
        raise ValueError("g must be odd and at least 3")
    return 1.0 - g / math.pi * math.sin(math.pi / g)
