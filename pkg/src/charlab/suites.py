"""Verification suites, calibration families and the caps file.

Each suite returns a list of ``Case`` records. Suites that compare against an
unknown implied constant read it from a caps file written by ``calibrate``.
"""
from __future__ import annotations

import datetime
import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from . import arith
from .characters import (
    DirichletCharacter,
    enumerate_characters,
    induce,
    primitive_part,
)
from .convolution import (
    build_convolution,
    dickman_rho,
    dickman_step_check,
    fejer_kernel,
    fejer_kernel_sum,
    hildebrand_lower,
    prime_power_identity_check,
    revtonn_check,
    sigma_minus,
)
from .pretentious import MultiplicativeModel, distance, equiv_gap, min_distance_over_t
from .sums import (
    build_series,
    gauss_sum,
    gs_identity_grid,
    orthogonality_twist_series,
    polya_errors,
)
from .unitvalue import reduce_cyclotomic

HEADROOM = 1.5
CAPS_FORMAT = 1
FAMILY_SEED = 20240601
CAP_NAMES = ("C_P", "C_E", "c_R", "c_H")


@dataclass
class Case:
    name: str
    ok: bool
    detail: str = ""


class CapsError(Exception):
    """Caps file missing, unreadable or tampered with."""


# -- families ----------------------------------------------------------------------


@lru_cache(maxsize=None)
def primitive_characters(qmin: int, qmax: int) -> tuple[DirichletCharacter, ...]:
    return tuple(c for q in range(qmin, qmax + 1) for c in enumerate_characters(q, primitive_only=True))


@lru_cache(maxsize=None)
def _model(chi: DirichletCharacter, x: int) -> MultiplicativeModel:
    return MultiplicativeModel.from_character(chi, x)


def seeded_character_family(count: int = 50, orders=(2, 3, 4, 5, 6), qmax: int = 200,
                            seed: int = FAMILY_SEED) -> list[DirichletCharacter]:
    """``count`` primitive characters cycling through ``orders``, drawn with a fixed seed."""
    pool = {k: [c for c in primitive_characters(3, qmax) if c.order == k] for k in orders}
    rng = np.random.default_rng(seed)
    return [pool[k][int(rng.integers(len(pool[k])))] for k in (orders[i % len(orders)] for i in range(count))]


def polya_family() -> list[tuple[DirichletCharacter, float]]:
    """(chi, sup_error / log q) over every primitive chi with 3 <= q <= 300."""
    out = []
    for q in range(3, 301):
        chars = enumerate_characters(q, primitive_only=True)
        if chars:
            errs = polya_errors(chars)
            out.extend((c, float(e) / math.log(q)) for c, e in zip(chars, errs[:, 0]))
    return out


def equiv_family(x: int = 10**4, T: float = 10.0) -> list[tuple[DirichletCharacter, float]]:
    """(chi, equiv_gap) over primitive quadratic and cubic chi with q <= 200."""
    out = []
    for c in primitive_characters(3, 200):
        if c.order in (2, 3):
            out.append((c, equiv_gap(_model(c, x), x, T, c.order)[2]))
    return out


def convolution_family(t: int = 10**5) -> list[tuple[DirichletCharacter, float, float]]:
    """(chi, revtonn ratio, actual/lower) over primitive chi with q <= 30 at t = 10^5."""
    out = []
    for c in primitive_characters(3, 30):
        m = _model(c, t)
        tab = build_convolution(m, t)
        ratio = revtonn_check(m, t, table=tab)[2]
        lower, actual = hildebrand_lower(m, t, table=tab)
        out.append((c, ratio, actual / lower))
    return out


# -- caps file -------------------------------------------------------------------------


def _entry_hash(entry: dict) -> str:
    body = {k: v for k, v in entry.items() if k != "hash"}
    return hashlib.sha256(json.dumps(body, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _worst(label: str, value: float) -> dict:
    return {"label": label, "value": value}


def calibrate(progress: Callable[[str], None] | None = None) -> dict:
    """Run the four calibration families and return the caps document."""
    say = progress or (lambda s: None)
    entries = []

    say("polya expansion over primitive chi, 3 <= q <= 300")
    fam = polya_family()
    c, w = max(fam, key=lambda t: t[1])
    entries.append({"constant": "C_P", "value": w * HEADROOM, "kind": "upper",
                    "family": "sup_t |S(t) - polya(t)| / log q, primitive chi, 3 <= q <= 300",
                    "worst_case": _worst(c.label, w), "headroom": HEADROOM, "size": len(fam)})

    say("equiv_gap over primitive quadratic and cubic chi, q <= 200, x = 1e4, T = 10")
    fam = equiv_family()
    c, w = min(fam, key=lambda t: t[1])
    entries.append({"constant": "C_E", "value": max(0.0, -w) * HEADROOM, "kind": "gap-floor",
                    "family": "equiv_gap, primitive chi of order 2 or 3, q <= 200, x = 1e4, T = 10",
                    "worst_case": _worst(c.label, w), "headroom": HEADROOM, "size": len(fam)})

    say("revtonn and hildebrand over primitive chi, q <= 30, t = x = 1e5")
    fam3 = convolution_family()
    c, w = min(((c, r) for c, r, _ in fam3), key=lambda t: t[1])
    entries.append({"constant": "c_R", "value": w / HEADROOM, "kind": "lower",
                    "family": "revtonn ratio lhs/rhs_core, primitive chi, q <= 30, t = 1e5",
                    "worst_case": _worst(c.label, w), "headroom": HEADROOM, "size": len(fam3)})
    c, w = min(((c, h) for c, _, h in fam3), key=lambda t: t[1])
    entries.append({"constant": "c_H", "value": w / HEADROOM, "kind": "lower",
                    "family": "hildebrand actual/lower, primitive chi, q <= 30, x = 1e5",
                    "worst_case": _worst(c.label, w), "headroom": HEADROOM, "size": len(fam3)})

    for e in entries:
        e["hash"] = _entry_hash(e)
    return {"format": CAPS_FORMAT, "created": datetime.date.today().isoformat(), "constants": entries}


def write_caps(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_caps(path: str | Path) -> dict[str, float]:
    p = Path(path)
    if not p.exists():
        raise CapsError(f"caps file {p} not found; run `charlab calibrate` first")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
        entries = doc["constants"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CapsError(f"caps file {p} is unreadable ({exc}); rerun `charlab calibrate`") from exc
    caps = {}
    for e in entries:
        if not isinstance(e, dict) or e.get("hash") != _entry_hash(e):
            name = e.get("constant", "?") if isinstance(e, dict) else "?"
            raise CapsError(f"caps entry {name} fails its hash check; rerun `charlab calibrate`")
        caps[e["constant"]] = float(e["value"])
    missing = [n for n in CAP_NAMES if n not in caps]
    if missing:
        raise CapsError(f"caps file lacks {', '.join(missing)}; rerun `charlab calibrate`")
    return caps


# -- identity suites --------------------------------------------------------------------


def suite_fejer(caps=None) -> list[Case]:
    cases = []
    ts = np.linspace(-1.5, 1.5, 61).tolist() + [0.17, 1e-9, 2.0]
    worst = max(abs(fejer_kernel(N, t) - fejer_kernel_sum(N, t)) for N in range(1, 21) for t in ts)
    cases.append(Case("closed form = sum form, N <= 20", worst <= 1e-10, f"max diff {worst:.2e}"))
    cases.append(Case("K_N(0) = N", all(fejer_kernel(N, 0.0) == N for N in range(1, 21))))
    cases.append(Case("K_2(1/2) = 0", abs(fejer_kernel(2, 0.5)) < 1e-15))
    x = 100
    models = [MultiplicativeModel.constant_root(a, m, x) for m in (1, 2, 3, 4, 5, 6, 7, 12) for a in range(m)]
    models.append(_model(DirichletCharacter(3, [1]), x))
    worst = max(prime_power_identity_check(f, int(p), 10, closed_form="mixture")
                for f in models for p in arith.primes_up_to(100))
    cases.append(Case("g(p^k) = sum_j (k+1-2j) K_{k+1-2j}(theta_p), p <= 100, k <= 10", worst <= 1e-9, f"max diff {worst:.2e}"))
    return cases


def suite_gauss(caps=None) -> list[Case]:
    cases = []
    worst, count = 0.0, 0
    for c in primitive_characters(3, 200):
        tau = gauss_sum(c, check=False)
        worst = max(worst, abs(abs(tau) ** 2 - c.q) / c.q)
        count += 1
    cases.append(Case(f"|tau|^2 = q for {count} primitive chi, q <= 200", worst <= 1e-6, f"max rel {worst:.2e}"))
    # imprimitive: tau(chi) = mu(q/q*) chi*(q/q*) tau(chi*), vanishing on the documented list
    zero_worst, other_worst, zeros = 0.0, 0.0, 0
    for q in range(2, 101):
        for c in enumerate_characters(q):
            if c.is_primitive:
                continue
            star = primitive_part(c)
            q0 = q // star.q
            pred = arith.mobius(q0) * complex(star(q0)) * gauss_sum(star, check=False)
            tau = gauss_sum(c, check=False)
            if pred == 0:
                zeros += 1
                zero_worst = max(zero_worst, abs(tau))
            else:
                other_worst = max(other_worst, abs(tau - pred))
    cases.append(Case(f"tau = 0 on {zeros} imprimitive chi with mu(q/q*) chi*(q/q*) = 0, q <= 100",
                      zero_worst <= 1e-9, f"max |tau| {zero_worst:.2e}"))
    cases.append(Case("tau = mu(q/q*) chi*(q/q*) tau(chi*) otherwise", other_worst <= 1e-9,
                      f"max diff {other_worst:.2e}"))
    principal4 = gauss_sum(DirichletCharacter(4, [0]), check=False)
    cases.append(Case("tau(principal mod 4) = 0", abs(principal4) <= 1e-15))
    return cases


def suite_polya(caps) -> list[Case]:
    C = caps["C_P"]
    fam = polya_family()
    bad = [(c.label, r) for c, r in fam if r > C]
    worst = max(r for _, r in fam)
    return [Case(f"sup error <= C_P log q for {len(fam)} primitive chi, 3 <= q <= 300", not bad,
                 f"worst ratio {worst:.4f}, C_P = {C:.4f}" + (f", first failure {bad[0][0]}" if bad else ""))]


def gs_grid_worst(qmax: int = 50, ells=(3, 4, 5), r_max: int = 12, Ns=(10, 100, 1000)) -> tuple[float, int]:
    psis = [p for ell in ells for p in enumerate_characters(ell)]
    worst, n = 0.0, 0
    for chi in primitive_characters(3, qmax):
        for psi in psis:
            for _, _, _, lhs, rhs in gs_identity_grid(chi, psi, r_max, Ns):
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
                n += 1
    return worst, n


def suite_gs(caps=None) -> list[Case]:
    worst, n = gs_grid_worst()
    return [Case(f"character expansion of e(bn/r), {n} cases", worst <= 1e-8, f"max rel {worst:.2e}")]


def orthogonality_worst(qmax: int = 60, N: int = 1000) -> tuple[float, int]:
    psis = [p for p in enumerate_characters(5, primitive_only=True) if p.parity == 1]
    worst, n = 0.0, 0
    for chi in primitive_characters(3, qmax):
        if chi.parity != -1:
            continue
        for psi in psis:
            lhs, rhs = orthogonality_twist_series(chi, psi, N)
            worst = max(worst, float((np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))).max()))
            n += 1
    return worst, n


def suite_orthogonality(caps=None) -> list[Case]:
    worst, n = orthogonality_worst()
    return [Case(f"twist average isolates chi psi, {n} pairs, N <= 1000", worst <= 1e-9, f"max rel {worst:.2e}")]


def suite_schur(caps=None) -> list[Case]:
    # brute-force prefix oracle on small moduli first
    oracle_ok = True
    for c in primitive_characters(3, 40):
        s, best = 0j, 0.0
        for t in range(1, c.q + 1):
            s += complex(c(t))
            best = max(best, abs(s))
        oracle_ok &= abs(best - build_series(c, c.q).pv_max) <= 1e-12
    cases = [Case("pv_max matches brute-force prefix sums, q <= 40", oracle_ok)]
    bad, n, worst = [], 0, math.inf
    for c in primitive_characters(3, 400):
        r = build_series(c, c.q).pv_max / (math.sqrt(c.q) / (2 * math.pi))
        worst = min(worst, r)
        n += 1
        if r < 1:
            bad.append(c.label)
    cases.append(Case(f"pv_max >= sqrt(q)/(2 pi) for {n} primitive chi, q <= 400", not bad,
                      f"min ratio {worst:.4f}" + (f", first failure {bad[0]}" if bad else "")))
    return cases


def suite_characters(caps=None) -> list[Case]:
    cases = []
    bad = [c.label for q in range(1, 501) for c in enumerate_characters(q)
           if c.order > 1 and c.order % 2 == 1 and c.parity != 1]
    cases.append(Case("odd order > 1 implies even parity, q <= 500", not bad, ", ".join(bad[:3])))
    bad = []
    for q in range(1, 301):
        for c in enumerate_characters(q):
            star = primitive_part(c)
            if star.conductor != star.q or induce(star, q) != c or star.q != c.conductor:
                bad.append(c.label)
    cases.append(Case("primitive part induces back, q <= 300", not bad, ", ".join(bad[:3])))
    bad = [q for q in range(1, 1001) if len(enumerate_characters(q)) != arith.euler_phi(q)]
    cases.append(Case("number of characters = phi(q), q <= 1000", not bad, str(bad[:3]) if bad else ""))
    ok = True
    for q in range(1, 101):
        chars = enumerate_characters(q)
        num = _phases_common(chars)
        L = max(1, arith.lcm(*(c.order for c in chars)))
        phi = arith.euler_phi(q)
        for c, row in zip(chars, num):
            counts = np.bincount(row[row >= 0], minlength=L)
            target = [phi] if c.is_principal else [0]
            ok &= reduce_cyclotomic(counts, L) == reduce_cyclotomic(target, L)
        for col in range(q):
            if math.gcd(col, q) != 1:
                continue
            counts = np.bincount(num[:, col], minlength=L)
            target = [phi] if col == 1 % q else [0]
            ok &= reduce_cyclotomic(counts, L) == reduce_cyclotomic(target, L)
    cases.append(Case("orthogonality row and column sums exact, q <= 100", bool(ok)))
    return cases


def _phases_common(chars: list[DirichletCharacter]) -> np.ndarray:
    """Phase numerators over a common denominator (the lcm of the orders)."""
    from .characters import phase_matrix

    num = phase_matrix(chars)
    L = max(1, arith.lcm(*(c.order for c in chars)))
    scale = np.array([L // c.order for c in chars])[:, None]
    return np.where(num >= 0, num * scale, -1)


def suite_dickman(caps=None) -> list[Case]:
    cases = [Case("rho = 1 on [0, 1]", all(dickman_rho(u) == 1.0 for u in np.linspace(0, 1, 101)))]
    d = abs(dickman_rho(2.0) - (1 - math.log(2)))
    cases.append(Case("rho(2) = 1 - log 2", d <= 1e-6, f"diff {d:.2e}"))
    d = max(abs(dickman_rho(u) - (1 - math.log(u))) for u in np.linspace(1, 2, 201))
    cases.append(Case("rho = 1 - log u on [1, 2]", d <= 1e-6, f"max diff {d:.2e}"))
    d = dickman_step_check(20.0)
    cases.append(Case("step halving agrees to 1e-7 on [0, 20]", d <= 1e-7, f"max diff {d:.2e}"))
    us = np.linspace(1, 50, 491)
    sig = [sigma_minus(u) for u in us]
    cases.append(Case("sigma_-(u) = u rho(u) positive and decreasing on [1, 50]",
                      all(s > 0 for s in sig) and all(a > b for a, b in zip(sig, sig[1:]))))
    return cases


# -- convolution and pretentious ------------------------------------------------------


def convolution_identity_cases(count: int = 50, x: int = 10**5, pairs: int = 10**4,
                               seed: int = FAMILY_SEED) -> list[Case]:
    rng = np.random.default_rng(seed + 1)
    g_min, mult_worst, pp_worst, imag_worst, tau_ok = math.inf, 0.0, 0.0, 0.0, True
    primes = arith.primes_up_to(100)
    for chi in seeded_character_family(count, seed=seed):
        m = _model(chi, x)
        tab = build_convolution(m, x)
        inv = tab.check_invariants()
        g_min = min(g_min, inv["g_min"])
        imag_worst = max(imag_worst, inv["g_imag_max"])
        tau_ok &= inv["h_over_tau_max"] <= 1e-9
        a, b = _coprime_pairs(rng, x, pairs)
        lhs, rhs = tab.g[a * b], tab.g[a] * tab.g[b]
        mult_worst = max(mult_worst, float((np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))).max()))
        pp_worst = max(pp_worst, max(prime_power_identity_check(m, int(p), 10, table=tab, closed_form="mixture")
                                     for p in primes))
    return [
        Case(f"g >= 0 on {count} tables, x = {x}", g_min >= -1e-9, f"min g {g_min:.3e}"),
        Case("g real", imag_worst <= 1e-9, f"max |Im g| {imag_worst:.2e}"),
        Case(f"g multiplicative on {pairs} coprime pairs per table", mult_worst <= 1e-9, f"max rel {mult_worst:.2e}"),
        Case("g(p^k) = sum_j (k+1-2j) K_{k+1-2j}(theta_p), p <= 100, k <= 10", pp_worst <= 1e-9, f"max diff {pp_worst:.2e}"),
        Case("|h| <= tau", bool(tau_ok)),
    ]


def _coprime_pairs(rng: np.random.Generator, x: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    out_a, out_b, have = [], [], 0
    while have < count:
        a = np.exp(rng.uniform(math.log(2), math.log(x / 2), 4 * count)).astype(np.int64)
        b = (rng.uniform(0, 1, 4 * count) * (x // a - 1)).astype(np.int64) + 2
        keep = (np.gcd(a, b) == 1) & (a * b <= x)
        out_a.append(a[keep])
        out_b.append(b[keep])
        have += int(keep.sum())
    return np.concatenate(out_a)[:count], np.concatenate(out_b)[:count]


def suite_convolution(caps) -> list[Case]:
    cases = convolution_identity_cases()
    fam = convolution_family()
    wr = min(r for _, r, _ in fam)
    wh = min(h for _, _, h in fam)
    cases.append(Case(f"revtonn ratio >= c_R on {len(fam)} characters", wr >= caps["c_R"],
                      f"min ratio {wr:.4f}, c_R = {caps['c_R']:.4f}"))
    cases.append(Case(f"hildebrand actual >= c_H lower on {len(fam)} characters", wh >= caps["c_H"],
                      f"min ratio {wh:.4f}, c_H = {caps['c_H']:.4f}"))
    return cases


def triangle_worst(triples: int = 1000, x: int = 10**4, qmax: int = 100, seed: int = FAMILY_SEED) -> float:
    """Largest violation of the triangle inequality (negative means it holds with room)."""
    rng = np.random.default_rng(seed + 2)
    pool = [c for q in range(2, qmax + 1) for c in enumerate_characters(q)]
    worst = -math.inf
    for _ in range(triples):
        f1, f2, f3 = (_model(pool[int(i)], x) for i in rng.integers(len(pool), size=3))
        d13 = math.sqrt(distance(f1, f3, x))
        d12 = math.sqrt(distance(f1, f2, x))
        d23 = math.sqrt(distance(f2, f3, x))
        worst = max(worst, d13 - d12 - d23)
    return worst


def self_distance_mismatches(x: int = 10**4, qmax: int = 100) -> tuple[int, int]:
    """(mismatches, checked): D(f, f; x)^2 against the double nearest the exact rational sum."""
    bad = n = 0
    for q in range(2, qmax + 1):
        exact = float(sum((Fraction(1, p) for p in arith.factorize(q).primes if p <= x), Fraction(0)))
        for c in enumerate_characters(q)[:4]:
            m = _model(c, x)
            bad += distance(m, m, x) != exact
            n += 1
    return bad, n


def planted_twist(t0: float = 0.3, x: int = 10**4, T: float = 1.0):
    return min_distance_over_t(MultiplicativeModel.archimedean(t0, x), x, T)


def suite_pretentious(caps) -> list[Case]:
    cases = []
    w = triangle_worst()
    cases.append(Case("triangle inequality on 1000 triples, x = 1e4", w <= 1e-9, f"max excess {w:.2e}"))
    bad, n = self_distance_mismatches()
    cases.append(Case(f"D(f, f)^2 = sum over p with f(p) = 0 of 1/p, {n} characters", bad == 0,
                      f"{bad} mismatches" if bad else ""))
    rep = planted_twist()
    cases.append(Case("planted twist t = 0.3 recovered", abs(rep.t_star - 0.3) <= 1e-3 and rep.d_min_squared <= 1e-4,
                      f"t* = {rep.t_star:.6f}, D^2 = {rep.d_min_squared:.2e}"))
    fam = equiv_family()
    w = min(g for _, g in fam)
    cases.append(Case(f"equiv_gap >= -C_E on {len(fam)} characters", w >= -caps["C_E"],
                      f"min gap {w:.4f}, C_E = {caps['C_E']:.4f}"))
    return cases


SUITES: dict[str, tuple[Callable, bool]] = {
    "fejer": (suite_fejer, False),
    "gauss": (suite_gauss, False),
    "polya": (suite_polya, True),
    "gs-identity": (suite_gs, False),
    "orthogonality": (suite_orthogonality, False),
    "convolution": (suite_convolution, True),
    "pretentious": (suite_pretentious, True),
    "characters": (suite_characters, False),
    "schur": (suite_schur, False),
    "dickman": (suite_dickman, False),
}
