"""Acceptance criteria, each at its stated tolerance and time budget."""
import json
import math
import time

import numpy as np

from charlab import arith, cli, suites
from charlab.convolution import build_convolution, prime_power_identity_check
from charlab.pretentious import MultiplicativeModel


def all_ok(cases):
    return all(c.ok for c in cases), "; ".join(f"{c.name} [{c.detail}]" if c.detail else c.name for c in cases)


def test_criterion_01_fejer_convolution(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(suites.FAMILY_SEED + 1)
    primes = arith.primes_up_to(100)
    x = 10**5
    g_min, mult, stated, mixture = math.inf, 0.0, 0.0, 0.0
    for chi in suites.seeded_character_family(50):
        m = MultiplicativeModel.from_character(chi, x)
        tab = build_convolution(m, x)
        g_min = min(g_min, float(tab.g[1:].min()))
        a, b = suites._coprime_pairs(rng, x, 10**4)
        lhs, rhs = tab.g[a * b], tab.g[a] * tab.g[b]
        mult = max(mult, float((np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))).max()))
        for p in primes:
            stated = max(stated, prime_power_identity_check(m, int(p), 10, table=tab, closed_form="single"))
            mixture = max(mixture, prime_power_identity_check(m, int(p), 10, table=tab, closed_form="mixture"))
    elapsed = time.perf_counter() - t0
    ok = g_min >= -1e-9 and mult <= 1e-9 and stated <= 1e-9 and elapsed < 60
    criterion(1, ok, f"min g {g_min:.2e}, multiplicativity {mult:.2e}, "
                     f"g(p^k) vs (k+1)K_(k+1) max diff {stated:.3g} (exact kernel mixture {mixture:.2e}), "
                     f"{elapsed:.1f}s")
    # the parts that do hold are asserted on their own so a regression there still shows
    assert g_min >= -1e-9 and mult <= 1e-9 and mixture <= 1e-9 and elapsed < 60
    assert stated <= 1e-9, "single-kernel prime-power form fails for k >= 2; see decisions ledger"


def test_criterion_02_gauss(criterion):
    t0 = time.perf_counter()
    ok, text = all_ok(suites.suite_gauss())
    elapsed = time.perf_counter() - t0
    assert criterion(2, ok and elapsed < 10, f"{text}; {elapsed:.1f}s")


def test_criterion_03_gs_identity(criterion):
    t0 = time.perf_counter()
    worst, n = suites.gs_grid_worst()
    elapsed = time.perf_counter() - t0
    assert criterion(3, worst <= 1e-8 and elapsed < 120, f"{n} cases, max rel {worst:.2e}, {elapsed:.1f}s")


def test_criterion_04_orthogonality(criterion):
    worst, n = suites.orthogonality_worst()
    assert criterion(4, worst <= 1e-9, f"{n} pairs, max rel {worst:.2e}")


def test_criterion_05_polya(criterion, caps_path):
    ok, text = all_ok(suites.suite_polya(suites.load_caps(caps_path)))
    assert criterion(5, ok, text)


def test_criterion_06_schur(criterion):
    ok, text = all_ok(suites.suite_schur())
    assert criterion(6, ok, text)


def test_criterion_07_structure(criterion):
    ok, text = all_ok(suites.suite_characters())
    assert criterion(7, ok, text)


def test_criterion_08_pretentious_axioms(criterion):
    w = suites.triangle_worst()
    bad, n = suites.self_distance_mismatches()
    rep = suites.planted_twist()
    ok = w <= 1e-9 and bad == 0 and abs(rep.t_star - 0.3) <= 1e-3
    assert criterion(8, ok, f"triangle max excess {w:.2e}; self-distance exact on {n - bad}/{n}; "
                            f"planted t* = {rep.t_star:.6f}")


def test_criterion_09_dickman(criterion):
    ok, text = all_ok(suites.suite_dickman())
    assert criterion(9, ok, text)


def test_criterion_10_calibrated_suites(criterion, caps_path, capsys):
    doc = json.loads(caps_path.read_text())
    provenance = all({"family", "worst_case", "headroom", "hash"} <= set(e) for e in doc["constants"])
    caps = suites.load_caps(caps_path)
    t0 = time.perf_counter()
    code = cli.main(["verify", "all", "--caps", str(caps_path)])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out
    fails = [ln for ln in out.splitlines() if ln.startswith("FAIL")]
    summary = out.strip().splitlines()[-1]
    ok = provenance and code == 0 and not fails and elapsed < 600
    caps_text = ", ".join(f"{k} = {v:.4g}" for k, v in caps.items())
    assert criterion(10, ok, f"{caps_text}; verify all exit {code}, {summary}, {elapsed:.0f}s")


def test_criterion_11_scan(criterion):
    base = dict(qmin=3, qmax=2000, order=2, parity="odd", primes_only=True, eps=(0.1, 0.25, 0.5))
    t0 = time.perf_counter()
    one = cli.run_scan(cli.RunConfig(threads=1, **base))
    elapsed = time.perf_counter() - t0
    eight = cli.run_scan(cli.RunConfig(threads=8, **base))
    rows = [ln for ln in one.splitlines() if ln and not ln.startswith("#")][1:]
    footer = [ln for ln in one.splitlines() if ln.startswith("# spearman")]
    ok = one == eight and len(footer) == 3 and elapsed < 60
    assert criterion(11, ok, f"{len(rows)} rows, identical across 1 and 8 threads: {one == eight}, "
                             f"{len(footer)} correlation lines, {elapsed:.1f}s")
