import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from charlab import sums
from charlab.arith import ResourceError
from charlab.characters import (
    DirichletCharacter,
    enumerate_characters,
    principal,
    quadratic_character,
)

ODD4 = DirichletCharacter(4, [1])


def direct_prefix(chi, T):
    s, out = 0j, []
    for n in range(1, T + 1):
        s += complex(chi(n))
        out.append(s)
    return out


def direct_gauss(chi):
    return sum(complex(chi(a)) * cmath.exp(2j * math.pi * a / chi.q) for a in range(chi.q))


def direct_polya_error(chi):
    q = chi.q
    tau = direct_gauss(chi)
    S = direct_prefix(chi, q)
    worst = 0.0
    for t in range(1, q + 1):
        acc = 0j
        for n in list(range(-q, 0)) + list(range(1, q + 1)):
            acc += complex(chi(n)).conjugate() / n * (1 - cmath.exp(-2j * math.pi * n * t / q))
        worst = max(worst, abs(S[t - 1] - tau / (2j * math.pi) * acc))
    return worst


def test_build_series_examples():
    s3 = sums.build_series(quadratic_character(3), 3)
    assert [complex(s3.S(t)) for t in (1, 2, 3)] == [1, 0, 0]
    assert s3.pv_max == 1 and s3.pv_argmax == 1
    s7 = sums.build_series(quadratic_character(7), 7)
    assert [s7.S(t).real for t in range(1, 8)] == [1, 2, 1, 2, 1, 0, 0]
    assert s7.pv_max == 2 and s7.pv_argmax == 2  # ties at t = 2 and t = 4


def test_series_matches_direct_sums():
    for q in range(3, 40):
        for chi in enumerate_characters(q):
            T = 3 * q + 5
            ser = sums.build_series(chi, T)
            ref = direct_prefix(chi, T)
            assert np.allclose(ser.cesaro[1:], ref, atol=1e-12)
            ref_log = np.cumsum([complex(chi(n)) / n for n in range(1, T + 1)])
            assert np.allclose(ser.logsum[1:], ref_log, atol=1e-12)
            if not chi.is_principal:
                assert abs(ser.S(q)) < 1e-12
            assert np.all(np.abs(ser.cesaro[1:]) <= np.arange(1, T + 1) + 1e-12)


def test_periodicity_exact():
    for q in range(3, 101):
        for chi in [c for c in enumerate_characters(q) if not c.is_principal][:3]:
            S = sums.exact_prefix_sums(chi, 3 * q)
            for t in range(0, 2 * q + 1):
                assert S[t + q] == S[t]


def test_streaming_agrees_with_dense():
    chi = DirichletCharacter(101, [7])
    dense = sums.build_series(chi, 5000)
    streamed = sums._streamed_series(chi, 5000, sums._period_prefix(chi))
    assert streamed.pv_argmax == dense.pv_argmax and abs(streamed.pv_max - dense.pv_max) < 1e-12
    assert streamed.log_argmax == dense.log_argmax
    with pytest.raises(ResourceError):
        sums.build_series(chi, 10**8 + 1)


def test_gauss_sum_examples():
    assert abs(sums.gauss_sum(ODD4) - 2j) < 1e-15
    assert abs(sums.gauss_sum(quadratic_character(5)) - math.sqrt(5)) < 1e-14
    assert abs(sums.gauss_sum(principal(4))) < 1e-15


def test_gauss_sum_matches_direct_and_modulus():
    for q in range(3, 120):
        for chi in enumerate_characters(q, primitive_only=True):
            tau = sums.gauss_sum(chi)
            assert abs(tau - direct_gauss(chi)) < 1e-9
            assert abs(abs(tau) ** 2 - q) <= 1e-6 * q


def test_polya_against_direct_expansion():
    for q in (3, 4, 5, 7, 8, 11, 12, 13):
        for chi in enumerate_characters(q, primitive_only=True):
            err, t = sums.polya_expansion_error(chi)
            assert abs(err - direct_polya_error(chi)) < 1e-9
            assert err <= 10 * math.log(q)
            assert 1 <= t <= q
    with pytest.raises(ValueError):
        sums.polya_expansion_error(principal(5))


def test_polya_error_vanishes_at_t_equals_q():
    chi = quadratic_character(7)
    errs = sums.polya_errors([chi])
    assert errs.shape == (1, 2)


def test_twisted_log_sum():
    chi3 = quadratic_character(3)
    one_sided = sums.twisted_log_sum(chi3, 0.0, 10)
    assert abs(one_sided - (1 - 1 / 2 + 1 / 4 - 1 / 5 + 1 / 7 - 1 / 8 + 1 / 10)) < 1e-15
    assert abs(one_sided - 0.6678571428571428) < 1e-12
    assert abs(sums.twisted_log_sum(chi3, 0.0, 10, two_sided=True) - 2 * one_sided) < 1e-14
    assert abs(sums.twisted_log_sum(quadratic_character(5), 0.0, 50, two_sided=True)) < 1e-14
    chi = DirichletCharacter(7, [1])
    ref = sum(complex(chi(n)) * cmath.exp(2j * math.pi * n * 0.3) / n for n in range(-40, 41) if n)
    assert abs(sums.twisted_log_sum(chi, 0.3, 40, two_sided=True) - ref) < 1e-12


def test_gs_identity_examples():
    triv = principal(1)
    _, _, d = sums.gs_identity_check(quadratic_character(3), triv, 1, 4, 500)
    assert d <= 1e-8
    _, _, d = sums.gs_identity_check(quadratic_character(5), ODD4, 2, 3, 1000)
    assert d <= 1e-8
    lhs, rhs, d = sums.gs_identity_check(quadratic_character(3), triv, 0, 1, 100)
    assert abs(lhs - sums.twisted_log_sum(quadratic_character(3), 0.0, 100, two_sided=True)) < 1e-14
    assert d <= 1e-12
    with pytest.raises(ValueError):
        sums.gs_identity_check(quadratic_character(3), triv, 2, 4, 10)


def test_gs_grid_matches_single_case():
    chi, psi = DirichletCharacter(13, [1]), DirichletCharacter(5, [1])
    rows = sums.gs_identity_grid(chi, psi, 12, (10, 100))
    for r, b, N, lhs, rhs in rows[::7]:
        l2, r2, _ = sums.gs_identity_check(chi, psi, b, r, N)
        assert abs(lhs - l2) < 1e-12 and abs(rhs - r2) < 1e-12
        assert abs(lhs - rhs) <= 1e-8 * (1 + abs(lhs))


def test_orthogonality_twist():
    psi5 = quadratic_character(5)
    _, _, d = sums.orthogonality_twist_check(ODD4, psi5, 200)
    assert d <= 1e-9
    _, _, d = sums.orthogonality_twist_check(quadratic_character(3), psi5, 1000)
    assert d <= 1e-9
    with pytest.raises(ValueError):
        sums.orthogonality_twist_check(quadratic_character(5), psi5, 10)


def test_orthogonality_single_term_is_gauss_relation():
    psi = quadratic_character(5)
    lhs, rhs, d = sums.orthogonality_twist_check(ODD4, psi, 1)
    assert d < 1e-14


def convergents(x: Fraction):
    out = []
    h0, h1, k0, k1 = 0, 1, 1, 0
    while True:
        a = x.numerator // x.denominator
        h0, h1, k0, k1 = h1, a * h1 + h0, k1, a * k1 + k0
        out.append((h1, k1))
        if x == a:
            return out
        x = 1 / (x - a)


def test_dirichlet_approx_examples():
    r = sums.dirichlet_approx(0.0, 10, 5)
    assert (r.b, r.r, r.arc) == (0, 1, "Major")
    r = sums.dirichlet_approx(1 / 3, 10, 5)
    assert (r.b, r.r, r.arc) == (1, 3, "Major")
    r = sums.dirichlet_approx(math.sqrt(2) - 1, 100, 5)
    assert (r.b, r.r, r.arc) == (29, 70, "Minor")
    assert abs(math.sqrt(2) - 1 - 12 / 29) > 1 / 2900  # the smaller convergent is not admissible


@given(st.floats(0, 1), st.floats(1, 1e4), st.floats(0, 1))
def test_dirichlet_approx_properties(alpha, R, mfrac):
    M = 1 + mfrac * (R - 1)
    res = sums.dirichlet_approx(alpha, R, M)
    x = Fraction(alpha)
    assert 1 <= res.r <= R and math.gcd(res.b, res.r) == 1
    assert abs(x - Fraction(res.b, res.r)) * res.r * Fraction(R) <= 1
    assert (res.arc == "Major") == (res.r <= M)
    conv = convergents(x)
    assert (res.b, res.r) in conv
    for b, r in conv:
        if r >= res.r:
            break
        assert abs(x - Fraction(b, r)) * r * Fraction(R) > 1


def test_savings_examples():
    p3 = sums.savings_profile(quadratic_character(3), [0.5, 1.0])
    assert p3.pv_max == 1 and abs(p3.a_q - math.sqrt(3) * math.log(3)) < 1e-12
    assert abs(p3.a_q - 1.903) < 1e-3
    assert p3.delta_eps[1] == 0.0
    p7 = sums.savings_profile(quadratic_character(7), [0.5])
    assert p7.delta_eps == [0.5] and p7.delta_argmax == [4]
    assert p7.n_chi == 3
    with pytest.raises(ValueError):
        sums.savings_profile(principal(7), [0.5])


def test_window_start():
    assert sums.window_start(7, 0.5) == 3
    assert sums.window_start(100, 0.5) == 11  # t > 10 strictly
    assert sums.window_start(1000, 1 / 3) == 11
    assert sums.window_start(7, 1.0) == 8


@given(st.integers(3, 300), st.data())
def test_delta_non_increasing_in_eps(q, data):
    chars = [c for c in enumerate_characters(q) if not c.is_principal]
    if not chars:
        return
    chi = chars[data.draw(st.integers(0, len(chars) - 1))]
    grid = sorted(data.draw(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6)))
    prof = sums.savings_profile(chi, grid)
    assert prof.a_q > 0
    assert all(a >= b - 1e-15 for a, b in zip(prof.delta_eps, prof.delta_eps[1:]))


def test_thmgen_rhs():
    with pytest.raises(ValueError):
        sums.thmgen_rhs(10.0, 2, math.exp(math.e))
    v = sums.thmgen_rhs(1e6, 2, 1e6)
    la = math.log(1e6)
    assert abs(v - (math.log(la) / la) ** (1 / 76)) < 1e-15
    vals = [sums.thmgen_rhs(1.0, 2, a) for a in np.geomspace(100, 1e12, 50)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_delta_g():
    assert abs(sums.delta_g(3) - (1 - 3 * math.sqrt(3) / (2 * math.pi))) < 1e-15
    assert abs(sums.delta_g(3) - 0.17303) < 1e-4
    assert abs(sums.delta_g(5) - 0.06450) < 2e-5
    vals = [sums.delta_g(g) for g in range(3, 200, 2)]
    assert all(0 < b < a < 1 for a, b in zip(vals, vals[1:]))
    for bad in (2, 4, 1):
        with pytest.raises(ValueError):
            sums.delta_g(bad)
