import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from charlab import arith
from charlab.characters import (
    DirichletCharacter,
    conductor_and_primitive_part,
    conjugate,
    enumerate_characters,
    evaluate,
    induce,
    multiply,
    n_chi,
    power,
    primitive_part,
    principal,
    quadratic_character,
)
from charlab.unitvalue import UnitValue

ONE = UnitValue(0, 1)
MINUS_ONE = UnitValue(1, 2)


def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def brute_conductor(chi):
    """Smallest d | q such that chi is constant on units in each class mod d."""
    q = chi.q
    units = [n for n in range(1, q + 1) if math.gcd(n, q) == 1]
    for d in arith.divisors(q):
        classes = {}
        if all(classes.setdefault(n % d, chi(n)) == chi(n) for n in units):
            return d
    return q


def brute_order(chi):
    units = [n for n in range(1, chi.q + 1) if math.gcd(n, chi.q) == 1]
    k = 1
    while not all(chi(n) ** k == ONE for n in units):
        k += 1
    return k


def random_character(rng, qmax=300):
    q = rng.randrange(1, qmax)
    chars = enumerate_characters(q)
    return chars[rng.randrange(len(chars))]


def test_enumeration_examples():
    assert len(enumerate_characters(5, order=4, primitive_only=True)) == 2
    (c3,) = enumerate_characters(3, order=2)
    assert c3.is_odd and c3.is_primitive
    assert len(enumerate_characters(1)) == 1


def test_primitive_count_mod_12():
    # both components must be primitive: the odd character mod 4 times the Legendre symbol mod 3
    (c,) = enumerate_characters(12, primitive_only=True)
    assert c.parity == 1 and c.order == 2
    assert enumerate_characters(6, primitive_only=True) == []


def test_count_equals_phi():
    for q in range(1, 400):
        chars = enumerate_characters(q)
        assert len(chars) == arith.euler_phi(q) == len(set(chars))
        assert chars == sorted(chars)


def test_evaluate_examples():
    (odd4,) = [c for c in enumerate_characters(4) if not c.is_principal]
    assert odd4(3) == MINUS_ONE
    assert quadratic_character(7)(3) == MINUS_ONE
    for c in enumerate_characters(6):
        assert c(3).is_zero
    assert all(c(1) == ONE for q in range(1, 60) for c in enumerate_characters(q))


def test_legendre_table():
    for p in arith.primes_up_to(200).tolist()[1:]:
        chi = quadratic_character(p)
        for a in range(-p, 2 * p):
            assert complex(chi(a)) == legendre(a, p)


def test_parity_matches_minus_one():
    for q in range(1, 200):
        for c in enumerate_characters(q):
            assert complex(c(-1)) == c.parity


def test_multiplicativity_exact():
    rng = random.Random(11)
    for _ in range(10**4):
        chi = random_character(rng)
        m, n = rng.randrange(-10**6, 10**6), rng.randrange(-10**6, 10**6)
        assert evaluate(chi, m * n) == evaluate(chi, m) * evaluate(chi, n)


def test_order_and_conductor_brute_force():
    for q in range(1, 80):
        for c in enumerate_characters(q):
            assert c.order == brute_order(c)
            assert c.conductor == brute_conductor(c)
            assert arith.euler_phi(q) % c.order == 0 and q % c.conductor == 0
            assert c.is_primitive == (c.conductor == q)


def test_conductor_examples():
    star, q0 = conductor_and_primitive_part(principal(12))
    assert star.q == 1 and q0 == 12
    (odd4,) = [c for c in enumerate_characters(4) if c.is_odd]
    lifted = induce(odd4, 8)
    assert lifted.conductor == 4 and primitive_part(lifted) == odd4
    assert all(lifted(n) == odd4(n) for n in range(1, 64, 2))
    assert quadratic_character(5).conductor == 5


def test_primitive_part_preserves_order_and_values():
    for q in range(1, 300):
        for c in enumerate_characters(q):
            star = primitive_part(c)
            assert star.is_primitive and star.order == c.order
            assert induce(star, q) == c


def test_odd_order_characters_are_even():
    for q in range(1, 300):
        for c in enumerate_characters(q):
            if c.order % 2 == 1:
                assert c.parity == 1


def test_multiply_and_conjugate():
    rng = random.Random(5)
    for _ in range(300):
        a, b = random_character(rng, 60), random_character(rng, 60)
        ab = multiply(a, b)
        assert ab.q == arith.lcm(a.q, b.q)
        assert ab.parity == a.parity * b.parity
        for n in range(1, 200):
            if math.gcd(n, ab.q) == 1:
                assert ab(n) == a(n) * b(n)
        assert multiply(a, conjugate(a)).is_principal
        assert conjugate(a).order == a.order
    (odd4,) = [c for c in enumerate_characters(4) if c.is_odd]
    prod = multiply(odd4, quadratic_character(3))
    assert prod.q == 12 and prod.parity == 1
    assert power(quadratic_character(5), 2).is_principal


def test_orthogonality_columns_exact():
    from charlab.unitvalue import CyclotomicInteger

    for q in range(1, 60):
        chars = enumerate_characters(q)
        L = arith.lcm(*(c.order for c in chars))
        for n in range(1, q + 1):
            if math.gcd(n, q) != 1:
                continue
            acc = CyclotomicInteger(L)
            for c in chars:
                acc.add_unit(c(n))
            target = CyclotomicInteger(L)
            target.add_root(0, arith.euler_phi(q) if n % q == 1 % q else 0)
            assert acc == target


def test_n_chi():
    assert n_chi(quadratic_character(7)) == 3
    assert n_chi(quadratic_character(5)) == 2
    assert n_chi(principal(6)) is None
    for p in arith.primes_up_to(2000).tolist()[1:]:
        least = next(a for a in range(2, p) if legendre(a, p) == -1)
        assert n_chi(quadratic_character(p)) == least


def test_labels_roundtrip():
    for q in (1, 2, 8, 12, 45, 64, 97):
        for c in enumerate_characters(q):
            assert DirichletCharacter.from_label(c.label) == c
            assert DirichletCharacter.from_conrey(q, c.conrey_number()) == c
    with pytest.raises(ValueError):
        DirichletCharacter.from_label("q=7")
    with pytest.raises(ValueError):
        DirichletCharacter(8, [1])


def test_large_modulus_discrete_logs():
    p = 1000003
    chi = DirichletCharacter(p, [1])
    g = arith.primitive_root(p)
    for k in (0, 1, 2, 12345, p - 2):
        assert chi(pow(g, k, p)) == UnitValue(k, p - 1)


@given(st.integers(2, 500), st.integers(0, 10**6), st.data())
def test_values_are_roots_of_unity_of_dividing_order(q, n, data):
    chars = enumerate_characters(q)
    c = chars[data.draw(st.integers(0, len(chars) - 1))]
    v = c(n)
    if math.gcd(n, q) == 1:
        assert not v.is_zero and c.order % v.m == 0
    else:
        assert v.is_zero
