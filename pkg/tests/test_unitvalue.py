import cmath
import math

from hypothesis import given
from hypothesis import strategies as st

from charlab.unitvalue import (
    CyclotomicInteger,
    UnitValue,
    cyclotomic_polynomial,
    reduce_cyclotomic,
    root_of_unity,
)

roots = st.builds(UnitValue, st.integers(-50, 50), st.integers(1, 40))


def test_canonical_form():
    assert UnitValue(2, 4) == UnitValue(1, 2)
    assert UnitValue(5, 5) == UnitValue(0, 1)
    assert UnitValue(-1, 3) == UnitValue(2, 3)
    assert repr(UnitValue.zero()) == "Zero" and repr(UnitValue(3, 6)) == "Root(1,2)"


@given(roots, roots)
def test_product_is_exact(a, b):
    prod = a * b
    assert abs(complex(prod) - complex(a) * complex(b)) < 1e-12
    assert math.gcd(prod.a, prod.m) == 1 or prod.m == 1


@given(roots)
def test_modulus_one_and_conjugate(a):
    assert abs(abs(complex(a)) - 1) < 1e-15
    assert (a * a.conjugate()).is_one
    assert (a * UnitValue.zero()).is_zero


def test_quarter_turns_exact():
    assert root_of_unity(1, 4) == 1j and root_of_unity(2, 4) == -1 and root_of_unity(3, 12) == 1j


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    for n in range(1, 40):
        val = sum(c * cmath.exp(2j * math.pi * k / n) for k, c in enumerate(cyclotomic_polynomial(n)))
        assert abs(val) < 1e-9


def test_sum_of_all_roots_vanishes():
    for n in range(2, 30):
        assert not any(reduce_cyclotomic([1] * n, n))
        z = CyclotomicInteger(n)
        for k in range(n):
            z.add_root(k)
        assert z.is_zero()


@given(st.integers(1, 24), st.lists(st.integers(-3, 3), min_size=1, max_size=30))
def test_canonical_equality_matches_complex(n, coeffs):
    a = CyclotomicInteger(n, [0] * n)
    for k, c in enumerate(coeffs):
        a.add_root(k, c)
    b = CyclotomicInteger(n, a.canonical() + (0,) * (n - len(a.canonical())))
    assert a == b
    assert abs(complex(a) - complex(b)) < 1e-9
    assert a.is_zero() == (abs(complex(a)) < 1e-9)
