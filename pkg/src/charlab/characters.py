"""Exact Dirichlet character algebra.

A character mod q is an exponent list against the fixed generator basis of
``arith.unit_group_generators``: its value on the i-th generator (of order d_i)
is e(exponents[i] / d_i). Text form: ``q=<int>;e=<comma-separated exponents>``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

from . import arith
from .arith import FactoredModulus, as_modulus
from .unitvalue import UnitValue, phases_to_complex

FULL_LOG_TABLE_LIMIT = 10**6


@dataclass(frozen=True)
class _Gen:
    comp: int  # index into the modulus' prime-power components
    p: int
    e: int
    pe: int
    g: int
    order: int


@lru_cache(maxsize=4096)
def _basis(q: int) -> tuple[_Gen, ...]:
    gens = []
    for ci, (p, e) in enumerate(arith.factorize(q).factors):
        for g, d in arith.unit_group_generators(p, e):
            gens.append(_Gen(ci, p, e, p**e, g, d))
    return tuple(gens)


def _group_exponent(q: int) -> int:
    return arith.lcm(*(b.order for b in _basis(q)))


# -- discrete logarithms -------------------------------------------------------


@lru_cache(maxsize=256)
def _component_log_table(p: int, e: int) -> np.ndarray:
    """Logs of every residue mod p^e against the component generators (-1: not a unit)."""
    pe = p**e
    gens = arith.unit_group_generators(p, e)
    table = np.full((pe, len(gens)), -1, dtype=np.int64)
    if p == 2 and e == 1:
        table[1] = []
    elif p == 2 and e == 2:
        table[1, 0] = 0
        table[3, 0] = 1
    elif p == 2:
        d = 2 ** (e - 2)
        powers = _power_orbit(5, d, pe)
        table[powers, 0] = 0
        table[powers, 1] = np.arange(d)
        neg = (pe - powers) % pe
        table[neg, 0] = 1
        table[neg, 1] = np.arange(d)
    else:
        g, d = gens[0]
        table[_power_orbit(g, d, pe), 0] = np.arange(d)
    table.setflags(write=False)
    return table


def _power_orbit(g: int, count: int, m: int) -> np.ndarray:
    """g^0, g^1, ..., g^(count-1) mod m (m < 2^31), doubling the filled prefix each round."""
    out = np.empty(count, dtype=np.int64)
    out[0] = 1 % m
    filled = 1
    while filled < count:
        take = min(filled, count - filled)
        out[filled : filled + take] = out[:take] * pow(g, filled, m) % m
        filled += take
    return out


@lru_cache(maxsize=64)
def _bsgs_table(g: int, order: int, m: int) -> tuple[dict[int, int], int, int]:
    step = math.isqrt(order) + 1
    baby = {}
    x = 1
    for j in range(step):
        baby.setdefault(x, j)
        x = x * g % m
    giant = pow(g, -step, m)
    return baby, step, giant


def _bsgs(g: int, order: int, m: int, target: int) -> int:
    baby, step, giant = _bsgs_table(g, order, m)
    y = target % m
    for i in range(step + 1):
        j = baby.get(y)
        if j is not None:
            return (i * step + j) % order
        y = y * giant % m
    raise ArithmeticError(f"{target} is not a power of {g} mod {m}")


def _component_logs(p: int, e: int, r: int) -> list[int] | None:
    """Logs of a single residue r mod p^e; None if r is not a unit."""
    pe = p**e
    r %= pe
    if r % p == 0:
        return None
    if pe <= FULL_LOG_TABLE_LIMIT:
        return [int(v) for v in _component_log_table(p, e)[r]]
    if p == 2:
        a = 0 if r % 4 == 1 else 1
        y = r if a == 0 else pe - r
        return [a, _bsgs(5, 2 ** (e - 2), pe, y)]
    g, d = arith.unit_group_generators(p, e)[0]
    return [_bsgs(g, d, pe, r)]


@lru_cache(maxsize=64)
def log_table(q: int) -> np.ndarray:
    """(q, ngens) array of discrete logs of every residue mod q; rows of -1 for non-units."""
    if q > FULL_LOG_TABLE_LIMIT:
        raise arith.ResourceError(f"full log tables stop at q = {FULL_LOG_TABLE_LIMIT}")
    basis = _basis(q)
    n = np.arange(q)
    table = np.full((q, len(basis)), -1, dtype=np.int64)
    unit = np.ones(q, dtype=bool)
    col = 0
    for p, e in arith.factorize(q).factors:
        comp = _component_log_table(p, e)
        k = comp.shape[1]
        sub = comp[n % p**e]
        table[:, col : col + k] = sub
        unit &= n % p != 0
        col += k
    table[~unit] = -1
    table.setflags(write=False)
    return table


# -- the character type --------------------------------------------------------


class DirichletCharacter:
    """Immutable Dirichlet character mod q, identified by its exponent list."""

    __slots__ = ("modulus", "exponents", "__dict__")

    def __init__(self, q: int | FactoredModulus, exponents: Sequence[int]):
        modulus = as_modulus(q)
        basis = _basis(modulus.q)
        if len(exponents) != len(basis):
            raise ValueError(f"mod {modulus.q} needs {len(basis)} exponents, got {len(exponents)}")
        self.modulus = modulus
        self.exponents = tuple(int(x) % b.order for x, b in zip(exponents, basis))

    # identity and text form

    @property
    def q(self) -> int:
        return self.modulus.q

    @property
    def label(self) -> str:
        return f"q={self.q};e={','.join(map(str, self.exponents))}"

    @classmethod
    def from_label(cls, text: str) -> DirichletCharacter:
        fields = dict(part.split("=", 1) for part in text.strip().split(";") if part)
        if set(fields) != {"q", "e"}:
            raise ValueError(f"bad character label {text!r}; expected q=<int>;e=<exponents>")
        exps = [int(v) for v in fields["e"].split(",") if v.strip() != ""]
        return cls(int(fields["q"]), exps)

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.q == other.q and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.q, self.exponents))

    def __lt__(self, other: DirichletCharacter):
        return (self.q, self.exponents) < (other.q, other.exponents)

    def __repr__(self):
        return f"DirichletCharacter({self.label})"

    # cached invariants

    @cached_property
    def order(self) -> int:
        return arith.lcm(*(b.order // math.gcd(x, b.order) for x, b in zip(self.exponents, _basis(self.q))))

    @cached_property
    def parity(self) -> int:
        # -1 sits at half the cyclic order in every component that carries it
        flips = 0
        for x, b in zip(self.exponents, _basis(self.q)):
            if b.p != 2 or b.g == b.pe - 1:
                flips += x
        return -1 if flips % 2 else 1

    @property
    def is_odd(self) -> bool:
        return self.parity == -1

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    @cached_property
    def conductor(self) -> int:
        cond = 1
        basis = _basis(self.q)
        for ci, (p, e) in enumerate(self.modulus.factors):
            exps = [(x, b) for x, b in zip(self.exponents, basis) if b.comp == ci]
            cond *= _component_conductor(p, e, [x for x, _ in exps])
        return cond

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.q

    # evaluation

    def __call__(self, n: int) -> UnitValue:
        return evaluate(self, n)

    def phase_table(self) -> tuple[np.ndarray, int]:
        """Phases over residues 0..q-1: entry k means e(k/order), -1 means zero."""
        num = phase_matrix([self])
        return num[0], self.order

    def values(self, upto: int) -> np.ndarray:
        """Complex values at n = 0..upto (periodic extension of the residue table)."""
        num, o = self.phase_table()
        table = phases_to_complex(num, o)
        idx = np.arange(upto + 1) % self.q
        return table[idx]

    def value_at_generators(self) -> list[UnitValue]:
        return [UnitValue(x, b.order) for x, b in zip(self.exponents, _basis(self.q))]

    def conrey_number(self) -> int:
        """Conrey-style index against this package's generator basis.

        For each component, the index residue is prod g_i^(exponent_i); the character
        is then n -> prod e(log(index) * log(n) / d) with the same generators.
        """
        residues, moduli = [], []
        basis = _basis(self.q)
        for ci, (p, e) in enumerate(self.modulus.factors):
            pe = p**e
            r = 1
            for x, b in zip(self.exponents, basis):
                if b.comp == ci:
                    r = r * pow(b.g, x, pe) % pe
            residues.append(r)
            moduli.append(pe)
        return arith.crt(residues, moduli) if moduli else 1

    @classmethod
    def from_conrey(cls, q: int, n: int) -> DirichletCharacter:
        if math.gcd(n, q) != 1:
            raise ValueError(f"Conrey index {n} is not a unit mod {q}")
        exps: list[int] = []
        for p, e in arith.factorize(q).factors:
            exps.extend(_component_logs(p, e, n))
        return cls(q, exps)


def _component_conductor(p: int, e: int, exps: list[int]) -> int:
    if not any(exps):
        return 1
    if p != 2:
        (c,) = exps
        v = 0
        while c % p == 0:
            c //= p
            v += 1
        return p ** (e - v)
    if e == 2:
        return 4
    a, b = exps
    if b == 0:
        return 4
    v = 0
    while b % 2 == 0:
        b //= 2
        v += 1
    return 2 ** (e - v)


def evaluate(chi: DirichletCharacter, n: int) -> UnitValue:
    """chi(n) exactly; chi(-n) = chi(-1) chi(n) falls out of reducing n mod q."""
    q = chi.q
    r = n % q
    if math.gcd(r, q) != 1:
        return UnitValue.zero()
    if q == 1:
        return UnitValue(0, 1)
    basis = _basis(q)
    L = _group_exponent(q)
    total = 0
    i = 0
    for p, e in chi.modulus.factors:
        logs = _component_logs(p, e, r)
        for lg in logs:
            b = basis[i]
            total += chi.exponents[i] * lg * (L // b.order)
            i += 1
    return UnitValue(total, L)


def phase_matrix(chars: Sequence[DirichletCharacter]) -> np.ndarray:
    """Phase numerators of several characters sharing one modulus.

    Row j, column r holds k with chi_j(r) = e(k / chi_j.order), or -1 when gcd(r, q) > 1.
    """
    if not chars:
        return np.zeros((0, 0), dtype=np.int64)
    q = chars[0].q
    if any(c.q != q for c in chars):
        raise ValueError("phase_matrix needs a common modulus")
    basis = _basis(q)
    if q == 1:
        return np.zeros((len(chars), 1), dtype=np.int64)
    if not basis:
        num = np.zeros((len(chars), q), dtype=np.int64)
        num[:, np.gcd(np.arange(q), q) != 1] = -1
        return num
    L = _group_exponent(q)
    logs = log_table(q)
    weights = np.array([[x * (L // b.order) for x, b in zip(c.exponents, basis)] for c in chars], dtype=np.int64)
    num = (weights @ np.where(logs >= 0, logs, 0).T) % L
    orders = np.array([c.order for c in chars], dtype=np.int64)
    num //= (L // orders)[:, None]
    num[:, np.gcd(np.arange(q), q) != 1] = -1
    return num


def value_matrix(chars: Sequence[DirichletCharacter]) -> np.ndarray:
    """Complex value tables over residues 0..q-1 for characters sharing one modulus."""
    num = phase_matrix(chars)
    out = np.zeros(num.shape, dtype=np.complex128)
    for j, c in enumerate(chars):
        out[j] = phases_to_complex(num[j], c.order)
    return out


# -- construction and enumeration ----------------------------------------------


def principal(q: int) -> DirichletCharacter:
    return DirichletCharacter(q, [0] * len(_basis(q)))


def _generator_lift(Q: FactoredModulus, gen: _Gen) -> int:
    residues = [gen.g if ci == gen.comp else 1 for ci in range(len(Q.factors))]
    return arith.crt(residues, Q.prime_powers())


def from_generator_values(q: int | FactoredModulus, value: Callable[[int], UnitValue]) -> DirichletCharacter:
    """Build the character mod q whose value at each generator lift n is ``value(n)``."""
    Q = as_modulus(q)
    exps = []
    for gen in _basis(Q.q):
        v = value(_generator_lift(Q, gen))
        if v.is_zero:
            raise ValueError("a character cannot vanish on a unit")
        if gen.order % v.m:
            raise ValueError(f"value {v} is not of order dividing {gen.order}")
        exps.append(v.a * (gen.order // v.m))
    return DirichletCharacter(Q, exps)


def induce(chi: DirichletCharacter, Q: int) -> DirichletCharacter:
    """The character mod Q (a multiple of chi.q) agreeing with chi on units mod Q."""
    if Q % chi.q:
        raise ValueError(f"cannot induce from modulus {chi.q} to {Q}")
    if Q == chi.q:
        return chi
    return from_generator_values(Q, lambda n: evaluate(chi, n))


def primitive_part(chi: DirichletCharacter) -> DirichletCharacter:
    """The primitive character inducing chi (modulus = conductor)."""
    cond = chi.conductor
    if cond == chi.q:
        return chi
    Qs = as_modulus(cond)
    q_mod = chi.modulus
    exps = []
    for gen in _basis(cond):
        # lift to a unit mod q that is the generator at this prime and 1 elsewhere
        residues = [gen.g if p == gen.p else 1 for p, _ in q_mod.factors]
        n = arith.crt(residues, q_mod.prime_powers())
        v = evaluate(chi, n)
        exps.append(v.a * (gen.order // v.m))
    return DirichletCharacter(Qs, exps)


def conductor_and_primitive_part(chi: DirichletCharacter) -> tuple[DirichletCharacter, int]:
    """(xi*, q0): xi* primitive mod the conductor q*, and q0 = q / q*."""
    xi = primitive_part(chi)
    return xi, chi.q // xi.q


def conjugate(chi: DirichletCharacter) -> DirichletCharacter:
    return DirichletCharacter(chi.modulus, [-x for x in chi.exponents])


def multiply(a: DirichletCharacter, b: DirichletCharacter) -> DirichletCharacter:
    """Pointwise product, living mod lcm(a.q, b.q)."""
    Q = arith.lcm(a.q, b.q)
    A, B = induce(a, Q), induce(b, Q)
    return DirichletCharacter(Q, [x + y for x, y in zip(A.exponents, B.exponents)])


def power(chi: DirichletCharacter, k: int) -> DirichletCharacter:
    return DirichletCharacter(chi.modulus, [k * x for x in chi.exponents])


def enumerate_characters(
    q: int | FactoredModulus,
    order: int | None = None,
    parity: int | None = None,
    primitive_only: bool = False,
) -> list[DirichletCharacter]:
    """All characters mod q passing the filters, in lexicographic exponent order."""
    return list(iter_characters(q, order=order, parity=parity, primitive_only=primitive_only))


def iter_characters(q, order=None, parity=None, primitive_only=False) -> Iterator[DirichletCharacter]:
    Q = as_modulus(q)
    basis = _basis(Q.q)
    if order is not None and Q.phi % order:
        return
    if primitive_only and not _has_primitive(Q):
        return
    for exps in itertools.product(*(range(b.order) for b in basis)):
        chi = DirichletCharacter(Q, exps)
        if order is not None and chi.order != order:
            continue
        if parity is not None and chi.parity != parity:
            continue
        if primitive_only and not chi.is_primitive:
            continue
        yield chi


def _has_primitive(Q: FactoredModulus) -> bool:
    for p, e in Q.factors:
        if p == 2 and e == 1:
            return False
    return True


def n_chi(chi: DirichletCharacter) -> int | None:
    """Least n >= 1 with chi(n) not in {0, 1}; None for principal characters."""
    if chi.is_principal:
        return None
    num, _ = chi.phase_table()
    for p in arith.primes_up_to(chi.q).tolist():
        if num[p % chi.q] > 0:
            n = p
            break
    else:  # pragma: no cover - a nonprincipal character is nontrivial on some prime below q
        raise ArithmeticError(f"no prime witness found for {chi}")
    small = num[np.arange(1, n) % chi.q]
    if np.any(small > 0):
        raise ArithmeticError("n_chi verification failed")
    return n


def quadratic_character(p: int) -> DirichletCharacter:
    """The Legendre symbol mod an odd prime p."""
    if p == 2 or not arith.is_prime(p):
        raise ValueError("Legendre symbol needs an odd prime")
    return DirichletCharacter(p, [(p - 1) // 2])


def characters_by_label(labels: Sequence[str]) -> list[DirichletCharacter]:
    return [DirichletCharacter.from_label(s) for s in labels]
