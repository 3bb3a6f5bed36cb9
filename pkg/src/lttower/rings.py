"""Commutative coefficient rings for the series engine.

A ring object carries the operations; elements are plain Python values
(ints, Fractions, or dicts for polynomial rings) and are never mutated.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from .padic import NonUnitError, PadicContext, PadicInt, valuation_int


class IntegersMod:
    """Z/mZ with elements stored as ints in [0, m)."""

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("modulus must be positive")
        self.m = m
        self.zero = 0
        self.one = 1 % m

    def __repr__(self):
        return f"IntegersMod({self.m})"

    def __eq__(self, other):
        return type(other) is type(self) and other.m == self.m

    def __hash__(self):
        return hash((type(self).__name__, self.m))

    def add(self, a, b):
        return (a + b) % self.m

    def sub(self, a, b):
        return (a - b) % self.m

    def mul(self, a, b):
        return (a * b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def is_zero(self, a) -> bool:
        return a % self.m == 0

    def from_int(self, n: int):
        return n % self.m

    def is_unit(self, a) -> bool:
        from math import gcd
        return gcd(a, self.m) == 1

    def inv(self, a):
        if not self.is_unit(a):
            raise NonUnitError(f"{a} is not invertible mod {self.m}")
        return pow(a, -1, self.m)

    @property
    def characteristic(self) -> int:
        return self.m


class PadicRing(IntegersMod):
    """Z_p at precision N; elements are residues mod p^N."""

    def __init__(self, ctx: PadicContext):
        super().__init__(ctx.modulus)
        self.ctx = ctx

    def __repr__(self):
        return f"PadicRing(p={self.ctx.p}, N={self.ctx.N})"

    def to_padic(self, a) -> PadicInt:
        return self.ctx(a)


class Rationals:
    zero = Fraction(0)
    one = Fraction(1)
    characteristic = 0

    def __repr__(self):
        return "Rationals()"

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash("Rationals")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a) -> bool:
        return a == 0

    def from_int(self, n: int):
        return Fraction(n)

    def is_unit(self, a) -> bool:
        return a != 0

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(a)


class TruncatedPolynomialRing:
    """base[u_1..u_k] modulo all monomials of total degree > max_degree.

    Elements are dicts {exponent tuple: base element} without zero entries.
    The truncation is an ideal, so this is an honest commutative ring.
    """

    def __init__(self, base, names: tuple[str, ...], max_degree: int):
        self.base = base
        self.names = tuple(names)
        self.k = len(self.names)
        self.max_degree = max_degree
        self.zero = {}
        self.one = {} if base.is_zero(base.one) else {(0,) * self.k: base.one}

    def __repr__(self):
        return f"TruncatedPolynomialRing({self.base!r}, {self.names}, {self.max_degree})"

    def __eq__(self, other):
        return (type(other) is type(self) and other.base == self.base
                and other.names == self.names and other.max_degree == self.max_degree)

    def __hash__(self):
        return hash((self.base, self.names, self.max_degree))

    @property
    def characteristic(self):
        return self.base.characteristic

    def gen(self, i: int):
        e = [0] * self.k
        e[i] = 1
        if self.max_degree < 1:
            return {}
        return {tuple(e): self.base.one}

    def constant(self, c):
        return {} if self.base.is_zero(c) else {(0,) * self.k: c}

    def from_int(self, n: int):
        return self.constant(self.base.from_int(n))

    def add(self, a, b):
        base = self.base
        out = dict(a)
        for e, c in b.items():
            if e in out:
                s = base.add(out[e], c)
                if base.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return out

    def neg(self, a):
        return {e: self.base.neg(c) for e, c in a.items()}

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if not a or not b:
            return {}
        base, D = self.base, self.max_degree
        out: dict = {}
        for e1, c1 in a.items():
            d1 = sum(e1)
            for e2, c2 in b.items():
                if d1 + sum(e2) > D:
                    continue
                e = tuple(x + y for x, y in zip(e1, e2))
                v = base.mul(c1, c2)
                if e in out:
                    out[e] = base.add(out[e], v)
                else:
                    out[e] = v
        return {e: c for e, c in out.items() if not base.is_zero(c)}

    def is_zero(self, a) -> bool:
        return not a

    def constant_term(self, a):
        return a.get((0,) * self.k, self.base.zero)

    def is_unit(self, a) -> bool:
        # nilpotent truncation: unit iff the constant term is a unit
        return self.base.is_unit(self.constant_term(a))

    def inv(self, a):
        c0 = self.constant_term(a)
        c0inv = self.base.inv(c0)
        # a = c0 (1 - n) with n nilpotent; a^{-1} = c0^{-1} sum n^j
        n = self.neg(self.mul(a, self.constant(c0inv)))
        n = self.add(n, self.one)
        acc, term = dict(self.one), dict(self.one)
        for _ in range(self.max_degree):
            term = self.mul(term, n)
            if not term:
                break
            acc = self.add(acc, term)
        return self.mul(acc, self.constant(c0inv))

    def substitute(self, a, values: dict[int, object]):
        """Evaluate variables ``i`` at base-ring ``values[i]`` (others kept)."""
        base = self.base
        out: dict = {}
        for e, c in a.items():
            v = c
            e2 = list(e)
            for i, val in values.items():
                if e[i]:
                    v = base.mul(v, _base_pow(base, val, e[i]))
                    e2[i] = 0
            key = tuple(e2)
            out[key] = base.add(out[key], v) if key in out else v
        return {e: c for e, c in out.items() if not base.is_zero(c)}

    def monomials(self):
        for e in product(range(self.max_degree + 1), repeat=self.k):
            if sum(e) <= self.max_degree:
                yield e


def _base_pow(base, x, e: int):
    acc = base.one
    for _ in range(e):
        acc = base.mul(acc, x)
    return acc


def rational_to_residue(q: Fraction, m: int, p: int) -> int:
    """Image of a p-integral rational in Z/m, m a power of p."""
    q = Fraction(q)
    if q.denominator % p == 0:
        raise ValueError(f"{q} is not p-integral for p={p}")
    return q.numerator * pow(q.denominator, -1, m) % m


def p_integral(q: Fraction, p: int) -> bool:
    return Fraction(q).denominator % p != 0


def coefficient_valuation(q: Fraction, p: int):
    q = Fraction(q)
    if q == 0:
        return valuation_int(0, p)
    return valuation_int(q.numerator, p) - valuation_int(q.denominator, p)
