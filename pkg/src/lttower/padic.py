"""Exact arithmetic in Z/p^N, read as Z_p known to precision N.

Everything is an integer residue; there is no floating representation.
Valuations return ``INF`` when a residue is indistinguishable from zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

INF = math.inf


class PrecisionError(ArithmeticError):
    """A computation needs more p-adic (or series) precision than is available."""


class NonUnitError(ArithmeticError):
    pass


class ContextMismatch(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """The requested instance is larger than the configured enumeration budget."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def valuation_int(n: int, p: int) -> int | float:
    """v_p of a Python integer; ``INF`` for zero."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicContext:
    p: int
    N: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.N < 1:
            raise ValueError("precision N must be >= 1")

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    def __call__(self, value: int) -> "PadicInt":
        return PadicInt(self, value % self.modulus)


@dataclass(frozen=True)
class PadicInt:
    ctx: PadicContext
    residue: int

    def __post_init__(self):
        if not 0 <= self.residue < self.ctx.modulus:
            raise ValueError("residue out of range; build values with ctx(value)")

    def _coerce(self, other) -> int:
        if isinstance(other, PadicInt):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other.residue
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.ctx(self.residue + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.ctx(self.residue - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.ctx(o - self.residue)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.ctx(self.residue * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self.ctx(-self.residue)

    def __pow__(self, e: int):
        if e < 0:
            return pinv(self) ** (-e)
        return self.ctx(pow(self.residue, e, self.ctx.modulus))

    def __eq__(self, other):
        if isinstance(other, PadicInt):
            return self.ctx == other.ctx and self.residue == other.residue
        if isinstance(other, int):
            return self.residue == other % self.ctx.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.residue))

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"{self.residue} + O({self.ctx.p}^{self.ctx.N})"

    def is_unit(self) -> bool:
        return self.residue % self.ctx.p != 0


def padd(a: PadicInt, b: PadicInt) -> PadicInt:
    return a + b


def pmul(a: PadicInt, b: PadicInt) -> PadicInt:
    return a * b


def pneg(a: PadicInt) -> PadicInt:
    return -a


def pinv(a: PadicInt) -> PadicInt:
    if not a.is_unit():
        raise NonUnitError(f"{a.residue} is not a unit mod {a.ctx.p}")
    return a.ctx(pow(a.residue, -1, a.ctx.modulus))


def pval(a: PadicInt) -> int | float:
    """Largest k <= N with p^k dividing the residue, or ``INF`` for zero."""
    return valuation_int(a.residue, a.ctx.p)


def _poly_eval(coeffs: Sequence[int], x: int, m: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % m
    return acc


def _poly_derivative(coeffs: Sequence[int]) -> list[int]:
    return [i * c for i, c in enumerate(coeffs)][1:]


def hensel_lift(f: Sequence[int], a0: int, ctx: PadicContext) -> PadicInt:
    """Lift a simple root of ``f`` mod p to a root mod p^N.

    ``f`` is a coefficient list, constant term first.
    """
    p, m = ctx.p, ctx.modulus
    if _poly_eval(f, a0, p) != 0:
        raise ValueError(f"{a0} is not a root of f mod {p}")
    df = _poly_derivative(f)
    if _poly_eval(df, a0, p) == 0:
        raise ValueError(f"{a0} is not a simple root of f mod {p}")
    a = a0 % m
    k = 1
    while k < ctx.N:
        k = min(2 * k, ctx.N)
        mk = p ** k
        fa = _poly_eval(f, a, mk)
        dfa = _poly_eval(df, a, mk)
        a = (a - fa * pow(dfa, -1, mk)) % mk
    return ctx(a)


def teichmuller(a: int, ctx: PadicContext) -> PadicInt:
    """The (p-1)-st root of unity congruent to ``a`` mod p."""
    if a % ctx.p == 0:
        raise NonUnitError("Teichmuller representative of 0 is 0; not a unit")
    f = [-1] + [0] * (ctx.p - 2) + [1]
    return hensel_lift(f, a % ctx.p, ctx)
