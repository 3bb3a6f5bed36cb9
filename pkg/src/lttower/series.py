"""Truncated multivariate power series over a commutative coefficient ring.

Series are truncated at total degree ``D``: every stored exponent vector has
total degree <= D, and all identities hold modulo degree D+1.  Coefficients
are stored sparsely, keyed by exponent tuple.
"""
from __future__ import annotations

from typing import Iterable, Mapping

from .padic import NonUnitError


class SeriesMismatch(ValueError):
    pass


class TruncSeries:
    __slots__ = ("ring", "vars", "D", "coeffs")

    def __init__(self, ring, vars: Iterable[str], D: int, coeffs: Mapping | None = None):
        self.ring = ring
        self.vars = tuple(vars)
        self.D = D
        n = len(self.vars)
        clean = {}
        for e, c in (coeffs or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise SeriesMismatch(f"exponent {e} does not match vars {self.vars}")
            if sum(e) <= D and not ring.is_zero(c):
                clean[e] = c
        self.coeffs = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def variable(cls, ring, vars, D, name: str) -> "TruncSeries":
        vars = tuple(vars)
        e = tuple(1 if v == name else 0 for v in vars)
        if name not in vars:
            raise SeriesMismatch(f"unknown variable {name}")
        return cls(ring, vars, D, {e: ring.one})

    @classmethod
    def constant(cls, ring, vars, D, c) -> "TruncSeries":
        vars = tuple(vars)
        return cls(ring, vars, D, {(0,) * len(vars): c})

    @classmethod
    def from_ints(cls, ring, vars, D, terms: Mapping) -> "TruncSeries":
        """Build from {exponent: int}; single-variable exponents may be ints."""
        vars = tuple(vars)
        out = {}
        for e, c in terms.items():
            key = (e,) if isinstance(e, int) else tuple(e)
            out[key] = ring.from_int(c)
        return cls(ring, vars, D, out)

    def zero_like(self) -> "TruncSeries":
        return TruncSeries(self.ring, self.vars, self.D)

    # -- basic structure --------------------------------------------------
    def _check(self, other: "TruncSeries"):
        if not isinstance(other, TruncSeries):
            raise TypeError(f"expected TruncSeries, got {type(other).__name__}")
        if other.vars != self.vars or other.D != self.D or other.ring != self.ring:
            raise SeriesMismatch(
                f"series over {self.vars}/D={self.D} vs {other.vars}/D={other.D}")

    def __repr__(self):
        if not self.coeffs:
            return f"0 + O(deg {self.D + 1})"
        parts = []
        for e in sorted(self.coeffs, key=lambda e: (sum(e), tuple(-x for x in e))):
            mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, e) if k)
            parts.append(f"({self.coeffs[e]})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) + f" + O(deg {self.D + 1})"

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.vars == other.vars and self.D == other.D
                and self.ring == other.ring and self.coeffs == other.coeffs)

    __hash__ = None

    def coeff(self, e) -> object:
        key = (e,) if isinstance(e, int) else tuple(e)
        return self.coeffs.get(key, self.ring.zero)

    def is_zero(self) -> bool:
        return not self.coeffs

    def constant_term(self):
        return self.coeffs.get((0,) * len(self.vars), self.ring.zero)

    def lowest_degree(self):
        """Smallest total degree carrying a nonzero coefficient (None if zero)."""
        return min((sum(e) for e in self.coeffs), default=None)

    def homogeneous_part(self, k: int) -> dict:
        return {e: c for e, c in self.coeffs.items() if sum(e) == k}

    def truncate(self, D: int) -> "TruncSeries":
        return TruncSeries(self.ring, self.vars, D, self.coeffs) if D <= self.D else \
            TruncSeries(self.ring, self.vars, D, self.coeffs)

    def map_coeffs(self, fn, ring) -> "TruncSeries":
        return TruncSeries(ring, self.vars, self.D, {e: fn(c) for e, c in self.coeffs.items()})

    def rename(self, vars) -> "TruncSeries":
        return TruncSeries(self.ring, vars, self.D, self.coeffs)

    def embed(self, vars) -> "TruncSeries":
        """Re-express in a larger variable list containing all of ours."""
        vars = tuple(vars)
        idx = [vars.index(v) for v in self.vars]
        out = {}
        for e, c in self.coeffs.items():
            e2 = [0] * len(vars)
            for i, k in zip(idx, e):
                e2[i] = k
            out[tuple(e2)] = c
        return TruncSeries(self.ring, vars, self.D, out)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        self._check(other)
        ring = self.ring
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = ring.add(out[e], c) if e in out else c
        return TruncSeries(ring, self.vars, self.D, out)

    def __neg__(self):
        ring = self.ring
        return TruncSeries(ring, self.vars, self.D, {e: ring.neg(c) for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TruncSeries":
        ring = self.ring
        return TruncSeries(ring, self.vars, self.D, {e: ring.mul(c, v) for e, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        ring, D = self.ring, self.D
        if not self.coeffs or not other.coeffs:
            return self.zero_like()
        a = sorted(self.coeffs.items(), key=lambda kv: sum(kv[0]))
        b = sorted(other.coeffs.items(), key=lambda kv: sum(kv[0]))
        bdeg = [sum(e) for e, _ in b]
        out: dict = {}
        for e1, c1 in a:
            d1 = sum(e1)
            if d1 + bdeg[0] > D:
                break
            for (e2, c2), d2 in zip(b, bdeg):
                if d1 + d2 > D:
                    break
                e = tuple(x + y for x, y in zip(e1, e2))
                v = ring.mul(c1, c2)
                out[e] = ring.add(out[e], v) if e in out else v
        return TruncSeries(ring, self.vars, D, out)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers need an inverse; use s_inverse")
        result = TruncSeries.constant(self.ring, self.vars, self.D, self.ring.one)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self) -> "TruncSeries":
        """Multiplicative inverse; needs a unit constant term."""
        c0 = self.constant_term()
        if not self.ring.is_unit(c0):
            raise NonUnitError("constant term is not a unit")
        c0inv = self.ring.inv(c0)
        one = TruncSeries.constant(self.ring, self.vars, self.D, self.ring.one)
        n = one - self.scale(c0inv)  # no constant term
        acc, term = one, one
        for _ in range(self.D):
            term = term * n
            if term.is_zero():
                break
            acc = acc + term
        return acc.scale(c0inv)

    # -- composition ------------------------------------------------------
    def subst(self, assignments: Mapping[str, "TruncSeries"]) -> "TruncSeries":
        return s_subst(self, assignments)

    def derivative(self, var: str) -> "TruncSeries":
        return s_derivative(self, var)


def s_add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a + b


def s_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a * b


def s_subst(f: TruncSeries, assignments: Mapping[str, TruncSeries]) -> TruncSeries:
    """Compose: replace variables of ``f`` by series with zero constant term.

    Unassigned variables of ``f`` are carried over by name into the target
    variable list, which is taken from the assigned series.
    """
    if not assignments:
        return f
    targets = list(assignments.values())
    ring, vars, D = targets[0].ring, targets[0].vars, targets[0].D
    for g in targets:
        if g.vars != vars or g.D != D or g.ring != ring:
            raise SeriesMismatch("substituted series must share ring, vars and D")
        if not ring.is_zero(g.constant_term()):
            raise ValueError("substituted series must have zero constant term")
    if f.ring != ring:
        raise SeriesMismatch("coefficient rings differ")
    images = []
    for v in f.vars:
        if v in assignments:
            images.append(assignments[v])
        elif v in vars:
            images.append(TruncSeries.variable(ring, vars, D, v))
        else:
            raise SeriesMismatch(f"variable {v} has no image in {vars}")
    terms = {e: c for e, c in f.coeffs.items()}
    return _horner(terms, images, 0, ring, vars, D)


def _horner(terms: dict, images: list, i: int, ring, vars, D) -> TruncSeries:
    if i == len(images):
        c = terms.get((), ring.zero)
        return TruncSeries.constant(ring, vars, D, c)
    groups: dict[int, dict] = {}
    for e, c in terms.items():
        groups.setdefault(e[0], {})[e[1:]] = c
    g = images[i]
    acc = TruncSeries(ring, vars, D)
    top = max(groups) if groups else 0
    for k in range(top, -1, -1):
        acc = acc * g
        if k in groups:
            acc = acc + _horner(groups[k], images, i + 1, ring, vars, D)
    return acc


def s_derivative(f: TruncSeries, var: str) -> TruncSeries:
    i = f.vars.index(var)
    ring = f.ring
    out = {}
    for e, c in f.coeffs.items():
        if e[i]:
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = ring.mul(ring.from_int(e[i]), c)
    return TruncSeries(ring, f.vars, max(f.D - 1, 0), out)


def s_comp_inverse(f: TruncSeries, D: int | None = None) -> TruncSeries:
    """Compositional inverse of a one-variable series with unit linear term."""
    if len(f.vars) != 1:
        raise SeriesMismatch("compositional inverse needs a single variable")
    ring = f.ring
    D = f.D if D is None else D
    f = f.truncate(D)
    if not ring.is_zero(f.constant_term()):
        raise ValueError("f(0) must vanish")
    c1 = f.coeff(1)
    if not ring.is_unit(c1):
        raise NonUnitError("linear coefficient is not a unit")
    c1inv = ring.inv(c1)
    g = TruncSeries(ring, f.vars, D, {(1,): c1inv})
    for k in range(2, D + 1):
        err = s_subst(f, {f.vars[0]: g}).coeff(k)
        if not ring.is_zero(err):
            g = g - TruncSeries(ring, f.vars, D, {(k,): ring.mul(c1inv, err)})
    return g
