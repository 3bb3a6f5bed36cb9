"""One-dimensional formal group laws and formal Z_p-modules.

Two concrete families are provided: the multiplicative group
F = T1 + T2 + T1*T2 with [a](T) = (1+T)^a - 1, and modules cut out by a
functional-equation logarithm, which give height-h deformations with
parameters u_1..u_{h-1}.  Everything is checked modulo total degree D+1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .padic import PadicContext, PadicInt, PrecisionError
from .rings import (IntegersMod, Rationals, TruncatedPolynomialRing,
                    rational_to_residue)
from .series import TruncSeries, s_comp_inverse, s_subst

V1, V2, V3 = ("T1",), ("T1", "T2"), ("T1", "T2", "T3")
T = ("T",)


class AxiomError(ValueError):
    """An FGL axiom fails; ``exponent`` is the lowest offending monomial."""

    def __init__(self, axiom: str, exponent, detail: str = ""):
        self.axiom = axiom
        self.exponent = exponent
        super().__init__(f"{axiom} axiom fails at exponent {exponent}" + (f": {detail}" if detail else ""))


class IntegralityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class FormalGroupLaw:
    F: TruncSeries
    D: int
    verified: bool = False

    @property
    def ring(self):
        return self.F.ring

    def add(self, f: TruncSeries, g: TruncSeries) -> TruncSeries:
        """f +_X g = F(f, g) for one-variable series."""
        return s_subst(self.F, {"T1": f, "T2": g})


@dataclass
class HeightReport:
    h: int | None
    witness: TruncSeries | None
    at_least: int | None = None  # set when [p] vanishes through degree D
    note: str = ""

    @property
    def finite(self) -> bool:
        return self.h is not None


@dataclass
class FormalOModule:
    fgl: FormalGroupLaw
    p: int
    bracket_fn: Callable[[int], TruncSeries]
    name: str = ""
    params: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def q(self) -> int:
        return self.p

    @property
    def D(self) -> int:
        return self.fgl.D

    @property
    def ring(self):
        return self.fgl.ring

    def bracket(self, a: int) -> TruncSeries:
        if a not in self._cache:
            self._cache[a] = self.bracket_fn(a)
        return self._cache[a]

    def add(self, f, g):
        return self.fgl.add(f, g)

    def reduce(self, coeff_map, ring, name: str = "") -> "FormalOModule":
        """Image under a coefficient ring homomorphism ``coeff_map``."""
        F = self.fgl.F.map_coeffs(coeff_map, ring)
        parent = self
        return FormalOModule(
            FormalGroupLaw(F, self.D, self.fgl.verified), self.p,
            lambda a: parent.bracket(a).map_coeffs(coeff_map, ring),
            name=name or f"{self.name} reduced", params=self.params)


# -- axioms ------------------------------------------------------------------

def _var(ring, vars, D, name):
    return TruncSeries.variable(ring, vars, D, name)


def _first_difference(a: TruncSeries, b: TruncSeries):
    diff = (a - b).coeffs
    if not diff:
        return None
    return min(diff, key=lambda e: (sum(e), e))


def fgl_verify(F: TruncSeries, D: int | None = None) -> FormalGroupLaw:
    """Check unit, commutativity and associativity axioms through degree D."""
    D = F.D if D is None else D
    if F.vars != V2:
        F = F.rename(V2) if len(F.vars) == 2 else F
    if len(F.vars) != 2:
        raise ValueError("an FGL is a series in two variables")
    F = F.truncate(D)
    ring = F.ring
    if not ring.is_zero(F.constant_term()):
        raise AxiomError("unit", (0, 0), "nonzero constant term")
    t1 = _var(ring, V1, D, "T1")
    zero1 = TruncSeries(ring, V1, D)
    # F(T1, 0) = T1 and F(0, T2) = T2, both read as one-variable series in T1
    for which, assign in (("left", {"T1": t1, "T2": zero1}), ("right", {"T1": zero1, "T2": t1})):
        bad = _first_difference(s_subst(F, assign), t1)
        if bad is not None:
            e = (bad[0], 0) if which == "left" else (0, bad[0])
            raise AxiomError("unit", e)
    swapped = TruncSeries(ring, V2, D, {(j, i): c for (i, j), c in F.coeffs.items()})
    bad = _first_difference(F, swapped)
    if bad is not None:
        raise AxiomError("symmetry", bad)
    x, y, z = (_var(ring, V3, D, v) for v in V3)
    F3 = F.rename(("T1", "T2"))
    yz = s_subst(F3, {"T1": y, "T2": z})
    xy = s_subst(F3, {"T1": x, "T2": y})
    left = s_subst(F3, {"T1": x, "T2": yz})
    right = s_subst(F3, {"T1": xy, "T2": z})
    bad = _first_difference(left, right)
    if bad is not None:
        raise AxiomError("associativity", bad)
    return FormalGroupLaw(F, D, verified=True)


def neg_series(X: FormalGroupLaw) -> TruncSeries:
    """The inverse series i(T) with F(T, i(T)) = 0, built degree by degree."""
    ring, D = X.ring, X.D
    t = _var(ring, T, D, "T")
    inv = -t
    for k in range(2, D + 1):
        r = X.add(t, inv).coeff(k)
        if not ring.is_zero(r):
            # d/dT2 F(T1,T2) at 0 is 1, so the degree-k error moves one to one
            inv = inv - TruncSeries(ring, T, D, {(k,): r})
    return inv


def bracket_by_addition(X: FormalGroupLaw, a: int) -> TruncSeries:
    """[a] from the group law alone: double-and-add, negation for a < 0."""
    ring, D = X.ring, X.D
    t = _var(ring, T, D, "T")
    base = t if a >= 0 else neg_series(X)
    a = abs(a)
    acc = TruncSeries(ring, T, D)
    while a:
        if a & 1:
            acc = X.add(acc, base)
        a >>= 1
        if a:
            base = X.add(base, base)
    return acc


# -- constructions -------------------------------------------------------

def additive_law(ring, D: int) -> FormalGroupLaw:
    return fgl_verify(_var(ring, V2, D, "T1") + _var(ring, V2, D, "T2"), D)


def additive_module(ctx: PadicContext, D: int) -> FormalOModule:
    ring = IntegersMod(ctx.modulus)
    X = additive_law(ring, D)
    return FormalOModule(X, ctx.p, lambda a: TruncSeries(ring, T, D, {(1,): ring.from_int(a)}),
                         name="additive")


def multiplicative_module(ctx: PadicContext, D: int | None = None) -> FormalOModule:
    p = ctx.p
    D = p * p + p if D is None else D
    ring = IntegersMod(ctx.modulus)
    t1, t2 = _var(ring, V2, D, "T1"), _var(ring, V2, D, "T2")
    X = fgl_verify(t1 + t2 + t1 * t2, D)
    one = TruncSeries.constant(ring, T, D, ring.one)
    u = one + _var(ring, T, D, "T")

    def bracket(a: int) -> TruncSeries:
        base = u if a >= 0 else u.inverse()
        return base ** abs(a) - one

    return FormalOModule(X, p, bracket, name="multiplicative")


def _frobenius_twist(R: TruncatedPolynomialRing, a: dict, p: int) -> dict:
    # u_i -> u_i^p on the parameter polynomial ring
    out = {}
    for e, c in a.items():
        e2 = tuple(x * p for x in e)
        if sum(e2) <= R.max_degree:
            out[e2] = c
    return out


def functional_equation_log(p: int, h: int, D: int, params: Sequence[int] | None = None):
    """Logarithm coefficients over Q[u_1..u_{h-1}].

    f(T) = T + sum_{i<h} (u_i/p) f^{(i)}(T^{p^i}) + (1/p) f^{(h)}(T^{p^h}),
    where f^{(i)} applies u -> u^p i times to the coefficients.  Without
    this twist the resulting group law is not p-integral once h >= 2 and
    the u_i are free.  Integer ``params`` replace the u_i by constants,
    for which the twist is trivial.
    """
    if h < 1:
        raise ValueError("h >= 1 required")
    if params is not None and len(params) != h - 1:
        raise ValueError(f"need {h - 1} parameters, got {len(params)}")
    names = () if params is not None else tuple(f"u{i}" for i in range(1, h))
    # coefficients of T^k have u-degree <= (k-1)/(p-1), so this bound is exact
    R = TruncatedPolynomialRing(Rationals(), names, (D - 1) // (p - 1) + 1 if names else 0)
    weights = [R.gen(i) for i in range(h - 1)] if params is None else \
        [R.from_int(c) for c in params]
    weights.append(R.one)
    inv_p = R.constant(Fraction(1, p))
    a = {1: R.one}
    for k in range(2, D + 1):
        acc = R.zero
        for i in range(1, h + 1):
            q = p ** i
            if k % q or (k // q) not in a:
                continue
            prev = a[k // q]
            if params is None:
                for _ in range(i):
                    prev = _frobenius_twist(R, prev, p)
            acc = R.add(acc, R.mul(R.mul(weights[i - 1], inv_p), prev))
        if acc:
            a[k] = acc
    f = TruncSeries(R, T, D, {(k,): c for k, c in a.items()})
    return R, f


def _to_residue_ring(R: TruncatedPolynomialRing, ctx: PadicContext):
    base = IntegersMod(ctx.modulus)
    target = TruncatedPolynomialRing(base, R.names, R.max_degree) if R.names else base
    p, m = ctx.p, ctx.modulus

    def conv(c: dict):
        out = {}
        for e, q in c.items():
            if q.denominator % p == 0:
                raise IntegralityError(f"coefficient {q} of u^{e} has p in the denominator")
            r = rational_to_residue(q, m, p)
            if r:
                out[e] = r
        if not R.names:
            return out.get((), 0)
        return out

    return target, conv


def _checked_map(s: TruncSeries, conv, ring, label: str) -> TruncSeries:
    out = {}
    for e, c in s.coeffs.items():
        try:
            out[e] = conv(c)
        except IntegralityError as exc:
            raise IntegralityError(f"{label}, monomial {e}: {exc}") from None
    return TruncSeries(ring, s.vars, s.D, out)


def functional_equation_module(ctx: PadicContext, h: int, D: int | None = None,
                               params: Sequence[int] | None = None) -> FormalOModule:
    """Height-h formal Z_p-module over Z/p^N[u_1..u_{h-1}] from a logarithm.

    The group law is f^{-1}(f(T1) + f(T2)) and [a] = f^{-1}(a f(T)), both
    computed over Q and then checked to be p-integral before reduction.
    """
    p = ctx.p
    D = p * p + p if D is None else D
    R, f = functional_equation_log(p, h, D, params)
    finv = s_comp_inverse(f)
    t1, t2 = _var(R, V2, D, "T1"), _var(R, V2, D, "T2")
    fsum = s_subst(f, {"T": t1}) + s_subst(f, {"T": t2})
    Fq = s_subst(finv.rename(("T",)), {"T": fsum})
    ring, conv = _to_residue_ring(R, ctx)
    F = _checked_map(Fq, conv, ring, "group law")
    X = fgl_verify(F, D)

    def bracket(a: int) -> TruncSeries:
        s = s_subst(finv, {"T": f.scale(R.from_int(a))})
        return _checked_map(s, conv, ring, f"[{a}]")

    mod = FormalOModule(X, p, bracket, name=f"functional-equation h={h}",
                        params=tuple(params) if params is not None else R.names)
    if not mod.ring.is_zero(mod.ring.sub(mod.bracket(p).coeff(1), mod.ring.from_int(p))):
        raise IntegralityError("[p] is not congruent to pT mod degree 2")
    return mod


# -- reductions and height -----------------------------------------------

def reduce_mod_p(X: FormalOModule, u_values: dict[str, int] | None = None) -> FormalOModule:
    """Reduce coefficients mod p; ``u_values`` substitutes parameters.

    Substituting every parameter (e.g. all u_i -> 0 for reduction mod (p, u))
    lands in F_p; a partial substitution keeps the remaining u's.
    """
    p = X.p
    src = X.ring
    Fp = IntegersMod(p)
    if not isinstance(src, TruncatedPolynomialRing):
        if u_values:
            raise ValueError("module has no parameters to substitute")
        return X.reduce(lambda c: c % p, Fp, name=f"{X.name} mod p")
    u_values = dict(u_values or {})
    unknown = set(u_values) - set(src.names)
    if unknown:
        raise ValueError(f"unknown parameters {sorted(unknown)}")
    keep = tuple(n for n in src.names if n not in u_values)
    idx = {n: i for i, n in enumerate(src.names)}
    target = TruncatedPolynomialRing(Fp, keep, src.max_degree) if keep else Fp

    def conv(c: dict):
        out: dict = {}
        for e, v in c.items():
            val = v
            for n, x in u_values.items():
                val = val * pow(x, e[idx[n]], p)
            key = tuple(e[idx[n]] for n in keep)
            out[key] = (out.get(key, 0) + val) % p
        out = {k: v for k, v in out.items() if v}
        return out if keep else out.get((), 0)

    return X.reduce(conv, target, name=f"{X.name} mod p {u_values or ''}".strip())


def height(X: FormalOModule) -> HeightReport:
    """Height of a module over a characteristic-p coefficient ring."""
    ring, p, D = X.ring, X.p, X.D
    if ring.characteristic != p:
        raise ValueError(f"height needs characteristic {p} coefficients, got {ring.characteristic}")
    bp = X.bracket(p)
    if bp.is_zero():
        return HeightReport(None, None, at_least=int(math.floor(math.log(D, p))) + 1,
                            note="[p] vanishes through the degree bound")
    low = bp.lowest_degree()
    h = 0
    while low % p ** (h + 1) == 0:
        h += 1
    if p ** h != low:
        return HeightReport(None, None, note=f"lowest term T^{low} is not a p-power")
    if not ring.is_unit(bp.coeff(low)):
        return HeightReport(None, None, note=f"coefficient of T^{low} is not a unit")
    q = p ** h
    if any(e[0] % q for e in bp.coeffs):
        return HeightReport(None, None, note="exponents not all divisible by the leading p-power")
    g = TruncSeries(ring, T, D // q, {(e[0] // q,): c for e, c in bp.coeffs.items()})
    return HeightReport(h, g)


# -- homomorphisms and [a] -------------------------------------------------

def hom_verify(f: TruncSeries, X, Y, generators: Sequence[int] | None = None) -> bool:
    """f(X(T1,T2)) = Y(f(T1), f(T2)) and, for modules, f o [a]_X = [a]_Y o f."""
    fx = X.fgl if isinstance(X, FormalOModule) else X
    fy = Y.fgl if isinstance(Y, FormalOModule) else Y
    if not fx.ring.is_zero(f.constant_term()):
        raise ValueError("f(0) must vanish")
    ring, D = fx.ring, fx.D
    t1, t2 = _var(ring, V2, D, "T1"), _var(ring, V2, D, "T2")
    fT = f.rename(T)
    left = s_subst(fT, {"T": fx.F})
    right = s_subst(fy.F, {"T1": s_subst(fT, {"T": t1}), "T2": s_subst(fT, {"T": t2})})
    if left != right:
        return False
    if isinstance(X, FormalOModule) and isinstance(Y, FormalOModule):
        gens = generators if generators is not None else (-1, 2, X.p, X.p + 1)
        for a in gens:
            if s_subst(fT, {"T": X.bracket(a)}) != s_subst(Y.bracket(a), {"T": fT}):
                return False
    return True


def padic_approximant(a: PadicInt, X: FormalOModule) -> tuple[int, int]:
    """(k, a mod p^k) where [p^k] vanishes modulo the coefficient precision and degree D+1."""
    p = X.p
    k = 0
    while not X.bracket(p ** k).is_zero():
        if k >= a.ctx.N:
            raise PrecisionError(
                f"[{p}^{k}] is nonzero but a is known only mod {p}^{a.ctx.N}")
        k += 1
    return k, a.residue % p ** k


def mult_by(a, X: FormalOModule, with_certificate: bool = False):
    """[a]_X for an integer or a p-adic integer a."""
    if isinstance(a, PadicInt):
        if a.ctx.p != X.p:
            raise ValueError("p-adic scalar over a different prime")
        k, ak = padic_approximant(a, X)
        s = X.bracket(ak)
        return (s, k) if with_certificate else s
    a = int(a)
    s = X.bracket(a)
    return (s, None) if with_certificate else s


def compose(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    return s_subst(f.rename(T), {"T": g.rename(T)})
