"""Field of norms of the cyclotomic tower, truncated to finitely many levels.

Two presentations of the same ring:

* ``norm``: sequences (x_n) with N_{n+1->n}(x_{n+1}) = x_n, multiplied
  componentwise and added by the limit of norms
  (x + y)_n = lim_m N_{n+m -> n}(x_{n+m} + y_{n+m});
* ``frobenius``: sequences of residues mod xi with x_{n+1}^p = x_n,
  where both operations are componentwise.

A norm limit is accepted once two consecutive values agree mod p^N and
all later available values agree too; the level at which that happened
is recorded per component.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .padic import INF, PrecisionError
from .towers import (ExtElement, Tower, const, embed, from_pi_coeffs, norm_down,
                     one, val)

NORM, FROB = "norm", "frobenius"


class StabilizationError(PrecisionError):
    def __init__(self, msg: str, extra_depth: int):
        super().__init__(msg)
        self.extra_depth = extra_depth


class CompatibilityError(ValueError):
    pass


@dataclass
class NormFieldElement:
    tower: Tower
    presentation: str
    start: int
    components: list
    xi_val: Fraction = Fraction(1)
    stabilization: list = field(default_factory=list)

    @property
    def top(self) -> int:
        return self.start + len(self.components) - 1

    @property
    def depth(self) -> int:
        return len(self.components) - 1

    def component(self, n: int) -> ExtElement:
        return self.components[n - self.start]

    def residue(self, n: int) -> np.ndarray:
        x = self.component(n)
        return x.residue_mod_xi(_xi_exp(self.tower, n, self.xi_val))

    def truncated(self, top: int) -> "NormFieldElement":
        k = top - self.start + 1
        return NormFieldElement(self.tower, self.presentation, self.start, self.components[:k],
                                self.xi_val, self.stabilization[:k])

    def same_as(self, other: "NormFieldElement") -> bool:
        """Equality on the common range of levels (mod xi for frobenius)."""
        _check_pair(self, other)
        top = min(self.top, other.top)
        for n in range(self.start, top + 1):
            if self.presentation == FROB:
                if not np.array_equal(self.residue(n), other.residue(n)):
                    return False
            elif self.component(n) != other.component(n):
                return False
        return True

    def __mul__(self, other):
        return nf_mul(self, other)

    def __add__(self, other):
        return nf_add(self, other)


def _xi_exp(tower: Tower, n: int, xi_val: Fraction) -> int:
    s = Fraction(xi_val) * tower[n].degree
    if s.denominator != 1:
        raise ValueError(f"v_p(xi) = {xi_val} is not realized at level {n}")
    return int(s)


def _check_pair(x: NormFieldElement, y: NormFieldElement):
    if x.presentation != y.presentation:
        raise ValueError(f"presentation mismatch: {x.presentation} vs {y.presentation}")
    if x.start != y.start or x.tower is not y.tower:
        raise ValueError("elements come from different towers or start levels")
    if x.presentation == FROB and x.xi_val != y.xi_val:
        raise ValueError("different xi")


# -- construction ----------------------------------------------------------

def from_top(tower: Tower, top: ExtElement, start: int = 1) -> NormFieldElement:
    """The norm-compatible sequence generated by a top-level element."""
    comps = [top]
    while comps[-1].level.n > start:
        comps.append(norm_down(comps[-1], tower))
    comps.reverse()
    return NormFieldElement(tower, NORM, start, comps, stabilization=[0] * len(comps))


def constant_element(tower: Tower, c: int, start: int, top: int) -> NormFieldElement:
    """(c)_n for c with c^p = c (0, 1, or -1 when p is odd)."""
    if (c ** tower.p - c) % tower.ctx.modulus:
        raise ValueError(f"{c} is not norm-compatible (c^p != c)")
    comps = [const(tower[n], c) for n in range(start, top + 1)]
    return NormFieldElement(tower, NORM, start, comps, stabilization=[0] * len(comps))


def pi_element(tower: Tower, start: int, top: int) -> NormFieldElement:
    """(pi_n)_n, norm-compatible since N(zeta_{n+1} - 1) = zeta_n - 1."""
    comps = [tower.pi(n) for n in range(start, top + 1)]
    return NormFieldElement(tower, NORM, start, comps, stabilization=[0] * len(comps))


def random_element(tower: Tower, rng: random.Random, start: int = 1, top: int | None = None) -> NormFieldElement:
    top = tower.n_max if top is None else top
    level = tower[top]
    z = np.array([rng.randrange(tower.ctx.modulus) for _ in range(level.degree)], dtype=np.int64)
    return from_top(tower, ExtElement(level, z), start)


def check_norm_compatible(x: NormFieldElement) -> bool:
    return all(norm_down(x.component(n + 1), x.tower) == x.component(n)
               for n in range(x.start, x.top))


def check_frobenius_compatible(x: NormFieldElement) -> bool:
    p = x.tower.p
    for n in range(x.start, x.top):
        s = _xi_exp(x.tower, n + 1, x.xi_val)
        lhs = (x.component(n + 1) ** p).residue_mod_xi(s)
        rhs = embed(x.component(n), x.tower).residue_mod_xi(s)
        if not np.array_equal(lhs, rhs):
            return False
    return True


# -- limits of norms -------------------------------------------------------

def default_depth(tower: Tower) -> int:
    return tower.ctx.N + 2


def norm_limit(tower: Tower, tops: list, start: int, depth: int | None = None) -> tuple[list, list]:
    """Stabilized lim_m N_{n+m -> n}(a_{n+m}) for n = start, start+1, ...

    ``tops[k]`` is the element a_{start+k}; the limit for level n looks at
    most ``depth`` levels above n.  Returns (components, indices) for the
    contiguous run of levels that stabilized.
    """
    depth = default_depth(tower) if depth is None else depth
    chains = []  # chains[k][n - start] = N_{start+k -> n}(a_{start+k})
    for k, a in enumerate(tops):
        vals = [a]
        while vals[-1].level.n > start:
            vals.append(norm_down(vals[-1], tower))
        vals.reverse()
        chains.append(vals)
    M_all = len(tops) - 1
    comps, idx = [], []
    for j in range(M_all + 1):
        M = min(M_all, j + depth)
        found = None
        for k in range(j, M):
            ref = chains[k][j]
            if all(chains[kk][j] == ref for kk in range(k + 1, M + 1)):
                found = k
                break
        if found is None:
            break
        comps.append(chains[found][j])
        idx.append(found - j)
    if not comps:
        raise StabilizationError(
            f"no component stabilized using {min(M_all, depth)} levels above {start}",
            extra_depth=max(1, tower.ctx.N + 1 - min(M_all, depth)))
    # keep only the mutually compatible prefix
    keep = 1
    while keep < len(comps) and norm_down(comps[keep], tower) == comps[keep - 1]:
        keep += 1
    return comps[:keep], idx[:keep]


def nf_add(x: NormFieldElement, y: NormFieldElement, depth: int | None = None) -> NormFieldElement:
    _check_pair(x, y)
    if x.presentation == FROB:
        top = min(x.top, y.top)
        comps = [_frob_canonical(x.tower, x.component(n) + y.component(n), n, x.xi_val)
                 for n in range(x.start, top + 1)]
        return NormFieldElement(x.tower, FROB, x.start, comps, x.xi_val, [0] * len(comps))
    top = min(x.top, y.top)
    tops = [x.component(n) + y.component(n) for n in range(x.start, top + 1)]
    comps, idx = norm_limit(x.tower, tops, x.start, depth)
    return NormFieldElement(x.tower, NORM, x.start, comps, stabilization=idx)


def nf_mul(x: NormFieldElement, y: NormFieldElement) -> NormFieldElement:
    _check_pair(x, y)
    top = min(x.top, y.top)
    comps = [x.component(n) * y.component(n) for n in range(x.start, top + 1)]
    if x.presentation == FROB:
        comps = [_frob_canonical(x.tower, c, n, x.xi_val) for n, c in zip(range(x.start, top + 1), comps)]
    return NormFieldElement(x.tower, x.presentation, x.start, comps, x.xi_val, [0] * len(comps))


def nf_neg(x: NormFieldElement) -> NormFieldElement:
    if x.tower.p == 2:
        return x  # characteristic 2
    comps = [-c for c in x.components]
    if x.presentation == FROB:
        comps = [_frob_canonical(x.tower, c, n, x.xi_val) for n, c in zip(range(x.start, x.top + 1), comps)]
    return NormFieldElement(x.tower, x.presentation, x.start, comps, x.xi_val, list(x.stabilization))


def nf_val(x: NormFieldElement):
    """Valuation normalized by nf_val(Pi) = 1; INF if nothing is visible."""
    for n in range(x.start, x.top + 1):
        c = x.component(n)
        if x.presentation == FROB:
            r = x.residue(n)
            nz = np.nonzero(r)[0]
            if nz.size:
                return int(nz[0])
        else:
            v = val(c)
            if v != INF:
                return v
    return INF


def shift(x: NormFieldElement) -> NormFieldElement:
    """Drop the first level: the same element of the field of norms of (K_n)_{n > start}."""
    if not x.depth:
        raise ValueError("nothing left after dropping the first level")
    return NormFieldElement(x.tower, x.presentation, x.start + 1, x.components[1:],
                            x.xi_val, x.stabilization[1:])


# -- frobenius presentation and the isomorphism --------------------------------

def _frob_canonical(tower: Tower, c: ExtElement, n: int, xi_val) -> ExtElement:
    s = _xi_exp(tower, n, xi_val)
    return from_pi_coeffs(tower[n], [int(v) for v in c.residue_mod_xi(s)])


def norm_to_frobenius(x: NormFieldElement, xi_val=Fraction(1)) -> NormFieldElement:
    if x.presentation != NORM:
        raise ValueError("expected the norm presentation")
    xi_val = Fraction(xi_val)
    comps = [_frob_canonical(x.tower, c, n, xi_val)
             for n, c in zip(range(x.start, x.top + 1), x.components)]
    out = NormFieldElement(x.tower, FROB, x.start, comps, xi_val, [0] * len(comps))
    if not check_frobenius_compatible(out):
        raise CompatibilityError("norm-compatible sequence is not Frobenius-compatible mod xi")
    return out


def random_lifts(x: NormFieldElement, rng: random.Random) -> list:
    """Arbitrary lifts a_n of the residues x_n mod xi."""
    if x.presentation != FROB:
        raise ValueError("expected the frobenius presentation")
    tower = x.tower
    lifts = []
    for n, c in zip(range(x.start, x.top + 1), x.components):
        level = tower[n]
        s = _xi_exp(tower, n, x.xi_val)
        noise = [rng.randrange(tower.ctx.modulus) for _ in range(level.degree)]
        r = ExtElement(level, np.array(noise, dtype=np.int64))
        lifts.append(c + r * tower.pi(n) ** s)
    return lifts


def frobenius_to_norm(x: NormFieldElement, lifts: list | None = None,
                      rng: random.Random | None = None, depth: int | None = None) -> NormFieldElement:
    """x_n = lim_m N_{n+m -> n}(a_{n+m}) for lifts a of the residues."""
    if x.presentation != FROB:
        raise ValueError("expected the frobenius presentation")
    if lifts is None:
        lifts = random_lifts(x, rng) if rng is not None else list(x.components)
    comps, idx = norm_limit(x.tower, lifts, x.start, depth)
    return NormFieldElement(x.tower, NORM, x.start, comps, stabilization=idx)


def uniformizer(tower: Tower, xi_val=Fraction(1), start: int = 1, top: int | None = None,
                choice: dict | None = None) -> NormFieldElement:
    """Pi = (varpi_n mod xi)_n, checked to be Frobenius-compatible."""
    top = tower.n_max if top is None else top
    xi_val = Fraction(xi_val)
    comps = []
    for n in range(start, top + 1):
        w = (choice or {}).get(n, tower.pi(n))
        comps.append(_frob_canonical(tower, w, n, xi_val))
    out = NormFieldElement(tower, FROB, start, comps, xi_val, [0] * len(comps))
    if not check_frobenius_compatible(out):
        raise CompatibilityError("chosen uniformizers are not Frobenius-compatible mod xi")
    if nf_val(out) != 1:
        raise CompatibilityError("chosen element does not have valuation 1")
    return out


def frob_one(tower: Tower, xi_val=Fraction(1), start: int = 1, top: int | None = None) -> NormFieldElement:
    top = tower.n_max if top is None else top
    comps = [one(tower[n]) for n in range(start, top + 1)]
    return NormFieldElement(tower, FROB, start, comps, Fraction(xi_val), [0] * len(comps))


def frob_power(x: NormFieldElement, k: int) -> NormFieldElement:
    result = frob_one(x.tower, x.xi_val, x.start, x.top)
    for _ in range(k):
        result = nf_mul(result, x)
    return result


def decompose(x: NormFieldElement):
    """Write a Frobenius-presented x as unit * Pi^k; returns (k, unit).

    The unit's component at level n is only determined mod pi_n^{s_n - k};
    the undetermined digits are set to zero.
    """
    if x.presentation != FROB:
        raise ValueError("expected the frobenius presentation")
    k = nf_val(x)
    if k == INF:
        raise ValueError("zero has no decomposition")
    tower = x.tower
    comps = []
    for n in range(x.start, x.top + 1):
        r = x.residue(n)
        if k >= len(r):
            raise PrecisionError(f"valuation {k} is not visible mod xi at level {n}")
        digits = [int(v) for v in r[k:]]
        if digits[0] % tower.p == 0:
            raise CompatibilityError(f"level {n} has a different valuation")
        comps.append(from_pi_coeffs(tower[n], digits))
    unit = NormFieldElement(tower, FROB, x.start, comps, x.xi_val, [0] * len(comps))
    Pi = uniformizer(tower, x.xi_val, x.start, x.top)
    back = nf_mul(unit, frob_power(Pi, k))
    if not back.same_as(x):
        raise CompatibilityError("unit * Pi^k does not reproduce the element")
    return k, unit


# -- axiom suite -------------------------------------------------------------

AXIOMS = ("add_commutative", "mul_commutative", "add_associative", "mul_associative",
          "distributive", "additive_identity", "multiplicative_identity", "additive_inverse")


def ring_axioms(x: NormFieldElement, y: NormFieldElement, z: NormFieldElement) -> dict:
    """Each ring axiom on (x, y, z), compared on the levels both sides still carry.

    A nested sum loses levels to stabilization, so a comparison that is
    left with no common level counts as a failure.
    """
    tower, start, top = x.tower, x.start, min(x.top, y.top, z.top)
    zero = constant_element(tower, 0, start, top)
    unit = constant_element(tower, 1, start, top)

    def eq(a, b):
        return min(a.top, b.top) >= start and a.same_as(b)

    return {
        "add_commutative": eq(nf_add(x, y), nf_add(y, x)),
        "mul_commutative": eq(nf_mul(x, y), nf_mul(y, x)),
        "add_associative": eq(nf_add(nf_add(x, y), z), nf_add(x, nf_add(y, z))),
        "mul_associative": eq(nf_mul(nf_mul(x, y), z), nf_mul(x, nf_mul(y, z))),
        "distributive": eq(nf_mul(nf_add(x, y), z), nf_add(nf_mul(x, z), nf_mul(y, z))),
        "additive_identity": eq(nf_add(x, zero), x),
        "multiplicative_identity": eq(nf_mul(x, unit), x),
        "additive_inverse": eq(nf_add(x, nf_neg(x)), zero),
    }
