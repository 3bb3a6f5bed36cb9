"""The cyclotomic tower Z_p[zeta_{p^n}] at p-adic precision N.

Level n is Z/p^N[T]/(E_n) with E_n(T) = Phi_{p^n}(1+T), an Eisenstein
polynomial of degree e_n = (p-1)p^{n-1}; pi_n is the class of T and
zeta_n = 1 + pi_n.  Internally an element is the coefficient vector of
1, zeta, ..., zeta^{e_n - 1}.  In that basis the Galois action is an
exponent permutation, the embedding of level n-1 is the dilation
zeta^i -> zeta^{p i}, and membership in the image of level n-1 is a
coordinate condition.  Conversion to pi-coordinates (for valuations and
reductions mod xi) is a Taylor shift.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd

import numpy as np

from .linalg import rank_mod_p, solve_mod_p
from .padic import INF, BudgetExceeded, PadicContext, PrecisionError, valuation_int

DEGREE_BUDGET = 20000


def _safe_dtype(m: int, length: int):
    return np.int64 if m * m * max(length, 1) < 2 ** 62 else object


@dataclass(frozen=True, eq=False)
class TowerLevel:
    ctx: PadicContext
    n: int

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def degree(self) -> int:
        """Absolute degree e_n = [K_n : Q_p] (1 at level 0)."""
        return 1 if self.n == 0 else (self.p - 1) * self.p ** (self.n - 1)

    e = degree

    @property
    def order(self) -> int:
        """p^n, the order of zeta_n."""
        return self.p ** self.n

    def modulus_coeffs(self) -> list[int]:
        """E_n(T) = Phi_{p^n}(1 + T) as integers mod p^N, constant term first."""
        if self.n == 0:
            return [0, 1]  # level 0 is Z_p itself; T stands for 0
        p, m = self.p, self.ctx.modulus
        step = p ** (self.n - 1)
        out = [0] * (self.degree + 1)
        for j in range(p):
            for k in range(j * step + 1):
                out[k] += comb(j * step, k)
        return [c % m for c in out]

    def is_eisenstein(self) -> bool:
        c = self.modulus_coeffs()
        p = self.p
        if self.n == 0:
            return True
        return (c[-1] == 1 and all(x % p == 0 for x in c[:-1])
                and valuation_int(c[0], p) == 1)

    def embed_prev_coeffs(self) -> list[int]:
        """pi_{n-1} = (1 + pi_n)^p - 1 as a polynomial in pi_n."""
        return [0] + [comb(self.p, k) % self.ctx.modulus for k in range(1, self.p + 1)]


class ExtElement:
    """Element of level n, stored in the basis 1, zeta_n, ..., zeta_n^{e-1}."""

    __slots__ = ("level", "z")

    def __init__(self, level: TowerLevel, z):
        self.level = level
        z = np.asarray(z, dtype=_safe_dtype(level.ctx.modulus, level.degree))
        if z.shape != (level.degree,):
            raise ValueError(f"expected {level.degree} coordinates, got {z.shape}")
        self.z = z % level.ctx.modulus

    # -- helpers ----------------------------------------------------------
    @property
    def m(self) -> int:
        return self.level.ctx.modulus

    def _same(self, other: "ExtElement"):
        if not isinstance(other, ExtElement) or other.level is not self.level:
            if not (isinstance(other, ExtElement) and other.level.n == self.level.n
                    and other.level.ctx == self.level.ctx):
                raise ValueError("elements live at different tower levels")

    def __repr__(self):
        return f"ExtElement(n={self.level.n}, pi-coeffs={self.pi_coeffs().tolist()})"

    def __eq__(self, other):
        if not isinstance(other, ExtElement):
            return NotImplemented
        return (self.level.n == other.level.n and self.level.ctx == other.level.ctx
                and np.array_equal(self.z, other.z))

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.z.any()

    # -- ring operations ------------------------------------------------------
    def __add__(self, other):
        self._same(other)
        return ExtElement(self.level, self.z + other.z)

    def __sub__(self, other):
        self._same(other)
        return ExtElement(self.level, self.z - other.z)

    def __neg__(self):
        return ExtElement(self.level, -self.z)

    def __mul__(self, other):
        if isinstance(other, int):
            return ExtElement(self.level, self.z * (other % self.m))
        self._same(other)
        full = np.convolve(self.z, other.z) % self.m
        return ExtElement(self.level, _reduce_cyclic(full, self.level))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = one(self.level)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- coordinates ----------------------------------------------------------
    def pi_coeffs(self) -> np.ndarray:
        """Coefficients b_i with x = sum b_i pi_n^i, i < e_n."""
        return _taylor_shift(self.z, 1, self.m)

    def residue_mod_xi(self, s: int) -> np.ndarray:
        """Image in O_n / pi_n^s for s <= e_n, as an F_p-vector of length s."""
        if s > self.level.degree:
            raise ValueError("reduction beyond p needs a different coordinate model")
        return self.pi_coeffs()[:s] % self.level.p


def _reduce_cyclic(full: np.ndarray, level: TowerLevel) -> np.ndarray:
    """Reduce a polynomial in zeta via zeta^{p^n} = 1 and Phi_{p^n}(zeta) = 0."""
    n, p, m = level.n, level.p, level.ctx.modulus
    if n == 0:
        return np.array([full.sum() % m], dtype=full.dtype)
    order, e = level.order, level.degree
    c = np.zeros(order, dtype=full.dtype)
    for start in range(0, len(full), order):
        chunk = full[start:start + order]
        c[:len(chunk)] += chunk
    c %= m
    step = order // p
    top = c[e:].copy()  # zeta^{e + r}, r < p^{n-1}
    head = c[:e].copy()
    for j in range(p - 1):
        head[j * step:(j + 1) * step] -= top
    return head % m


def _taylor_shift(c: np.ndarray, shift: int, m: int) -> np.ndarray:
    """Coefficients of sum c_i (X + shift)^i, via Horner."""
    deg = len(c)
    acc = np.zeros(deg, dtype=c.dtype)
    for i in range(deg - 1, -1, -1):
        # acc <- acc * (X + shift) + c_i
        nxt = acc * shift
        nxt[1:] += acc[:-1]
        nxt[0] += c[i]
        acc = nxt % m
    return acc


def one(level: TowerLevel) -> ExtElement:
    z = np.zeros(level.degree, dtype=np.int64)
    z[0] = 1
    return ExtElement(level, z)


def const(level: TowerLevel, c: int) -> ExtElement:
    z = np.zeros(level.degree, dtype=np.int64)
    z[0] = c
    return ExtElement(level, z)


def zeta(level: TowerLevel) -> ExtElement:
    if level.n == 0:
        return one(level)
    if level.degree == 1:
        return const(level, -1)  # p = 2, n = 1
    z = np.zeros(level.degree, dtype=np.int64)
    z[1] = 1
    return ExtElement(level, z)


def uniformizer_element(level: TowerLevel) -> ExtElement:
    """pi_n = zeta_n - 1 (and p at level 0)."""
    if level.n == 0:
        return const(level, level.p)
    return zeta(level) - one(level)


def from_pi_coeffs(level: TowerLevel, b) -> ExtElement:
    """sum b_i pi_n^i for a coefficient list of any length (reduced by E_n)."""
    b = list(b)
    pi = uniformizer_element(level)
    acc = ExtElement(level, np.zeros(level.degree, dtype=np.int64))
    if level.n > 0 and len(b) <= level.degree:
        arr = np.zeros(level.degree, dtype=np.int64)
        arr[:len(b)] = np.array(b, dtype=object) % level.ctx.modulus
        return ExtElement(level, _taylor_shift(arr, -1, level.ctx.modulus))
    for c in reversed(b):
        acc = acc * pi + const(level, c)
    return acc


# -- the tower -----------------------------------------------------------

@dataclass
class Tower:
    ctx: PadicContext
    levels: list = field(default_factory=list)

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def n_max(self) -> int:
        return len(self.levels) - 1

    def __getitem__(self, n: int) -> TowerLevel:
        if not 0 <= n < len(self.levels):
            raise IndexError(f"level {n} not built (have 0..{self.n_max})")
        return self.levels[n]

    def pi(self, n: int) -> ExtElement:
        return uniformizer_element(self[n])

    def zeta(self, n: int) -> ExtElement:
        return zeta(self[n])

    def const(self, n: int, c: int) -> ExtElement:
        return const(self[n], c)


def build_tower(ctx: PadicContext, n_max: int, budget: int = DEGREE_BUDGET) -> Tower:
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    top = 1 if n_max == 0 else (ctx.p - 1) * ctx.p ** (n_max - 1)
    if top > budget:
        raise BudgetExceeded(f"level {n_max} has degree {top} > budget {budget}")
    levels = [TowerLevel(ctx, n) for n in range(n_max + 1)]
    return Tower(ctx, levels)


def embed(x: ExtElement, tower: Tower) -> ExtElement:
    """Image of a level-n element in level n+1 (zeta_n = zeta_{n+1}^p)."""
    n = x.level.n
    up = tower[n + 1]
    z = np.zeros(up.degree, dtype=x.z.dtype)
    if n == 0:
        z[0] = x.z[0]
    else:
        z[::tower.p][:x.level.degree] = x.z
    return ExtElement(up, z)


def embed_to(x: ExtElement, tower: Tower, n: int) -> ExtElement:
    while x.level.n < n:
        x = embed(x, tower)
    return x


def descend(x: ExtElement, tower: Tower) -> ExtElement:
    """Re-express a level-(n+1) element lying in the image of level n."""
    n1 = x.level.n
    if n1 == 0:
        raise ValueError("level 0 has nothing below it")
    down = tower[n1 - 1]
    p = tower.p
    if n1 == 1:
        if x.z[1:].any():
            raise PrecisionError("element is not in the image of Z_p")
        return const(down, int(x.z[0]))
    mask = np.ones(len(x.z), dtype=bool)
    mask[::p] = False
    if x.z[mask].any():
        raise PrecisionError("element is not in the image of the previous level")
    return ExtElement(down, x.z[::p][:down.degree])


def galois_apply(a: int, x: ExtElement) -> ExtElement:
    """sigma_a : zeta_n -> zeta_n^a, for a unit mod p^n."""
    level = x.level
    if level.n == 0:
        return x
    if gcd(a, level.p) != 1:
        raise ValueError(f"{a} is not a unit mod {level.p}")
    order = level.order
    idx = (np.arange(level.degree) * (a % order)) % order
    full = np.zeros(order, dtype=x.z.dtype)
    np.add.at(full, idx, x.z)
    return ExtElement(level, _reduce_cyclic(full, level))


def _relative_group(n: int, k: int, p: int) -> list[int]:
    """Representatives of Gal(K_{n+k} | K_n): units mod p^{n+k} that are 1 mod p^n."""
    big = p ** (n + k)
    if n == 0:
        return [a for a in range(1, big) if a % p]
    return [1 + j * p ** n for j in range(p ** k)]


def norm_down(x: ExtElement, tower: Tower, steps: int = 1) -> ExtElement:
    """N_{K_{n}|K_{n-steps}}(x) as the product of conjugates, re-expressed below."""
    n = x.level.n
    if steps < 1 or steps > n:
        raise ValueError(f"cannot take {steps} norm steps from level {n}")
    prod = one(x.level)
    for a in _relative_group(n - steps, steps, tower.p):
        prod = prod * galois_apply(a, x)
    for _ in range(steps):
        prod = descend(prod, tower)
    return prod


def norm_to(x: ExtElement, tower: Tower, n: int) -> ExtElement:
    """Iterated one-step norms down to level n."""
    while x.level.n > n:
        x = norm_down(x, tower)
    return x


def val(x: ExtElement):
    """pi_n-adic valuation with v(pi_n) = 1; INF below the precision horizon."""
    level = x.level
    if level.n == 0:
        return valuation_int(int(x.z[0]), level.p)
    e, p = level.degree, level.p
    best = INF
    for i, b in enumerate(x.pi_coeffs()):
        b = int(b)
        if b:
            best = min(best, i + e * valuation_int(b, p))
    return best


def val_p(x: ExtElement):
    """Valuation normalized by v_p(p) = 1 (a Fraction, or INF)."""
    v = val(x)
    return v if v == INF else Fraction(v, x.level.degree)


# -- differentials and certificates ----------------------------------------

@dataclass
class DifferentialReport:
    n: int
    ann_val: Fraction
    cyclic: bool
    degree: int
    q_in_lower_level: bool
    q_vanishes: bool
    derivative_routes_agree: bool

    @property
    def ok(self) -> bool:
        return self.cyclic and self.q_in_lower_level and self.q_vanishes and self.derivative_routes_agree


def _poly_mul(a: list, b: list, level) -> list:
    out = [ExtElement(level, np.zeros(level.degree, dtype=np.int64)) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _poly_eval(coeffs: list, x: ExtElement) -> ExtElement:
    acc = ExtElement(x.level, np.zeros(x.level.degree, dtype=np.int64))
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def differential_annihilator(tower: Tower, n: int) -> DifferentialReport:
    """Valuation of the annihilator of d(pi_n) in Omega(K_n | K_{n-1}).

    Q(T) = prod (T - sigma_a pi_n) over a = 1 + k p^{n-1}; Omega is
    generated by d(pi_n) with annihilator Q'(pi_n).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    level = tower[n]
    p = tower.p
    pi = tower.pi(n)
    reps = _relative_group(n - 1, 1, p)
    conj = [galois_apply(a, pi) for a in reps]
    Q = [one(level)]
    for c in conj:
        Q = _poly_mul(Q, [-c, one(level)], level)
    try:
        lower = [descend(c, tower) for c in Q]
        in_lower = True
    except PrecisionError:
        lower, in_lower = None, False
    vanishes = _poly_eval(Q, pi).is_zero()
    dQ = [c * k for k, c in enumerate(Q)][1:]
    formal = _poly_eval(dQ, pi)
    product = one(level)
    for a, c in zip(reps, conj):
        if a != 1:
            product = product * (pi - c)
    v = val_p(formal)
    if v == INF:
        raise PrecisionError(f"Q'(pi_{n}) vanishes at precision N={tower.ctx.N}")
    return DifferentialReport(n, v, True, len(reps), in_lower, vanishes, formal == product)


@dataclass
class SdrRecord:
    n: int
    degree: int
    ann_val: Fraction
    surjection_ok: bool


@dataclass
class SdrCertificate:
    p: int
    n0: int
    xi_val: Fraction
    d: int
    records: list

    @property
    def valid(self) -> bool:
        want = self.p ** (self.d + 1)
        return bool(self.records) and all(r.degree == want and r.surjection_ok for r in self.records)


def sdr_certify(tower: Tower, n0: int = 1, xi_val=Fraction(1), d: int = 0,
                reports: list | None = None) -> SdrCertificate:
    """Check every layer n > n0 has degree p^{d+1} and Omega surjects onto O_n/xi."""
    xi_val = Fraction(xi_val)
    if not 0 < xi_val <= 1:
        raise ValueError("v_p(xi) must lie in (0, 1]")
    if reports is None:
        reports = [differential_annihilator(tower, n) for n in range(n0 + 1, tower.n_max + 1)]
    records = []
    for rep in reports:
        # Omega = O_n / (Q'(pi_n)) is cyclic on d(pi_n); it maps onto O_n/xi iff xi divides Q'
        ok = rep.cyclic and rep.ann_val >= xi_val and getattr(rep, "ok", True)
        records.append(SdrRecord(rep.n, rep.degree, rep.ann_val, ok))
    return SdrCertificate(tower.p, n0, xi_val, d, records)


@dataclass
class FrobeniusReport:
    n: int
    xi_val: Fraction
    uniformizer_congruence: bool
    lands_in_image: bool
    onto: bool
    rank: int
    target_dim: int

    @property
    def ok(self) -> bool:
        return self.uniformizer_congruence and self.lands_in_image and self.onto


def _xi_exponent(level: TowerLevel, xi_val: Fraction) -> int:
    s = xi_val * level.degree
    if s.denominator != 1:
        raise ValueError(f"xi with v_p={xi_val} is not an ideal of level {level.n}")
    return int(s)


def frobenius_report(tower: Tower, n: int, xi_val=Fraction(1), uniformizers=None) -> FrobeniusReport:
    """Does x -> x^p induce a surjection O_{n+1}/xi -> O_n/xi?

    ``uniformizers`` optionally maps level -> chosen uniformizer (default pi).
    """
    xi_val = Fraction(xi_val)
    lo, hi = tower[n], tower[n + 1]
    s_lo, s_hi = _xi_exponent(lo, xi_val), _xi_exponent(hi, xi_val)
    if s_hi > hi.degree:
        raise ValueError("v_p(xi) must be <= 1")
    p = tower.p
    w_lo = (uniformizers or {}).get(n, tower.pi(n))
    w_hi = (uniformizers or {}).get(n + 1, tower.pi(n + 1))
    cong = not (w_hi ** p - embed(w_lo, tower)).residue_mod_xi(s_hi).any()
    # F_p-basis of O_n/xi pushed into O_{n+1}/xi
    pi_lo, pi_hi = tower.pi(n), tower.pi(n + 1)
    img = []
    x = one(lo)
    for _ in range(s_lo):
        img.append(embed(x, tower).residue_mod_xi(s_hi))
        x = x * pi_lo
    B = np.array(img, dtype=np.int64).T  # s_hi x s_lo
    cols = []
    lands = True
    y = one(hi)
    for _ in range(s_hi):
        r = (y ** p).residue_mod_xi(s_hi)
        sol = solve_mod_p(B, r, p)
        if sol is None:
            lands = False
            break
        cols.append(sol)
        y = y * pi_hi
    rank = rank_mod_p(np.array(cols).T, p) if lands else 0
    return FrobeniusReport(n, xi_val, cong, lands, lands and rank == s_lo, rank, s_lo)


def frobenius_check(tower: Tower, n: int, xi_val=Fraction(1)) -> bool:
    return frobenius_report(tower, n, xi_val).ok


def galois_orbit_mod_p(tower: Tower, n: int) -> set:
    """Distinct residues mod p of the conjugates of pi_n."""
    level = tower[n]
    pi = tower.pi(n)
    out = set()
    for a in range(1, level.order):
        if a % tower.p:
            out.add(tuple(int(c) % tower.p for c in galois_apply(a, pi).z))
    return out
