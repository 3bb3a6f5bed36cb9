"""Enumerated matrix groups over Z/p^n modelling the tower's Galois groups.

Matrices are flat tuples of length h*h (row major) with entries mod p^n.
Groups are small enough to list; every structural claim (closure,
normality, orders, semidirect decompositions) is checked by brute force.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from math import gcd, prod

from .padic import BudgetExceeded, PadicContext
from .series import TruncSeries
from .towers import Tower, galois_apply, one

ENUM_BUDGET = 100_000
KINDS = ("gl", "parabolic", "mirabolic", "congruence_kernel")


def mat_mul(a: tuple, b: tuple, h: int, m: int) -> tuple:
    return tuple(
        sum(a[i * h + k] * b[k * h + j] for k in range(h)) % m
        for i in range(h) for j in range(h))


def identity(h: int) -> tuple:
    return tuple(1 if i == j else 0 for i in range(h) for j in range(h))


def det(a: tuple, h: int, m: int) -> int:
    # Laplace expansion is fine for h <= 3
    if h == 1:
        return a[0] % m
    total = 0
    for j in range(h):
        minor = tuple(a[r * h + c] for r in range(1, h) for c in range(h) if c != j)
        total += (-1) ** j * a[j] * det(minor, h - 1, m)
    return total % m


def mat_inv(a: tuple, h: int, m: int) -> tuple:
    d = det(a, h, m)
    dinv = pow(d, -1, m)
    adj = []
    for i in range(h):
        for j in range(h):
            minor = tuple(a[r * h + c] for r in range(h) if r != j for c in range(h) if c != i)
            cof = (-1) ** (i + j) * (det(minor, h - 1, m) if h > 1 else 1)
            adj.append(cof * dinv % m)
    return tuple(adj)


def _member(kind: str, a: tuple, h: int, n: int, p: int) -> bool:
    m = p ** n
    if kind == "gl":
        return det(a, h, m) % p != 0
    if kind == "parabolic":
        # first column (a11, 0, ..., 0)^T: stabilizes the line through e_1
        return all(a[i * h] == 0 for i in range(1, h)) and det(a, h, m) % p != 0
    if kind == "mirabolic":
        if a[0] % p == 0:
            return False
        return all(a[i * h + j] == (1 if i == j else 0) for i in range(1, h) for j in range(h))
    if kind == "congruence_kernel":
        if n < 2:
            raise ValueError("the congruence kernel needs n >= 2")
        step = p ** (n - 1)
        return all((a[k] - (1 if k // h == k % h else 0)) % step == 0 for k in range(h * h))
    raise ValueError(f"unknown kind {kind!r}; choose from {KINDS}")


@dataclass
class MatrixGroup:
    kind: str
    h: int
    n: int
    p: int
    elements: list
    _index: set = field(default_factory=set, repr=False)

    @property
    def modulus(self) -> int:
        return self.p ** self.n

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, a) -> bool:
        if not self._index:
            self._index = set(self.elements)
        return tuple(a) in self._index

    def mul(self, a, b):
        return mat_mul(a, b, self.h, self.modulus)

    def inv(self, a):
        return mat_inv(a, self.h, self.modulus)


def _candidates(kind: str, h: int, n: int, p: int):
    m = p ** n
    if kind == "mirabolic":
        rest = identity(h)[h:]
        for first in product(range(m), repeat=h):
            yield tuple(first) + rest
        return
    if kind == "congruence_kernel":
        step = p ** (n - 1)
        I = identity(h)
        for M in product(range(p), repeat=h * h):
            yield tuple((I[k] + step * M[k]) % m for k in range(h * h))
        return
    if kind == "parabolic":
        for rest in product(range(m), repeat=h * h - (h - 1)):
            it = iter(rest)
            yield tuple(0 if (k % h == 0 and k // h > 0) else next(it) for k in range(h * h))
        return
    yield from product(range(m), repeat=h * h)


def _candidate_count(kind, h, n, p) -> int:
    m = p ** n
    return {"mirabolic": m ** h, "congruence_kernel": p ** (h * h),
            "parabolic": m ** (h * h - h + 1)}.get(kind, m ** (h * h))


def closure(gens: list, h: int, m: int, limit: int | None = None) -> set:
    """Subgroup generated by ``gens`` (finite, so products suffice)."""
    I = identity(h)
    seen = {I}
    frontier = [I]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mat_mul(x, g, h, m)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
        if limit is not None and len(seen) > limit:
            break
    return seen


def build_group(kind: str, h: int, n: int, p: int, budget: int = ENUM_BUDGET,
                seed: int = 0) -> MatrixGroup:
    """Enumerate the group and check it is closed (generated set = listed set)."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; choose from {KINDS}")
    if _candidate_count(kind, h, n, p) > budget:
        raise BudgetExceeded(f"{kind}(h={h}, n={n}, p={p}) needs more than {budget} candidates")
    elems = sorted(a for a in _candidates(kind, h, n, p) if _member(kind, a, h, n, p))
    G = MatrixGroup(kind, h, n, p, elems)
    G._index = set(elems)
    if not check_group(G, seed=seed):
        raise ArithmeticError(f"{kind} enumeration is not closed")
    return G


def check_group(G: MatrixGroup, seed: int = 0, tries: int = 20) -> bool:
    """Closure under products and inverses, by regenerating from random elements."""
    rng = random.Random(seed)
    m, h = G.modulus, G.h
    if identity(h) not in G:
        return False
    for a in G.elements[:: max(1, len(G.elements) // 50)]:
        if G.inv(a) not in G:
            return False
    for _ in range(tries):
        gens = rng.sample(G.elements, min(4, len(G.elements)))
        gen = closure(gens, h, m, limit=G.order)
        if not gen <= G._index:
            return False
        if len(gen) == G.order:
            return True
    return False


# -- closed forms ----------------------------------------------------------

def gl_order(h: int, n: int, p: int) -> int:
    return p ** ((n - 1) * h * h) * prod(p ** h - p ** i for i in range(h))


def parabolic_order(h: int, n: int, p: int) -> int:
    units = (p - 1) * p ** (n - 1)
    return units * p ** (n * (h - 1)) * (gl_order(h - 1, n, p) if h > 1 else 1)


def mirabolic_order(h: int, n: int, p: int) -> int:
    return (p - 1) * p ** (n - 1) * p ** (n * (h - 1))


def kernel_order(h: int, n: int, p: int) -> int:
    return p ** (h * h)


CLOSED_FORMS = {"gl": gl_order, "parabolic": parabolic_order,
                "mirabolic": mirabolic_order, "congruence_kernel": kernel_order}


# -- semidirect products ---------------------------------------------------

@dataclass
class SemidirectDescription:
    A: list  # normal subgroup
    B: list  # complement
    action: object = None  # optional (b, a) -> b a b^{-1}


def _is_subgroup(S: set, h: int, m: int) -> bool:
    if identity(h) not in S:
        return False
    return all(mat_mul(x, y, h, m) in S for x in S for y in S)


def verify_semidirect(G: MatrixGroup, desc: SemidirectDescription) -> bool:
    h, m = G.h, G.modulus
    A, B = set(map(tuple, desc.A)), set(map(tuple, desc.B))
    if not (A <= G._index and B <= G._index):
        return False
    if not (_is_subgroup(A, h, m) and _is_subgroup(B, h, m)):
        return False
    if A & B != {identity(h)}:
        return False
    if len(A) * len(B) != G.order:
        return False
    for g in G.elements:
        gi = G.inv(g)
        for a in A:
            if mat_mul(mat_mul(g, a, h, m), gi, h, m) not in A:
                return False
    if {mat_mul(a, b, h, m) for a in A for b in B} != G._index:
        return False
    if desc.action is not None:
        for b in B:
            bi = G.inv(b)
            for a in A:
                if tuple(desc.action(b, a)) != mat_mul(mat_mul(b, a, h, m), bi, h, m):
                    return False
    return True


def mirabolic_decomposition(G: MatrixGroup) -> SemidirectDescription:
    """Unipotent first row (normal) and diagonal units (complement)."""
    if G.kind != "mirabolic":
        raise ValueError("expected a mirabolic group")
    h, m = G.h, G.modulus
    A = [a for a in G.elements if a[0] == 1]
    B = [a for a in G.elements if all(a[j] == 0 for j in range(1, h))]

    def act(b, a):
        # diag(u, 1, ..., 1) scales the row vector by u
        u = b[0]
        return (1,) + tuple(u * a[j] % m for j in range(1, h)) + a[h:]

    return SemidirectDescription(A, B, act)


def is_normal(H: list, G: MatrixGroup) -> bool:
    h, m = G.h, G.modulus
    S = set(H)
    return all(mat_mul(mat_mul(g, x, h, m), G.inv(g), h, m) in S for g in G.elements for x in S)


def reduction_image(G: MatrixGroup) -> set:
    """Image of G under reduction mod p^{n-1}."""
    m = G.p ** (G.n - 1)
    return {tuple(x % m for x in a) for a in G.elements}


# -- ramification ladder -------------------------------------------------------

@dataclass
class LadderRow:
    n: int
    parabolic_order: int
    layer_degree: int | None  # [K'_n : K'_{n-1}]
    layer_degree_closed: int | None
    mirabolic_order: int
    inertia_order: int  # e(K_n | K_0) from the diagonal-unit subgroup
    inertia_closed: int
    residue_step: int  # [k_n : k_{n-1}]
    residue_step_closed: int
    enumerated: bool


def degree_ladder(h: int, n: int, p: int, budget: int = ENUM_BUDGET) -> list:
    rows = []
    prev_par = None
    prev_f = 1
    for k in range(1, n + 1):
        enum = True
        try:
            P = build_group("parabolic", h, k, p, budget)
            Mi = build_group("mirabolic", h, k, p, budget)
            par_order, mir_order = P.order, Mi.order
            inertia = sum(1 for a in Mi.elements if all(a[j] == 0 for j in range(1, h)))
        except BudgetExceeded:
            enum = False
            par_order, mir_order = parabolic_order(h, k, p), mirabolic_order(h, k, p)
            inertia = (p - 1) * p ** (k - 1)
        f = mir_order // inertia
        rows.append(LadderRow(
            k, par_order,
            par_order // prev_par if prev_par else None,
            p ** (1 + (h - 1) + (h - 1) ** 2) if prev_par else None,
            mir_order, inertia, (p - 1) * p ** (k - 1),
            f // prev_f, p ** (h - 1), enum))
        prev_par, prev_f = par_order, f
    return rows


def ladder_consistent(rows: list) -> bool:
    for r in rows:
        if r.inertia_order != r.inertia_closed or r.residue_step != r.residue_step_closed:
            return False
        if r.layer_degree is not None and r.layer_degree != r.layer_degree_closed:
            return False
    return True


# -- torsion action for h = 1 ------------------------------------------------

def _eval_series_at(s: TruncSeries, x):
    acc = one(x.level) * 0
    for k in range(s.D, -1, -1):
        acc = acc * x + one(x.level) * int(s.coeff(k))
    return acc


def torsion_action_check(tower: Tower, n: int) -> bool:
    """sigma_a(pi_n) equals [a]_mult(pi_n) for every unit a mod p^n."""
    from .formalgroup import multiplicative_module

    p, N = tower.p, tower.ctx.N
    level = tower[n]
    D = level.degree * N  # pi_n^D lies in p^N O_n
    X = multiplicative_module(PadicContext(p, N), D)
    pi = tower.pi(n)
    for a in range(1, p ** n):
        if gcd(a, p) != 1:
            continue
        if galois_apply(a, pi) != _eval_series_at(X.bracket(a), pi):
            return False
    for a in range(1, p ** n):
        for b in range(1, p ** n):
            if gcd(a * b, p) != 1:
                continue
            if galois_apply(a, galois_apply(b, pi)) != galois_apply(a * b, pi):
                return False
    return True
