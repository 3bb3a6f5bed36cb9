"""Cohomology of finite groups with coefficients in finite abelian groups.

Cochains are numpy arrays of shape (|G|^i, r) holding coordinates in
M = Z/m_1 + ... + Z/m_r.  H^i is computed one primary part at a time: the
l-part of M is embedded in (Z/l^K)^r (coordinate j scaled by l^{K-k_j}) and
kernels and quotients come from the local Smith form over Z/l^K.

Degree-1 cocycle equations are imposed only for h in a generating set,
which is enough: c_{g h s} = c_g + g c_{h s} follows from the cases
(g, h) and (gh, s).
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import gcd, prod

import numpy as np

from .linalg import kernel_local, local_smith, solve_local
from .padic import BudgetExceeded, is_prime

MATRIX_BUDGET = 4_000_000  # entries of a single dense cochain matrix
ENUM_LIMIT = 20_000  # elements enumerated when comparing subgroups


class NotACocycle(ValueError):
    pass


class NotCyclic(ValueError):
    pass


# -- groups --------------------------------------------------------------------

@dataclass
class GroupTable:
    labels: list
    table: np.ndarray
    identity: int
    inverse: np.ndarray
    _index: dict = field(default_factory=dict, repr=False)
    _gens: list | None = field(default=None, repr=False)

    @classmethod
    def from_elements(cls, elements, mul) -> "GroupTable":
        labels = list(elements)
        index = {x: i for i, x in enumerate(labels)}
        if len(index) != len(labels):
            raise ValueError("repeated group elements")
        n = len(labels)
        table = np.empty((n, n), dtype=np.int64)
        for i, x in enumerate(labels):
            for j, y in enumerate(labels):
                z = mul(x, y)
                if z not in index:
                    raise ValueError(f"not closed: {x!r}*{y!r} = {z!r}")
                table[i, j] = index[z]
        G = cls._from_table(labels, table)
        G._index = index
        return G

    @classmethod
    def _from_table(cls, labels, table) -> "GroupTable":
        n = len(labels)
        ident = [i for i in range(n) if (table[i] == np.arange(n)).all()]
        if len(ident) != 1 or not (table[:, ident[0]] == np.arange(n)).all():
            raise ValueError("no two-sided identity")
        e = ident[0]
        inverse = np.empty(n, dtype=np.int64)
        for i in range(n):
            js = np.nonzero(table[i] == e)[0]
            if js.size != 1 or table[js[0], i] != e:
                raise ValueError("missing inverse")
            inverse[i] = js[0]
        for row in table:
            if len(set(row.tolist())) != n:
                raise ValueError("table is not a Latin square")
        # associativity: (xy)z = x(yz) for all triples, vectorized over z
        for x in range(n):
            if not (table[table[x]] == table[x][table]).all():
                raise ValueError("multiplication is not associative")
        return cls(list(labels), table, e, inverse,
                   {x: i for i, x in enumerate(labels)})

    @property
    def order(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self._index[label]

    def mul(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def inv(self, i: int) -> int:
        return int(self.inverse[i])

    def conj(self, g: int, x: int) -> int:
        """g x g^{-1}."""
        return int(self.table[self.table[g, x], self.inverse[g]])

    def closure(self, gens) -> set:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = int(self.table[x, s])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def generators(self) -> list:
        if self._gens is None:
            # elements of large order first keeps the set short
            orders = [self.element_order(i) for i in range(self.order)]
            cand = sorted(range(self.order), key=lambda i: (-orders[i], i))
            gens: list = []
            span = {self.identity}
            for c in cand:
                if len(span) == self.order:
                    break
                if c not in span:
                    gens.append(c)
                    span = self.closure(gens)
            self._gens = gens
        return list(self._gens)

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != self.identity:
            x = int(self.table[x, i])
            k += 1
        return k

    def is_normal(self, sub) -> bool:
        S = set(sub)
        return all(self.conj(g, h) in S for g in self.generators() for h in S)

    def subgroup(self, sub) -> tuple["GroupTable", list]:
        """(H, emb) with emb[j] the index in G of H's j-th element."""
        emb = sorted(set(sub))
        if self.closure(emb) != set(emb):
            raise ValueError("not a subgroup")
        pos = {g: j for j, g in enumerate(emb)}
        table = np.array([[pos[int(self.table[a, b])] for b in emb] for a in emb], dtype=np.int64)
        return GroupTable._from_table([self.labels[g] for g in emb], table), emb

    def quotient(self, sub) -> tuple["GroupTable", np.ndarray, list]:
        """(Q, proj, lifts) for a normal subgroup; lifts[identity of Q] = identity of G."""
        S = sorted(set(sub))
        if not self.is_normal(S):
            raise ValueError("subgroup is not normal")
        proj = np.full(self.order, -1, dtype=np.int64)
        lifts: list = []
        order = [self.identity] + [g for g in range(self.order) if g != self.identity]
        for g in order:
            if proj[g] >= 0:
                continue
            q = len(lifts)
            lifts.append(g)
            for h in S:
                proj[self.table[g, h]] = q
        nq = len(lifts)
        table = np.array([[proj[self.table[lifts[a], lifts[b]]] for b in range(nq)]
                          for a in range(nq)], dtype=np.int64)
        labels = [tuple(sorted(self.labels[self.table[lifts[a], h]] for h in S)) for a in range(nq)]
        return GroupTable._from_table(labels, table), proj, lifts

    def relabel(self, perm) -> "GroupTable":
        """Same group with element i renamed to perm[i] (an isomorphic copy)."""
        perm = np.asarray(perm)
        inv = np.argsort(perm)
        table = perm[self.table[np.ix_(inv, inv)]]
        labels = [self.labels[i] for i in inv]
        return GroupTable._from_table(labels, table)


def cyclic_group(d: int) -> GroupTable:
    return GroupTable.from_elements(range(d), lambda a, b: (a + b) % d)


def semidirect_group(k: int, U) -> GroupTable:
    """E x| U with E = Z/k and (e1,u1)(e2,u2) = (e1 + u1 e2, u1 u2)."""
    U = sorted(set(u % k for u in U))
    elems = [(e, u) for u in U for e in range(k)]
    return GroupTable.from_elements(elems, lambda x, y: ((x[0] + x[1] * y[0]) % k, x[1] * y[1] % k))


def kummer_group(k: int, U=None) -> GroupTable:
    """U |x C with (u1,c1)(u2,c2) = (u1 u2, u1 c2 + c1)."""
    U = sorted(set(u % k for u in (U if U is not None else _units(k))))
    elems = [(u, c) for u in U for c in range(k)]
    return GroupTable.from_elements(elems, lambda x, y: (x[0] * y[0] % k, (x[0] * y[1] + x[1]) % k))


def borel_group(p: int, n: int) -> GroupTable:
    """Upper triangular [[a, b], [0, d]] over Z/p^n, stored as (a, b, d)."""
    m = p ** n
    U = _units(m)
    elems = [(a, b, d) for a in U for b in range(m) for d in U]
    return GroupTable.from_elements(
        elems, lambda x, y: (x[0] * y[0] % m, (x[0] * y[1] + x[1] * y[2]) % m, x[2] * y[2] % m))


def permutation_group(gens, degree: int) -> GroupTable:
    gens = [tuple(g) for g in gens]
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(x[g[i]] for i in range(degree))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    # (x*y)(i) = x(y(i))
    return GroupTable.from_elements(sorted(seen), lambda x, y: tuple(x[y[i]] for i in range(degree)))


def _units(k: int) -> list:
    return [u for u in range(1, k) if gcd(u, k) == 1]


# -- modules -------------------------------------------------------------------

@dataclass
class GModule:
    """M = sum Z/m_i with g acting by the integer matrix action[g] (column vectors)."""
    G: GroupTable
    moduli: tuple
    action: np.ndarray  # shape (|G|, r, r)

    def __post_init__(self):
        self.moduli = tuple(int(m) for m in self.moduli)
        self.action = np.asarray(self.action, dtype=np.int64).reshape(self.G.order, self.rank, self.rank)
        self.action = self.action % np.array(self.moduli, dtype=np.int64).reshape(1, -1, 1)
        self.check()

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def size(self) -> int:
        return prod(self.moduli)

    def _mod(self, v):
        return np.asarray(v, dtype=np.int64) % np.array(self.moduli, dtype=np.int64)

    def act(self, g: int, v) -> np.ndarray:
        return self._mod(self.action[g] @ np.asarray(v, dtype=np.int64))

    def check(self):
        m = np.array(self.moduli, dtype=np.int64)
        # Z/m_j -> Z/m_i is well defined only if m_i | A_ij m_j
        if ((self.action * m.reshape(1, 1, -1)) % m.reshape(1, -1, 1)).any():
            raise ValueError("action matrices are not well defined on M")
        e = self.G.identity
        if (self._mod_mat(self.action[e]) != self._mod_mat(np.eye(self.rank, dtype=np.int64))).any():
            raise ValueError("identity does not act trivially")
        gens = self.G.generators()
        for g in range(self.G.order):
            for s in gens:
                lhs = self.action[self.G.table[g, s]]
                rhs = self.action[g] @ self.action[s]
                if (self._mod_mat(lhs) != self._mod_mat(rhs)).any():
                    raise ValueError("action is not a homomorphism")

    def _mod_mat(self, A):
        return np.asarray(A) % np.array(self.moduli, dtype=np.int64).reshape(-1, 1)

    def elements(self):
        if self.size > ENUM_LIMIT:
            raise BudgetExceeded(f"|M| = {self.size} exceeds the enumeration limit")
        for t in itertools.product(*(range(m) for m in self.moduli)):
            yield np.array(t, dtype=np.int64)

    def restrict(self, sub) -> "GModule":
        H, emb = self.G.subgroup(sub)
        return GModule(H, self.moduli, self.action[emb])

    def relabel(self, perm) -> "GModule":
        G2 = self.G.relabel(perm)
        inv = np.argsort(np.asarray(perm))
        return GModule(G2, self.moduli, self.action[inv])

    @classmethod
    def trivial(cls, G: GroupTable, moduli) -> "GModule":
        if isinstance(moduli, int):
            moduli = (moduli,)
        r = len(moduli)
        return cls(G, moduli, np.broadcast_to(np.eye(r, dtype=np.int64), (G.order, r, r)).copy())

    @classmethod
    def character(cls, G: GroupTable, m: int, chi) -> "GModule":
        """Z/m with g acting by multiplication by chi(g)."""
        vals = [chi(G.labels[g]) % m for g in range(G.order)]
        return cls(G, (m,), np.array(vals, dtype=np.int64).reshape(-1, 1, 1))


# -- primary decomposition -----------------------------------------------------

def _factor(n: int) -> dict:
    out, q = {}, 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass
class _Primary:
    """The l-part of M, embedded in (Z/l^K)^len(J)."""
    ell: int
    J: list  # coordinates of M with l | m_j
    k: np.ndarray  # l-adic exponent of m_j
    K: int
    moduli: tuple

    @property
    def m(self) -> int:
        return self.ell ** self.K

    @property
    def scale(self) -> np.ndarray:
        return self.ell ** (self.K - self.k)

    def to_f(self, c: np.ndarray) -> np.ndarray:
        """Cochain array (N, r) -> flat vector in (Z/l^K)^{N |J|}."""
        x = c[:, self.J] % (self.ell ** self.k)
        return (x * self.scale % self.m).reshape(-1)

    def from_f(self, f: np.ndarray, N: int) -> np.ndarray:
        x = np.asarray(f, dtype=np.int64).reshape(N, len(self.J)) % self.m
        if (x % self.scale).any():
            raise ValueError("vector is outside the embedded submodule")
        x = x // self.scale
        out = np.zeros((N, len(self.moduli)), dtype=np.int64)
        for t, j in enumerate(self.J):
            mj = self.moduli[j]
            q = int(self.ell ** self.k[t])
            rest = mj // q
            idem = rest * pow(rest, -1, q) % mj if q > 1 else 0
            out[:, j] = x[:, t] * idem % mj
        return out

    def block(self, A: np.ndarray) -> np.ndarray:
        """Action matrices in the embedded coordinates; input already Delta-scaled."""
        sub = A[..., self.J, :][..., :, self.J]
        return sub * self.scale.reshape(-1, 1) % self.m


def _primaries(moduli) -> list:
    primes = sorted({l for m in moduli for l in _factor(m)})
    out = []
    for l in primes:
        J = [j for j, m in enumerate(moduli) if m % l == 0]
        k = np.array([_factor(moduli[j])[l] for j in J], dtype=np.int64)
        out.append(_Primary(l, J, k, int(k.max()), tuple(moduli)))
    return out


# -- cochain complex -------------------------------------------------------------

@dataclass
class _Setup:
    """Cochains on T valued in M; T acts through ``action`` and values may be
    constrained to the fixed points of the matrices in ``fixed_by``."""
    T: GroupTable
    moduli: tuple
    action: np.ndarray
    fixed_by: list = field(default_factory=list)
    budget: int = MATRIX_BUDGET


def _d_matrix(i: int, T: GroupTable, P: np.ndarray, Delta: np.ndarray, m: int,
              gens_only: bool, budget: int) -> np.ndarray:
    """Matrix of d^i from Delta-parametrized i-cochains to (i+1)-cochain values."""
    n, r = T.order, Delta.shape[0]
    tab = T.table
    # the identity row forces c(1) = 0 even when the generating set is empty
    second = np.array(sorted({T.identity, *T.generators()}) if gens_only else range(n), dtype=np.int64)
    if i == 0:
        rows_g = second
        nrows = len(rows_g)
        ncols = 1
    elif i == 1:
        g, h = np.meshgrid(np.arange(n), second, indexing="ij")
        g, h = g.ravel(), h.ravel()
        nrows, ncols = len(g), n
    elif i == 2:
        g, h, k = (a.ravel() for a in np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij"))
        nrows, ncols = len(g), n * n
    else:
        raise ValueError("degree must be 0, 1 or 2")
    if nrows * r * ncols * r > budget:
        raise BudgetExceeded(f"d^{i} would have {nrows * r} x {ncols * r} entries")
    L = np.zeros((nrows * r, ncols * r), dtype=np.int64)

    def put(rowblk, colblk, blocks, sign):
        # blocks: (len(rowblk), r, r) or (r, r)
        for a in range(r):
            for b in range(r):
                val = blocks[..., a, b] if blocks.ndim == 3 else blocks[a, b]
                np.add.at(L, (rowblk * r + a, colblk * r + b), sign * val)

    rows = np.arange(nrows)
    if i == 0:
        put(rows, np.zeros(nrows, dtype=np.int64), P[rows_g], 1)
        put(rows, np.zeros(nrows, dtype=np.int64), Delta, -1)
    elif i == 1:
        put(rows, h, P[g], 1)
        put(rows, tab[g, h], Delta, -1)
        put(rows, g, Delta, 1)
    else:
        put(rows, h * n + k, P[g], 1)
        put(rows, tab[g, h] * n + k, Delta, -1)
        put(rows, g * n + tab[h, k], Delta, 1)
        put(rows, g * n + h, Delta, -1)
    return L % m


@dataclass
class _PrimaryH:
    pr: _Primary
    N: int  # number of positions in a cochain
    V: np.ndarray
    dz: list  # Smith exponents of the cocycle module
    V2: np.ndarray
    sel: list  # (column, exponent f) of each nonzero summand
    reps_f: list  # F-vectors of representatives

    @property
    def orders(self) -> list:
        return [f for _, f in self.sel]

    def coords(self, f: np.ndarray) -> list:
        m, l = self.pr.m, self.pr.ell
        t = f @ self.V % m
        R = len(self.dz)
        if t[R:].any():
            raise NotACocycle("not in the cocycle module")
        s = np.zeros(R, dtype=np.int64)
        for i, d in enumerate(self.dz):
            if t[i] % l ** d:
                raise NotACocycle("not in the cocycle module")
            s[i] = t[i] // l ** d
        if not R:
            return []
        x = s @ self.V2 % m
        return [int(x[j]) % l ** f for j, f in self.sel]


def _primary_cohomology(i: int, S: _Setup, pr: _Primary) -> _PrimaryH:
    T, l, K, m = S.T, pr.ell, pr.K, pr.m
    r = len(pr.J)
    n = T.order
    N = n ** i
    Delta = np.diag(pr.scale).astype(np.int64)
    P = pr.block(S.action)
    C = [pr.block(A[None])[0] - Delta for A in S.fixed_by]
    # cocycles: d^i x = 0 plus value constraints at every position
    L = _d_matrix(i, T, P, Delta, m, gens_only=(i <= 1), budget=S.budget)
    if C:
        Cst = np.concatenate(C, axis=0) % m
        if N * Cst.shape[0] * N * r > S.budget:
            raise BudgetExceeded("value constraints too large")
        L = np.concatenate([L, np.kron(np.eye(N, dtype=np.int64), Cst) % m], axis=0)
    Y, _ = kernel_local(L, l, K)
    Zg = Y * np.tile(pr.scale, N) % m
    # coboundaries: d^{i-1} of cochains with constrained values
    if i == 0:
        Bg = np.zeros((0, N * r), dtype=np.int64)
    else:
        Ysub = kernel_local(np.concatenate(C, axis=0), l, K)[0] if C else np.eye(r, dtype=np.int64)
        Lprev = _d_matrix(i - 1, T, P, Delta, m, gens_only=False, budget=S.budget)
        Np = n ** (i - 1)
        blocks = [Lprev[:, q * r:(q + 1) * r] @ Ysub.T % m for q in range(Np)]
        Bg = np.concatenate(blocks, axis=1).T % m if blocks else np.zeros((0, N * r), dtype=np.int64)
    return _quotient(pr, N, Zg, Bg)


def _quotient(pr: _Primary, N: int, Zg: np.ndarray, Bg: np.ndarray) -> _PrimaryH:
    l, K, m = pr.ell, pr.K, pr.m
    width = N * len(pr.J)
    Zg = Zg.reshape(-1, width)
    if Zg.shape[0] == 0 or not Zg.any():
        return _PrimaryH(pr, N, np.eye(width, dtype=np.int64), [], np.zeros((0, 0), dtype=np.int64), [], [])
    S1 = local_smith(Zg, l, K, track_u=False, track_vinv=True)
    dz = list(S1.exps)
    R = len(dz)
    W = np.array([(l ** d) * S1.Vinv[j] % m for j, d in enumerate(dz)], dtype=np.int64)
    rel = [np.diag([l ** (K - d) for d in dz]).astype(np.int64) % m]
    if Bg.shape[0]:
        t = Bg @ S1.V % m
        if t[:, R:].any():
            raise ArithmeticError("coboundary outside the cocycle module")
        ds = np.array([l ** d for d in dz], dtype=np.int64)
        if (t[:, :R] % ds).any():
            raise ArithmeticError("coboundary outside the cocycle module")
        rel.append(t[:, :R] // ds)
    Rel = np.concatenate(rel, axis=0) % m
    S2 = local_smith(Rel, l, K, track_u=False, track_vinv=True)
    f_all = list(S2.exps) + [K] * (R - S2.rank)
    sel = [(j, f) for j, f in enumerate(f_all) if f > 0]
    reps = [S2.Vinv[j] @ W % m for j, _ in sel]
    return _PrimaryH(pr, N, S1.V, dz, S2.V, sel, reps)


@dataclass
class CohomologyGroup:
    """H^i as a sum of cyclic groups Z/l^f, with a representative cocycle for each."""
    degree: int
    setup: _Setup = field(repr=False)
    parts: list = field(repr=False)
    elementary_divisors: list  # [(l, f)] per summand, in the order of ``representatives``
    representatives: list = field(repr=False)

    @property
    def group_order(self) -> int:
        return prod(l ** f for l, f in self.elementary_divisors)

    @property
    def summand_orders(self) -> list:
        return [l ** f for l, f in self.elementary_divisors]

    @property
    def invariant_factors(self) -> list:
        """d_1 | d_2 | ... with H = sum Z/d_i."""
        by_prime: dict = {}
        for l, f in self.elementary_divisors:
            by_prime.setdefault(l, []).append(l ** f)
        for v in by_prime.values():
            v.sort(reverse=True)
        width = max((len(v) for v in by_prime.values()), default=0)
        out = [prod(v[t] for v in by_prime.values() if t < len(v)) for t in range(width)]
        return sorted(out)

    @property
    def is_trivial(self) -> bool:
        return not self.elementary_divisors

    @property
    def n_positions(self) -> int:
        return self.setup.T.order ** self.degree

    def coordinates(self, c) -> tuple:
        c = _as_cochain(c, self.n_positions, self.setup.moduli)
        out = []
        for H in self.parts:
            out.extend(H.coords(H.pr.to_f(c)))
        return tuple(out)

    def is_coboundary(self, c) -> bool:
        return not any(self.coordinates(c))

    def cochain(self, coords) -> np.ndarray:
        mod = np.array(self.setup.moduli, dtype=np.int64)
        out = np.zeros((self.n_positions, len(mod)), dtype=np.int64)
        for x, rep in zip(coords, self.representatives):
            out = (out + int(x) * rep) % mod
        return out

    def elements(self):
        if self.group_order > ENUM_LIMIT:
            raise BudgetExceeded(f"|H| = {self.group_order} exceeds the enumeration limit")
        yield from itertools.product(*(range(q) for q in self.summand_orders))

    def reduce(self, coords) -> tuple:
        return tuple(int(x) % q for x, q in zip(coords, self.summand_orders))

    def add(self, x, y) -> tuple:
        return self.reduce(a + b for a, b in zip(x, y))

    def describe(self) -> str:
        if self.is_trivial:
            return "0"
        return " + ".join(f"Z/{q}" for q in self.invariant_factors)


def _as_cochain(c, N: int, moduli) -> np.ndarray:
    c = np.asarray(c, dtype=np.int64).reshape(N, len(moduli))
    return c % np.array(moduli, dtype=np.int64)


def _cohomology(i: int, S: _Setup) -> CohomologyGroup:
    parts, divisors, reps = [], [], []
    N = S.T.order ** i
    for pr in _primaries(S.moduli):
        H = _primary_cohomology(i, S, pr)
        parts.append(H)
        for f, rep in zip(H.orders, H.reps_f):
            divisors.append((pr.ell, f))
            reps.append(pr.from_f(rep, N))
    CG = CohomologyGroup(i, S, parts, divisors, reps)
    for j, rep in enumerate(reps):
        if not _is_cocycle_setup(S, i, rep):
            raise ArithmeticError("representative fails the cocycle identity")
        unit = [0] * len(reps)
        unit[j] = 1
        if CG.coordinates(rep) != tuple(unit):
            raise ArithmeticError("representatives are not independent")
    return CG


def h_compute(i: int, M: GModule, budget: int = MATRIX_BUDGET) -> CohomologyGroup:
    """H^i(G, M) for i in {0, 1, 2}."""
    if i not in (0, 1, 2):
        raise ValueError("degree must be 0, 1 or 2")
    return _cohomology(i, _Setup(M.G, M.moduli, M.action, [], budget))


# -- cocycle identities ----------------------------------------------------------

def _is_cocycle_setup(S: _Setup, i: int, c) -> bool:
    T, mod = S.T, np.array(S.moduli, dtype=np.int64)
    n = T.order
    c = _as_cochain(c, n ** i, S.moduli)
    for A in S.fixed_by:
        if ((np.einsum("ij,nj->ni", A, c) - c) % mod).any():
            return False
    act = S.action
    tab = T.table
    if i == 0:
        return not ((np.einsum("gij,j->gi", act, c[0]) - c[0]) % mod).any()
    if i == 1:
        g, h = (a.ravel() for a in np.meshgrid(np.arange(n), np.arange(n), indexing="ij"))
        lhs = c[tab[g, h]]
        rhs = c[g] + np.einsum("nij,nj->ni", act[g], c[h])
        return not ((lhs - rhs) % mod).any()
    c2 = c.reshape(n, n, -1)
    for g in range(n):
        # g c(h,k) - c(gh,k) + c(g,hk) - c(g,h) = 0 for all h, k
        t1 = np.einsum("ij,hkj->hki", act[g], c2)
        t2 = c2[tab[g]]
        t3 = c2[g][tab]
        t4 = c2[g][:, None, :]
        if ((t1 - t2 + t3 - t4) % mod).any():
            return False
    return True


def is_cocycle(M: GModule, i: int, c) -> bool:
    return _is_cocycle_setup(_Setup(M.G, M.moduli, M.action), i, c)


def coboundary(M: GModule, i: int, c) -> np.ndarray:
    """d^i c as a cochain array (degree 0 or 1)."""
    n, mod, tab, act = M.G.order, np.array(M.moduli, dtype=np.int64), M.G.table, M.action
    c = _as_cochain(c, n ** i, M.moduli)
    if i == 0:
        return (np.einsum("gij,j->gi", act, c[0]) - c[0]) % mod
    if i == 1:
        g, h = (a.ravel() for a in np.meshgrid(np.arange(n), np.arange(n), indexing="ij"))
        return (np.einsum("nij,nj->ni", act[g], c[h]) - c[tab[g, h]] + c[g]) % mod
    raise ValueError("only d^0 and d^1 are needed")


def _solve_over_M(moduli, A_blocks: np.ndarray, rhs: np.ndarray):
    """Solve sum_j A_blocks[:, :, j] x_j = rhs for x in M^ncols.

    A_blocks has shape (rows, r, ncols, r) of integer matrices and rhs shape
    (rows, r); returns x of shape (ncols, r) or None.
    """
    rows, r, ncols, _ = A_blocks.shape
    out = np.zeros((ncols, r), dtype=np.int64)
    for pr in _primaries(moduli):
        J, m = pr.J, pr.m
        A = A_blocks[:, J][:, :, :, J]
        A = (A * pr.scale.reshape(1, -1, 1, 1) % m).reshape(rows * len(J), ncols * len(J))
        b = pr.to_f(rhs)
        y = solve_local(A, b, pr.ell, pr.K)
        if y is None:
            return None
        f = y.reshape(ncols, len(J)) * pr.scale % m
        out = (out + pr.from_f(f.reshape(-1), ncols)) % np.array(moduli, dtype=np.int64)
    return out


def solve_coboundary(M: GModule, i: int, c):
    """Some (i-1)-cochain b with d b = c, or None.  Checked, not trusted."""
    n, r = M.G.order, M.rank
    c = _as_cochain(c, n ** i, M.moduli)
    if i == 1:
        blocks = np.zeros((n, r, 1, r), dtype=np.int64)
        blocks[:, :, 0, :] = M.action - np.eye(r, dtype=np.int64)
        b = _solve_over_M(M.moduli, blocks, c)
    elif i == 2:
        if n * n * r * n * r > MATRIX_BUDGET:
            raise BudgetExceeded("coboundary system too large")
        blocks = np.zeros((n * n, r, n, r), dtype=np.int64)
        I = np.eye(r, dtype=np.int64)
        for g in range(n):
            for h in range(n):
                row = g * n + h
                blocks[row, :, h] += M.action[g]
                blocks[row, :, M.G.table[g, h]] -= I
                blocks[row, :, g] += I
        b = _solve_over_M(M.moduli, blocks, c)
    else:
        raise ValueError("degree must be 1 or 2")
    if b is not None and (coboundary(M, i - 1, b) != c).any():
        raise ArithmeticError("coboundary solver returned a wrong answer")
    return b


# -- cyclic groups -----------------------------------------------------------------

@dataclass
class CyclicH1Report:
    d: int
    generator: int
    kernel_order: int  # |{m : N m = 0}|
    image_order: int  # |{u m - m}|
    quotient_order: int
    h1: CohomologyGroup
    cocycles_ok: bool
    image_to_coboundaries: bool
    injective: bool
    surjective: bool
    trivial_action_iso: bool | None  # M -> H^1 for trivial action with dM = 0

    @property
    def ok(self) -> bool:
        return (self.cocycles_ok and self.image_to_coboundaries and self.injective
                and self.surjective and self.trivial_action_iso is not False)


def cyclic_cocycle(M: GModule, u: int, m) -> np.ndarray:
    """c(m)_{u^i} = sum_{j<i} u^j m for i = 0..d-1."""
    G = M.G
    c = np.zeros((G.order, M.rank), dtype=np.int64)
    x, acc = G.identity, np.zeros(M.rank, dtype=np.int64)
    term = np.asarray(m, dtype=np.int64) % np.array(M.moduli)
    for _ in range(G.order):
        c[x] = acc
        acc = M._mod(acc + term)
        term = M.act(u, term)
        x = G.mul(x, u)
    return c


def cyclic_h1(M: GModule, u: int | None = None) -> CyclicH1Report:
    G = M.G
    if u is None:
        cands = [g for g in range(G.order) if G.element_order(g) == G.order]
        if not cands:
            raise NotCyclic("the group is not cyclic")
        u = cands[0]
    d = G.element_order(u)
    if d != G.order:
        raise NotCyclic(f"element {u} has order {d}, not {G.order}")
    H = h_compute(1, M)
    Nu = np.zeros((M.rank, M.rank), dtype=np.int64)
    P = np.eye(M.rank, dtype=np.int64)
    for _ in range(d):
        Nu = M._mod_mat(Nu + P)
        P = M._mod_mat(P @ M.action[u])
    kernel = [m for m in M.elements() if not M._mod(Nu @ m).any()]
    image = {tuple(M._mod(M.action[u] @ m - m)) for m in M.elements()}
    cocycles_ok = True
    classes = {}
    for m in kernel:
        c = cyclic_cocycle(M, u, m)
        if not is_cocycle(M, 1, c):
            cocycles_ok = False
            continue
        classes.setdefault(H.coordinates(c), set()).add(tuple(m))
    zero = tuple([0] * len(H.elementary_divisors))
    to_cob = classes.get(zero, set()) >= image
    injective = classes.get(zero, set()) == image
    surjective = len(classes) == H.group_order
    triv = None
    if (M.action == np.eye(M.rank, dtype=np.int64)).all() and all(d % mm == 0 for mm in M.moduli):
        # trivial action and dM = 0: kernel is all of M, image is 0
        triv = len(kernel) == M.size and len(image) == 1 and H.group_order == M.size and injective
    return CyclicH1Report(d, u, len(kernel), len(image), len(kernel) // max(len(image), 1), H,
                          cocycles_ok, to_cob, injective, surjective, triv)


# -- closed forms ------------------------------------------------------------------

def _require_odd(p: int):
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if p == 2:
        raise ValueError("p = 2 is not supported here (the unit group need not be cyclic)")


def _primitive_root(k: int) -> int:
    U = _units(k)
    for g in U:
        x, e = g, 1
        while x != 1:
            x = x * g % k
            e += 1
        if e == len(U):
            return g
    raise NotCyclic(f"(Z/{k})^x is not cyclic")


@dataclass
class UnitActionReport:
    p: int
    n: int
    generator: int
    h1: CohomologyGroup
    norm_kernel_is_M: bool
    image_is_M: bool
    cyclic_route: CyclicH1Report

    @property
    def ok(self) -> bool:
        return (self.h1.is_trivial and self.norm_kernel_is_M and self.image_is_M
                and self.cyclic_route.ok and self.cyclic_route.quotient_order == 1)


def unit_module(k: int, U=None) -> GModule:
    """Z/k (written additively for mu_k) with u acting by multiplication."""
    G = GroupTable.from_elements(sorted(set(u % k for u in (U if U is not None else _units(k)))),
                                 lambda a, b: a * b % k)
    return GModule.character(G, k, lambda u: u)


def unit_action_h1(p: int, n: int) -> UnitActionReport:
    _require_odd(p)
    k = p ** n
    M = unit_module(k)
    u = _primitive_root(k)
    ui = M.G.index(u)
    H = h_compute(1, M)
    norm = sum(pow(u, j, k) for j in range(len(_units(k)))) % k
    rep = cyclic_h1(M, ui)
    return UnitActionReport(p, n, u, H, norm == 0, gcd(u - 1, k) == 1, rep)


@dataclass
class SemidirectReport:
    k: int
    U: list
    h1_U: CohomologyGroup
    h1_G: CohomologyGroup
    section_cocycles: bool  # every c~(zeta) is a cocycle
    section_hom: bool  # zeta -> [c~(zeta)] is additive on classes
    res_section_identity: bool
    inflation_injective: bool
    res_inf_zero: bool
    exact_middle: bool  # im inf = ker res
    res_surjective: bool
    split_iso: bool  # H^1(G) ~ H^1(U) + mu as abstract groups

    @property
    def ok(self) -> bool:
        return all((self.section_cocycles, self.section_hom, self.res_section_identity,
                    self.inflation_injective, self.res_inf_zero, self.exact_middle,
                    self.res_surjective, self.split_iso))


def semidirect_h1(k: int, U=None) -> SemidirectReport:
    U = sorted(set(u % k for u in (U if U is not None else _units(k))))
    if any(gcd(u, k) != 1 for u in U) or any(a * b % k not in U for a in U for b in U):
        raise ValueError("U must be a subgroup of (Z/k)^x")
    G = semidirect_group(k, U)
    MG = GModule.character(G, k, lambda x: x[1])
    MU = unit_module(k, U)
    HG, HU = h_compute(1, MG), h_compute(1, MU)
    n = G.order
    projU = np.array([MU.G.index(G.labels[g][1]) for g in range(n)])
    E = [G.index((e, 1)) for e in range(k)]

    def section(z):
        return np.array([[G.labels[g][0] * z % k] for g in range(n)], dtype=np.int64)

    def res_to_mu(c):
        # on E the action is trivial, so a cocycle is a homomorphism e -> e*zeta
        vals = [int(c[E[e], 0]) for e in range(k)]
        z = vals[1]
        return z if all(vals[e] == e * z % k for e in range(k)) else None

    sec_coc = all(is_cocycle(MG, 1, section(z)) for z in range(k))
    sec_hom = all(HG.coordinates(section(a) + section(b)) == HG.coordinates(section((a + b) % k))
                  for a in range(k) for b in range(k))
    res_sec = all(res_to_mu(section(z)) == z for z in range(k))
    inf_image, res_zero = set(), True
    for x in HU.elements():
        c = HU.cochain(x)[projU]
        inf_image.add(HG.coordinates(c))
        res_zero &= res_to_mu(c) == 0
    inf_inj = len(inf_image) == HU.group_order
    ker_res, res_vals = set(), set()
    for x in HG.elements():
        z = res_to_mu(HG.cochain(x))
        res_vals.add(z)
        if z == 0:
            ker_res.add(tuple(x))
    split = sorted(HG.summand_orders) == sorted(HU.summand_orders + _cyclic_decomposition(k))
    return SemidirectReport(k, U, HU, HG, sec_coc, sec_hom, res_sec, inf_inj, res_zero,
                            ker_res == inf_image, res_vals == set(range(k)), split)


def _cyclic_decomposition(k: int) -> list:
    return [l ** e for l, e in _factor(k).items()]


@dataclass
class BorelReport:
    p: int
    n: int
    h1: CohomologyGroup
    fixed_points: list  # {x in Z/p^n : (d^2 - 1) x = 0 for all units d}
    closed_form_order: int  # 3 for p = 3, 1 for p > 3
    d_action_formula: bool  # (d . c(x))_{g_{a,b,1}} = b d^2 x on the mirabolic subgroup
    via_inflation_restriction: int | None  # |H^0(D, H^1(G, mu))| when computed

    @property
    def ok(self) -> bool:
        sizes = {self.h1.group_order, len(self.fixed_points), self.closed_form_order}
        if self.via_inflation_restriction is not None:
            sizes.add(self.via_inflation_restriction)
        cyclic = len(self.h1.invariant_factors) <= 1
        return len(sizes) == 1 and cyclic and self.d_action_formula


def borel_module(p: int, n: int) -> GModule:
    m = p ** n
    return GModule.character(borel_group(p, n), m, lambda g: g[0] * g[2])


def borel_h1(p: int, n: int, with_inflation_restriction: bool = False) -> BorelReport:
    _require_odd(p)
    m = p ** n
    M = borel_module(p, n)
    H = h_compute(1, M)
    U = _units(m)
    fixed = [x for x in range(m) if all((d * d - 1) * x % m == 0 for d in U)]
    closed = 3 if p == 3 else 1
    G = M.G
    # (q.c)_h = q~ . c_{q~^{-1} h q~} with q~ = diag(1, d) and c_{g_{a,b,1}} = b x
    formula = True
    for d in U:
        qt = G.index((1, 0, d))
        qi = G.inv(qt)
        for a in U:
            for b in range(m):
                h = G.index((a, b, 1))
                conj = G.labels[G.mul(G.mul(qi, h), qt)]
                if conj[2] != 1 or d * conj[1] % m != b * d * d % m:
                    formula = False
    via = None
    if with_inflation_restriction:
        mir = [g for g in range(G.order) if G.labels[g][2] == 1]
        rep = inflation_restriction(M, mir)
        via = len(rep.fixed_classes)
    return BorelReport(p, n, H, fixed, closed, formula, via)


# -- inflation-restriction ------------------------------------------------------------

@dataclass
class InfResReport:
    G_order: int
    H_order: int
    Q_order: int
    h1_Q: CohomologyGroup  # H^1(Q, M^H)
    h1_G: CohomologyGroup
    h1_H: CohomologyGroup
    h2_Q: CohomologyGroup  # H^2(Q, M^H)
    MH_trivial: bool
    lift_independent: bool
    q_action_is_action: bool
    fixed_classes: list  # H^0(Q, H^1(H, M)) as coordinate tuples
    inflation_injective: bool
    exact_at_h1G: bool
    exact_at_h0Q: bool
    exact_at_h2Q: bool
    restriction_lands_in_fixed: bool

    @property
    def ok(self) -> bool:
        return all((self.lift_independent, self.q_action_is_action, self.inflation_injective,
                    self.exact_at_h1G, self.exact_at_h0Q, self.exact_at_h2Q,
                    self.restriction_lands_in_fixed))

    def summary(self) -> dict:
        return {"|G|": self.G_order, "|H|": self.H_order, "|Q|": self.Q_order,
                "H1(Q,M^H)": self.h1_Q.describe(), "H1(G,M)": self.h1_G.describe(),
                "H1(H,M)": self.h1_H.describe(), "H0(Q,H1(H,M))": len(self.fixed_classes),
                "H2(Q,M^H)": self.h2_Q.describe()}


def _linear_images(target: CohomologyGroup, images: list, source: CohomologyGroup):
    """Turn images of source generators into a function on coordinate tuples."""
    def f(x):
        acc = [0] * len(target.elementary_divisors)
        for xi, img in zip(x, images):
            acc = [a + xi * b for a, b in zip(acc, img)]
        return target.reduce(acc)
    return f


def inflation_restriction(M: GModule, H_elems, budget: int = MATRIX_BUDGET) -> InfResReport:
    G = M.G
    H_elems = sorted(set(int(h) for h in H_elems))
    Q, proj, lifts = G.quotient(H_elems)
    MH = M.restrict(H_elems)
    Htab, emb = MH.G, H_elems
    pos = {g: j for j, g in enumerate(emb)}
    hgens = [emb[j] for j in Htab.generators()]
    mod = np.array(M.moduli, dtype=np.int64)

    fixed_by = [M.action[h] for h in hgens]
    SQ = _Setup(Q, M.moduli, M.action[lifts], fixed_by, budget)
    h1Q, h2Q = _cohomology(1, SQ), _cohomology(2, SQ)
    h1G, h1H = h_compute(1, M, budget), h_compute(1, MH, budget)
    MH_trivial = _fixed_is_zero(M, hgens)

    def conj_cocycle(g, c):
        # (g.c)_h = g . c_{g^{-1} h g}
        gi = G.inv(g)
        idx = [pos[G.mul(G.mul(gi, h), g)] for h in emb]
        return M._mod((M.action[g] @ c[idx].T).T)

    # Q-action on H^1(H, M), one matrix per lift
    gen_cocycles = h1H.representatives
    lift_ok, mats = True, []
    for q in range(Q.order):
        coset = [g for g in range(G.order) if proj[g] == q]
        ref = None
        for g in coset:
            imgs = [h1H.coordinates(conj_cocycle(g, c)) for c in gen_cocycles]
            if ref is None:
                ref = imgs
            elif imgs != ref:
                lift_ok = False
        mats.append(_linear_images(h1H, ref, h1H))
    H1H_elems = list(h1H.elements())
    act_ok = all(mats[Q.mul(a, b)](x) == mats[a](mats[b](x))
                 for a in Q.generators() for b in range(Q.order) for x in H1H_elems)
    fixed = [tuple(x) for x in H1H_elems if all(mats[q](x) == tuple(x) for q in Q.generators())]
    fixed_set = set(fixed)

    # restriction H^1(G, M) -> H^1(H, M)
    res = _linear_images(h1H, [h1H.coordinates(c[emb]) for c in h1G.representatives], h1G)
    H1G_elems = [tuple(x) for x in h1G.elements()]
    res_vals = {x: res(x) for x in H1G_elems}
    zero_H = h1H.reduce([0] * len(h1H.elementary_divisors))
    ker_res = {x for x, v in res_vals.items() if v == zero_H}
    im_res = set(res_vals.values())
    lands = im_res <= fixed_set
    # inflation H^1(Q, M^H) -> H^1(G, M)
    inf_imgs = [h1G.coordinates(c[proj]) for c in h1Q.representatives]
    inf = _linear_images(h1G, inf_imgs, h1Q)
    im_inf = {inf(x) for x in h1Q.elements()}
    inf_inj = len(im_inf) == h1Q.group_order

    # transgression on fixed classes
    zero_Q2 = h2Q.reduce([0] * len(h2Q.elementary_divisors))
    tg_vals = {}
    for x in fixed:
        if MH_trivial:
            tg_vals[x] = zero_Q2
        else:
            tg_vals[x] = _transgression(M, G, Q, proj, lifts, emb, pos, hgens, h1H.cochain(x), h2Q)
    ker_tg = {x for x, v in tg_vals.items() if v == zero_Q2}
    im_tg = set(tg_vals.values())
    # kernel of inflation H^2(Q, M^H) -> H^2(G, M)
    ker_inf2 = set()
    for z in h2Q.elements():
        z = tuple(z)
        if z == zero_Q2:
            ker_inf2.add(z)
            continue
        zc = h2Q.cochain(z).reshape(Q.order, Q.order, -1)
        infl = zc[proj][:, proj].reshape(G.order * G.order, -1) % mod
        if solve_coboundary(M, 2, infl) is not None:
            ker_inf2.add(z)
    return InfResReport(G.order, len(emb), Q.order, h1Q, h1G, h1H, h2Q, MH_trivial,
                        lift_ok, act_ok, fixed, inf_inj, ker_res == im_inf,
                        im_res == ker_tg, im_tg == ker_inf2, lands)


def _fixed_is_zero(M: GModule, hgens) -> bool:
    for pr in _primaries(M.moduli):
        C = [pr.block(M.action[h][None])[0] - np.diag(pr.scale) for h in hgens]
        if not C:
            return False
        Y, _ = kernel_local(np.concatenate(C, axis=0) % pr.m, pr.ell, pr.K)
        if (Y * pr.scale % pr.m).any():
            return False
    return True


def _transgression(M, G, Q, proj, lifts, emb, pos, hgens, c, h2Q) -> tuple:
    """Class of d c~ in H^2(Q, M^H), where c~ extends the H-cocycle c to G."""
    r = M.rank
    mod = np.array(M.moduli, dtype=np.int64)
    I = np.eye(r, dtype=np.int64)
    v = np.zeros((Q.order, r), dtype=np.int64)
    for q in range(Q.order):
        g = lifts[q]
        if g == G.identity:
            continue
        gi = G.inv(g)
        # (h - 1) v_q = g.c(g^{-1} h g) - c(h) for h in generators of H
        blocks = np.zeros((len(hgens), r, 1, r), dtype=np.int64)
        rhs = np.zeros((len(hgens), r), dtype=np.int64)
        for t, h in enumerate(hgens):
            blocks[t, :, 0, :] = M.action[h] - I
            rhs[t] = M.action[g] @ c[pos[G.mul(G.mul(gi, h), g)]] - c[pos[h]]
        sol = _solve_over_M(M.moduli, blocks, rhs % mod)
        if sol is None:
            raise ArithmeticError("class is not invariant under the quotient")
        v[q] = sol[0]

    def ctilde(x):
        q = int(proj[x])
        g = lifts[q]
        h = G.mul(G.inv(g), x)
        return (v[q] + M.action[g] @ c[pos[h]]) % mod

    z = np.zeros((Q.order, Q.order, r), dtype=np.int64)
    for a in range(Q.order):
        for b in range(Q.order):
            g1, g2 = lifts[a], lifts[b]
            z[a, b] = (M.action[g1] @ ctilde(g2) - ctilde(G.mul(g1, g2)) + ctilde(g1)) % mod
    if G.order ** 2 <= 10_000:
        # d c~ must be inflated from z
        for g1 in range(G.order):
            for g2 in range(G.order):
                dc = (M.action[g1] @ ctilde(g2) - ctilde(G.mul(g1, g2)) + ctilde(g1)) % mod
                if (dc != z[proj[g1], proj[g2]]).any():
                    raise ArithmeticError("d c~ does not factor through the quotient")
    return h2Q.coordinates(z.reshape(Q.order * Q.order, r))


# -- Kummer cocycles -----------------------------------------------------------------

@dataclass
class KummerReport:
    k: int
    cocycle_identity: bool  # (u,c) -> c x satisfies the identity for every x
    zero_maps_to_zero: bool
    injective_enumeration: bool  # only x = 0 gives a coboundary, by trying every m
    injective_h1: bool  # same, read off H^1 coordinates

    @property
    def ok(self) -> bool:
        return (self.cocycle_identity and self.zero_maps_to_zero
                and self.injective_enumeration and self.injective_h1)


def kummer_cocycle_check(k: int, U=None) -> KummerReport:
    G = kummer_group(k, U)
    M = GModule.character(G, k, lambda g: g[0])
    H = h_compute(1, M)

    def cocycle(x):
        return np.array([[G.labels[g][1] * x % k] for g in range(G.order)], dtype=np.int64)

    ident = all(is_cocycle(M, 1, cocycle(x)) for x in range(k))
    zero = not cocycle(0).any()
    cob_enum = set()
    for x in range(k):
        c = cocycle(x)
        # coboundaries are g -> (u - 1) m
        if any(not (coboundary(M, 0, [m]) - c).any() for m in range(k)):
            cob_enum.add(x)
    cob_h1 = {x for x in range(k) if H.is_coboundary(cocycle(x))}
    return KummerReport(k, ident, zero, cob_enum == {0}, cob_h1 == {0})


# -- random instances ------------------------------------------------------------------

def _perm(cycles, degree):
    p = list(range(degree))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            p[a] = b
    return tuple(p)


SMALL_GROUPS = {
    "C2": ([[(0, 1)]], 2), "C3": ([[(0, 1, 2)]], 3), "C4": ([[(0, 1, 2, 3)]], 4),
    "C6": ([[(0, 1, 2), (3, 4)]], 5), "V4": ([[(0, 1), (2, 3)], [(0, 2), (1, 3)]], 4),
    "S3": ([[(0, 1, 2)], [(0, 1)]], 3), "D4": ([[(0, 1, 2, 3)], [(0, 2)]], 4),
    "A4": ([[(0, 1, 2)], [(0, 1), (2, 3)]], 4), "S4": ([[(0, 1, 2, 3)], [(0, 1)]], 4),
    "C2xS3": ([[(0, 1, 2)], [(0, 1)], [(3, 4)]], 5), "D5": ([[(0, 1, 2, 3, 4)], [(1, 4), (2, 3)]], 5),
    "C2xC4": ([[(0, 1, 2, 3)], [(4, 5)]], 6),
}


def small_group(name: str) -> tuple[GroupTable, int]:
    gens, degree = SMALL_GROUPS[name]
    return permutation_group([_perm(c, degree) for c in gens], degree), degree


def _sign(perm) -> int:
    seen, s = set(), 1
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        s *= (-1) ** (length - 1)
    return s


def permutation_module(G: GroupTable, degree: int, m: int, twist: bool = False) -> GModule:
    mats = []
    for g in range(G.order):
        perm = G.labels[g]
        A = np.zeros((degree, degree), dtype=np.int64)
        for i in range(degree):
            A[perm[i], i] = 1
        if twist:
            A = A * _sign(perm)
        mats.append(A)
    return GModule(G, (m,) * degree, np.array(mats))


def normal_subgroups(G: GroupTable) -> list:
    """Normal closures of single elements and their pairwise products."""
    found = set()
    closures = []
    for x in range(G.order):
        conj = {G.conj(g, x) for g in range(G.order)}
        N = frozenset(G.closure(sorted(conj)))
        if N not in found:
            found.add(N)
            closures.append(N)
    for A in list(closures):
        for B in list(closures):
            N = frozenset(G.closure(sorted(A | B)))
            if N not in found:
                found.add(N)
                closures.append(N)
    return sorted((sorted(N) for N in closures), key=lambda s: (len(s), s))


def random_instance(rng: random.Random, max_module: int = 81):
    """A random (G, H normal, M) with |G| <= 24 from a fixed catalogue."""
    while True:
        name = rng.choice(sorted(SMALL_GROUPS))
        G, degree = small_group(name)
        normals = [N for N in normal_subgroups(G) if 1 < len(N) < G.order] or [list(range(G.order))]
        H = rng.choice(normals)
        kind = rng.choice(["trivial", "sign", "perm", "perm_twist"])
        m = rng.choice([2, 3, 4, 6])
        if kind == "trivial":
            M = GModule.trivial(G, (m,))
        elif kind == "sign":
            M = GModule.character(G, m, _sign)
        else:
            if m ** degree > max_module:
                continue
            M = permutation_module(G, degree, m, twist=(kind == "perm_twist"))
        return name, G, H, M


def random_cyclic_instance(rng: random.Random, max_d: int = 12, max_module: int = 64):
    """Random cyclic group of order d <= max_d acting on |M| <= max_module."""
    while True:
        r = rng.choice([1, 1, 2, 2, 3])
        moduli = []
        for _ in range(r):
            moduli.append(rng.choice([2, 3, 4, 5, 6, 7, 8, 9]))
        if prod(moduli) > max_module:
            continue
        mod = np.array(moduli, dtype=np.int64)
        A = np.array([[rng.randrange(moduli[i]) for j in range(r)] for i in range(r)], dtype=np.int64)
        # force well-definedness: scale A_ij so that m_i | A_ij m_j
        for i in range(r):
            for j in range(r):
                step = moduli[i] // gcd(moduli[i], moduli[j])
                A[i, j] = A[i, j] * step % moduli[i]
        order = _matrix_order(A, mod, max_d)
        if order is None:
            continue
        mult = [d for d in range(order, max_d + 1, order)]
        d = rng.choice(mult)
        G = cyclic_group(d)
        mats = [np.eye(r, dtype=np.int64)]
        for _ in range(d - 1):
            mats.append(A @ mats[-1] % mod.reshape(-1, 1))
        return GModule(G, tuple(moduli), np.array(mats))


def _matrix_order(A, mod, limit):
    r = A.shape[0]
    I = np.eye(r, dtype=np.int64) % mod.reshape(-1, 1)
    P = A % mod.reshape(-1, 1)
    for e in range(1, limit + 1):
        if (P == I).all():
            return e
        P = A @ P % mod.reshape(-1, 1)
    return None
