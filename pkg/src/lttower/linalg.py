"""Linear algebra over Z/p and over the local rings Z/p^k.

Matrices are numpy int64 arrays with entries reduced into [0, modulus).
Every routine keeps products below 2^63 by reducing after each row
operation, so moduli up to about 3*10^9 are safe.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .padic import valuation_int


def _as_matrix(A, m: int) -> np.ndarray:
    A = np.array(A, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    return A % m


def rref_mod_p(A, p: int):
    """Reduced row echelon form over F_p; returns (R, pivot columns)."""
    R = _as_matrix(A, p).copy()
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = R[r] * pow(int(R[r, c]), -1, p) % p
        others = np.nonzero(R[:, c])[0]
        others = others[others != r]
        if others.size:
            R[others] = (R[others] - np.outer(R[others, c], R[r])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank_mod_p(A, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref_mod_p(A, p)[1])


def solve_mod_p(A, b, p: int):
    """Some x with A x = b over F_p, or None if the system is inconsistent."""
    A = _as_matrix(A, p)
    b = np.array(b, dtype=np.int64).reshape(-1) % p
    aug = np.concatenate([A, b.reshape(-1, 1)], axis=1)
    R, piv = rref_mod_p(aug, p)
    n = A.shape[1]
    if piv and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, c in enumerate(piv):
        x[c] = R[row, n]
    return x


def nullspace_mod_p(A, p: int) -> np.ndarray:
    """Basis of {x : A x = 0} over F_p, as rows."""
    A = _as_matrix(A, p)
    n = A.shape[1]
    R, piv = rref_mod_p(A, p)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for row, c in enumerate(piv):
            v[c] = (-R[row, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), n)


# -- local Smith form over Z/p^k ---------------------------------------------

@dataclass
class LocalSmith:
    """U A V = diag(p^{d_1}, ..., p^{d_r}, 0, ...) over Z/p^k.

    ``exps`` lists the pivot valuations d_i < k; U and V are invertible.
    """
    p: int
    k: int
    U: np.ndarray
    V: np.ndarray
    exps: list
    Vinv: np.ndarray | None = None

    @property
    def rank(self) -> int:
        return len(self.exps)


def _vp_array(A: np.ndarray, p: int, k: int) -> np.ndarray:
    v = np.full(A.shape, k, dtype=np.int64)
    rem = A.copy()
    alive = rem != 0
    v[alive] = 0
    for _ in range(k):
        step = alive & (rem % p == 0)
        if not step.any():
            break
        v[step] += 1
        rem[step] //= p
        alive = step
    return v


def local_smith(A, p: int, k: int, track_u: bool = True, track_vinv: bool = False) -> LocalSmith:
    """Smith form over the local ring Z/p^k by minimum-valuation pivoting."""
    p, k = int(p), int(k)
    m = p ** k
    A = _as_matrix(A, m).copy()
    rows, cols = A.shape
    U = np.eye(rows, dtype=np.int64) if track_u else None
    V = np.eye(cols, dtype=np.int64)
    Vi = np.eye(cols, dtype=np.int64) if track_vinv else None
    exps = []
    t = 0
    while t < min(rows, cols):
        sub = A[t:, t:]
        if not sub.any():
            break
        vals = _vp_array(sub, p, k)
        i, j = np.unravel_index(np.argmin(vals), vals.shape)
        d = int(vals[i, j])
        i += t
        j += t
        if i != t:
            A[[t, i]] = A[[i, t]]
            if track_u:
                U[[t, i]] = U[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            V[:, [t, j]] = V[:, [j, t]]
            if track_vinv:
                Vi[[t, j]] = Vi[[j, t]]
        unit = A[t, t] // p ** d
        uinv = pow(int(unit), -1, m)
        A[t] = A[t] * uinv % m
        if track_u:
            U[t] = U[t] * uinv % m
        # every entry below/right of the pivot is divisible by p^d
        col = A[t + 1:, t] // p ** d
        nz = np.nonzero(col)[0]
        if nz.size:
            idx = t + 1 + nz
            A[idx] = (A[idx] - np.outer(col[nz], A[t])) % m
            if track_u:
                U[idx] = (U[idx] - np.outer(col[nz], U[t])) % m
        row = A[t, t + 1:] // p ** d
        nz = np.nonzero(row)[0]
        if nz.size:
            idx = t + 1 + nz
            A[:, idx] = (A[:, idx] - np.outer(A[:, t], row[nz])) % m
            V[:, idx] = (V[:, idx] - np.outer(V[:, t], row[nz])) % m
            if track_vinv:
                # V <- V E with E = I - e_t r^T, so V^{-1} <- (I + e_t r^T) V^{-1}
                Vi[t] = (Vi[t] + row[nz] @ Vi[idx]) % m
        exps.append(d)
        t += 1
    return LocalSmith(p, k, U if track_u else np.zeros((0, 0), dtype=np.int64), V, exps, Vi)


def kernel_local(A, p: int, k: int) -> tuple[np.ndarray, list]:
    """Generators of {x in (Z/p^k)^n : A x = 0}.

    Returns (rows of generators, orders exponents) where generator i has
    order p^{e_i}; the kernel is the direct sum of the cyclic groups they
    generate.
    """
    m = p ** k
    A = _as_matrix(A, m)
    n = A.shape[1]
    S = local_smith(A, p, k, track_u=False)
    gens, orders = [], []
    for i in range(n):
        col = S.V[:, i]
        if i < S.rank:
            d = S.exps[i]
            if d == 0:
                continue
            # p^{k-d} * (V e_i) is killed; it has order p^d
            gens.append(col * p ** (k - d) % m)
            orders.append(d)
        else:
            gens.append(col % m)
            orders.append(k)
    G = np.array(gens, dtype=np.int64).reshape(len(gens), n)
    return G, orders


def vp_int(x: int, p: int, k: int) -> int:
    v = valuation_int(int(x) % p ** k, p)
    return k if v == float("inf") else int(v)


def solve_local(A, b, p: int, k: int):
    """Some x with A x = b over Z/p^k, or None if there is none."""
    m = p ** k
    A = _as_matrix(A, m)
    b = np.array(b, dtype=np.int64).reshape(-1) % m
    S = local_smith(A, p, k)
    c = S.U @ b % m
    y = np.zeros(A.shape[1], dtype=np.int64)
    for i, d in enumerate(S.exps):
        if c[i] % p ** d:
            return None
        y[i] = (c[i] // p ** d) % m
    if c[S.rank:].any():
        return None
    x = S.V @ y % m
    assert not ((A @ x - b) % m).any()
    return x
