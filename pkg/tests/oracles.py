"""Brute-force oracles, independent of the library's linear algebra."""
from __future__ import annotations

import itertools

import numpy as np


def _vectors(moduli):
    return [np.array(t, dtype=np.int64) for t in itertools.product(*(range(m) for m in moduli))]


def h1_order(M) -> int:
    """|Z^1| / |B^1| by enumerating crossed homomorphisms.

    A cocycle is fixed by its values on generators; every choice is
    extended along c(g s) = c(g) + g c(s) and then tested on all pairs.
    """
    G = M.G
    n = G.order
    mod = np.array(M.moduli, dtype=np.int64)
    gens = G.generators()
    elems = np.array(_vectors(M.moduli), dtype=np.int64)
    # acted[g, v] = g . elems[v]
    acted = np.einsum("gij,vj->gvi", M.action, elems) % mod
    cocycles = set()
    for vals in itertools.product(range(len(elems)), repeat=len(gens)):
        c = np.full((n, len(mod)), -1, dtype=np.int64)
        c[G.identity] = 0
        frontier = [G.identity]
        while frontier:
            nxt = []
            for g in frontier:
                for s, v in zip(gens, vals):
                    gs = int(G.table[g, s])
                    if c[gs, 0] < 0:
                        c[gs] = (c[g] + acted[g, v]) % mod
                        nxt.append(gs)
            frontier = nxt
        # cheap filter on (g, generator) pairs, then the full identity
        if any(((c[G.table[:, s]] - c - acted[:, v]) % mod).any() for s, v in zip(gens, vals)):
            continue
        # c(gh) = c(g) + g c(h) for every pair
        lhs = c[G.table]
        rhs = c[:, None, :] + np.einsum("gij,hj->ghi", M.action, c)
        if not ((lhs - rhs) % mod).any():
            cocycles.add(c.tobytes())
    boundaries = {((acted[:, v] - elems[v]) % mod).tobytes() for v in range(len(elems))}
    assert len(cocycles) % len(boundaries) == 0
    return len(cocycles) // len(boundaries)


def h0_order(M) -> int:
    mod = np.array(M.moduli, dtype=np.int64)
    return sum(all(((M.act(g, m) - m) % mod == 0).all() for g in range(M.G.order))
               for m in _vectors(M.moduli))


def h2_order_cyclic_module(M) -> int:
    """|H^2| for M = Z/m (rank one) by enumerating all 2-cochains.

    Only for tiny cases: m^{|G|^2} cochains.
    """
    G = M.G
    (m,) = M.moduli
    n = G.order
    a = np.array([int(M.action[g, 0, 0]) for g in range(n)], dtype=np.int64)
    T = G.table
    cochains = np.array(list(itertools.product(range(m), repeat=n * n)), dtype=np.int64).reshape(-1, n, n)
    ok = np.ones(len(cochains), dtype=bool)
    for g in range(n):
        for h in range(n):
            for k in range(n):
                lhs = a[g] * cochains[:, h, k] - cochains[:, T[g, h], k] + cochains[:, g, T[h, k]] \
                    - cochains[:, g, h]
                ok &= lhs % m == 0
    z2 = int(ok.sum())
    b2 = set()
    for f in itertools.product(range(m), repeat=n):
        d = tuple((a[g] * f[h] - f[T[g, h]] + f[g]) % m for g in range(n) for h in range(n))
        b2.add(d)
    assert z2 % len(b2) == 0
    return z2 // len(b2)
