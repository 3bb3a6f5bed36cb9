import itertools

import numpy as np
from hypothesis import given, settings, strategies as st

from lttower.linalg import kernel_local, local_smith, nullspace_mod_p, rank_mod_p, solve_local


def brute_kernel_size(A, m):
    n = A.shape[1]
    return sum(not ((A @ np.array(x)) % m).any() for x in itertools.product(range(m), repeat=n))


def subgroup_size(gens, orders, p):
    return p ** sum(orders)


def test_rank_and_nullspace():
    A = np.array([[1, 2, 0], [2, 4, 0]])
    assert rank_mod_p(A, 5) == 1
    N = nullspace_mod_p(A, 5)
    assert N.shape == (2, 3) and not ((A @ N.T) % 5).any()


matrices = st.integers(1, 3).flatmap(
    lambda r: st.integers(1, 3).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, 26), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=40, deadline=None)
@given(matrices, st.sampled_from([(2, 2), (3, 2), (2, 3), (3, 1)]))
def test_smith_form(rows, pk):
    p, k = pk
    m = p ** k
    A = np.array(rows, dtype=np.int64) % m
    S = local_smith(A, p, k, track_vinv=True)
    D = S.U @ A @ S.V % m
    expect = np.zeros_like(D)
    for i, d in enumerate(S.exps):
        expect[i, i] = p ** d
    assert (D == expect).all()
    assert (S.V @ S.Vinv % m == np.eye(A.shape[1], dtype=np.int64)).all()
    G, orders = kernel_local(A, p, k)
    assert not ((A @ G.T) % m).any()
    assert subgroup_size(G, orders, p) == brute_kernel_size(A, m)


@settings(max_examples=40, deadline=None)
@given(matrices, st.lists(st.integers(0, 26), min_size=3, max_size=3))
def test_solve_local_agrees_with_search(rows, b):
    p, k = 3, 2
    m = 9
    A = np.array(rows, dtype=np.int64) % m
    rhs = np.array(b[: A.shape[0]], dtype=np.int64) % m
    x = solve_local(A, rhs, p, k)
    exists = any(not ((A @ np.array(v) - rhs) % m).any()
                 for v in itertools.product(range(m), repeat=A.shape[1]))
    assert (x is not None) == exists
