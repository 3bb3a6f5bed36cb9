import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lttower.padic import PadicContext
from lttower.towers import (ExtElement, build_tower, differential_annihilator, embed,
                            frobenius_check, frobenius_report, galois_apply, norm_down, one,
                            sdr_certify, val)


@pytest.fixture(scope="module")
def tower():
    return build_tower(PadicContext(3, 4), 4)


def test_degrees_and_modulus(tower):
    assert tower[1].degree == 2 and tower[2].degree == 6
    assert tower[1].modulus_coeffs() == [3, 3, 1]
    assert all(tower[n].is_eisenstein() for n in range(1, 5))


def test_embedded_uniformizer_satisfies_lower_polynomial(tower):
    # pi_{n-1} = (1 + pi_n)^p - 1 must be a root of E_{n-1}
    for n in (2, 3):
        x = embed(tower.pi(n - 1), tower)
        c = tower[n - 1].modulus_coeffs()
        acc = one(tower[n]) * 0
        for a in reversed(c):
            acc = acc * x + one(tower[n]) * a
        assert acc.is_zero()


def test_galois_action(tower):
    pi = tower.pi(2)
    assert galois_apply(1, pi) == pi
    rng = random.Random(3)
    for _ in range(5):
        a, b = rng.choice([1, 2, 4, 5, 7, 8]), rng.choice([1, 2, 4, 5, 7, 8])
        assert galois_apply(a, galois_apply(b, pi)) == galois_apply(a * b % 9, pi)
    y = embed(tower.pi(1) + tower.const(1, 2), tower)
    assert galois_apply(4, y) == y  # 4 = 1 mod 3


def test_norms(tower):
    assert norm_down(tower.pi(2), tower) == tower.pi(1)
    y = tower.pi(1) + tower.const(1, 5)
    assert norm_down(embed(y, tower), tower) == y ** 3
    assert norm_down(one(tower[2]), tower) == one(tower[1])


def test_norm_is_product_of_conjugates(tower):
    x = tower.pi(2) * tower.pi(2) + tower.const(2, 2)
    prod = one(tower[2])
    for a in (1, 4, 7):
        prod = prod * galois_apply(a, x)
    assert prod == embed(norm_down(x, tower), tower)


def test_valuations(tower):
    assert val(tower.pi(3)) == 1
    assert val(tower.const(2, 3)) == 6
    assert val(tower.pi(2) ** 2 * tower.const(2, 3)) == 8


def test_differentials(tower):
    for n in (2, 3):
        rep = differential_annihilator(tower, n)
        assert rep.ann_val == 1 and rep.ok


def test_level_one_annihilator(tower):
    # v_p of the different of Q_p(zeta_3) is 1/2
    assert differential_annihilator(tower, 1).ann_val == Fraction(1, 2)


def test_certificates(tower):
    assert sdr_certify(tower).valid
    assert not sdr_certify(tower, d=1).valid
    bad = [differential_annihilator(tower, n) for n in range(2, 5)]
    bad[0].ann_val = Fraction(0)
    assert not sdr_certify(tower, reports=bad).valid


def test_frobenius(tower):
    rep = frobenius_report(tower, 2)
    assert rep.uniformizer_congruence and rep.onto and rep.rank == rep.target_dim
    assert frobenius_check(tower, 1)
    for c in range(3):
        x = tower.const(2, c)
        assert ((x ** 3 - x).residue_mod_xi(tower[2].degree) == 0).all()


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(0, 80), min_size=6, max_size=6), st.lists(st.integers(0, 80), min_size=6, max_size=6))
def test_norm_is_multiplicative(a, b):
    tw = build_tower(PadicContext(3, 4), 2)
    x = ExtElement(tw[2], np.array(a, dtype=np.int64))
    y = ExtElement(tw[2], np.array(b, dtype=np.int64))
    assert norm_down(x * y, tw) == norm_down(x, tw) * norm_down(y, tw)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(0, 80), min_size=6, max_size=6), st.sampled_from([2, 4, 5, 7, 8]))
def test_galois_is_ring_map(a, s):
    tw = build_tower(PadicContext(3, 4), 2)
    x = ExtElement(tw[2], np.array(a, dtype=np.int64))
    y = tw.pi(2) + tw.const(2, 1)
    assert galois_apply(s, x * y) == galois_apply(s, x) * galois_apply(s, y)
    assert galois_apply(s, x + y) == galois_apply(s, x) + galois_apply(s, y)
