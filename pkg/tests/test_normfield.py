import random

import pytest
from hypothesis import given, settings, strategies as st

from lttower.normfield import (CompatibilityError, check_norm_compatible, constant_element,
                               decompose, frob_one, frob_power, frobenius_to_norm, nf_add, nf_mul,
                               nf_neg, nf_val, norm_to_frobenius, pi_element, random_element,
                               ring_axioms, uniformizer)
from lttower.padic import PadicContext
from lttower.towers import build_tower


@pytest.fixture(scope="module")
def tower():
    return build_tower(PadicContext(3, 3), 7)


def test_uniformizer_products(tower):
    P = uniformizer(tower)
    assert nf_mul(P, frob_one(tower)).same_as(P)
    assert nf_val(nf_mul(P, P)) == 2
    assert nf_val(P) == 1
    assert frob_power(P, 0).same_as(frob_one(tower))
    assert nf_val(frob_one(tower)) == 0


def test_zero_and_one(tower):
    one = constant_element(tower, 1, 1, 7)
    zero = constant_element(tower, 0, 1, 7)
    assert nf_add(one, zero).same_as(one)
    x = random_element(tower, random.Random(1))
    assert all(c.is_zero() for c in nf_mul(x, zero).components)
    Pi = pi_element(tower, 1, 7)
    assert nf_add(Pi, zero).same_as(Pi)


def test_one_plus_one_is_teichmuller_of_two(tower):
    one = constant_element(tower, 1, 1, 7)
    two = nf_add(one, one)
    # oracle: 2^(3^m) mod 27 settles on the Teichmuller lift of 2
    t = 2
    for _ in range(5):
        t = pow(t, 3, 27)
    assert t == 26
    assert all(int(c.z[0]) == t for c in two.components)
    assert two.same_as(nf_neg(one))


def test_norm_presentation_of_uniformizer(tower):
    back = frobenius_to_norm(uniformizer(tower))
    assert back.same_as(pi_element(tower, 1, 7))
    assert check_norm_compatible(back)
    ones = frobenius_to_norm(frob_one(tower))
    assert ones.same_as(constant_element(tower, 1, 1, ones.top))


def test_perturbed_uniformizer_rejected(tower):
    with pytest.raises(CompatibilityError):
        uniformizer(tower, choice={2: tower.pi(2) * (tower.pi(2) + tower.const(2, 1))})


def test_isomorphism_is_multiplicative(tower):
    rng = random.Random(4)
    x, y = random_element(tower, rng), random_element(tower, rng)
    fx, fy = norm_to_frobenius(x), norm_to_frobenius(y)
    assert frobenius_to_norm(nf_mul(fx, fy)).same_as(nf_mul(x, y))
    assert norm_to_frobenius(nf_add(x, y)).same_as(nf_add(fx, fy))


def test_decompose(tower):
    x = random_element(tower, random.Random(8))
    k, u = decompose(norm_to_frobenius(nf_mul(pi_element(tower, 1, 7), x)))
    assert k >= 1 and nf_val(u) == 0


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_ring_axioms_hold(seed):
    tw = build_tower(PadicContext(3, 3), 7)
    rng = random.Random(seed)
    x, y, z = (random_element(tw, rng) for _ in range(3))
    assert all(ring_axioms(x, y, z).values())


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_lifts_do_not_matter(seed):
    tw = build_tower(PadicContext(3, 3), 7)
    rng = random.Random(seed)
    f = norm_to_frobenius(random_element(tw, rng))
    a = frobenius_to_norm(f, rng=random.Random(seed + 1))
    b = frobenius_to_norm(f, rng=random.Random(seed + 2))
    assert a.same_as(b)
