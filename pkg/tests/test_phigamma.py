import random
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from lttower.padic import NonUnitError, PadicContext, PrecisionError
from lttower.phigamma import (OEWindow, constant, diagonal_module, etale_check, from_coeffs,
                              frobenius_lift_ok, gamma, gamma_certificate, gamma_composition_ok,
                              module_semilinearity_check, oe_inv, one, phi, phi_fixed,
                              phi_gamma_commute, phi_preserves_pi_ideal, pi_eps, random_element)

CTX = PadicContext(3, 3)
WIN = OEWindow(CTX, -5, 12)
M = 27


def poly_compose(coeffs: dict, image: list, D: int) -> dict:
    """sum c_e image^e with image a polynomial in pi (no constant term), truncated at D."""
    out = [0] * (D + 1)
    pw = [1] + [0] * D
    for e in range(max(coeffs, default=0) + 1):
        c = coeffs.get(e, 0)
        for i in range(D + 1):
            out[i] = (out[i] + c * pw[i]) % M
        nxt = [0] * (D + 1)
        for i, u in enumerate(pw):
            if u:
                for j, v in enumerate(image):
                    if i + j <= D:
                        nxt[i + j] = (nxt[i + j] + u * v) % M
        pw = nxt
    return {i: c for i, c in enumerate(out) if c}


def binomial_image(a: int) -> list:
    # (1 + pi)^a - 1 as a coefficient list
    return [0] + [comb(a, k) % M for k in range(1, a + 1)]


def test_inverse():
    pi = pi_eps(WIN)
    assert (pi * oe_inv(pi)).same_as(one(WIN))
    with pytest.raises(NonUnitError):
        oe_inv(constant(WIN, 3))
    w = OEWindow(CTX, 0, 4)
    assert oe_inv(one(w) + pi_eps(w)).same_as(from_coeffs(w, {0: 1, 1: -1, 2: 1, 3: -1, 4: 1}))


def test_frobenius_examples():
    assert phi(pi_eps(WIN)).same_as(from_coeffs(WIN, {1: 3, 2: 3, 3: 1}))
    assert phi(constant(WIN, 5)).same_as(constant(WIN, 5))
    assert phi_preserves_pi_ideal(WIN)


def test_gamma_examples():
    pi = pi_eps(WIN)
    assert gamma(2, pi).same_as(from_coeffs(WIN, {1: 2, 2: 1}))
    x = random_element(WIN, random.Random(2))
    assert gamma(1, x).same_as(x)
    w = OEWindow(CTX, 0, 9)
    assert gamma(2, gamma(2, pi_eps(w))).same_as(gamma(4, pi_eps(w)))


def test_commutation_examples():
    for a in (1, 2, 4):
        assert phi_gamma_commute(a, WIN, rng=random.Random(a), n_random=5).ok


def test_padic_unit_needs_enough_digits():
    cert = gamma_certificate(2, WIN)
    assert cert.k == 5
    with pytest.raises(PrecisionError):
        gamma_certificate(PadicContext(3, 3)(2), WIN)
    assert gamma_certificate(PadicContext(3, 6)(2), WIN).a == 2


def test_fixed_points():
    assert phi(constant(WIN, 7)).same_as(constant(WIN, 7))
    assert not phi(pi_eps(WIN)).same_as(pi_eps(WIN))
    r = phi_fixed(OEWindow(PadicContext(3, 2), -3, 9))
    assert r.ok and r.count == 9
    assert sorted(s.get(0, 0) for s in r.solutions) == list(range(9))


def test_etale_examples():
    assert etale_check(diagonal_module([pi_eps(WIN)])) is True
    assert etale_check(diagonal_module([constant(WIN, 3)])) is False
    assert etale_check(diagonal_module([one(WIN)])) is True


def test_semilinearity():
    rng = random.Random(5)
    data = diagonal_module([one(WIN)])
    v = [random_element(WIN, rng, lowest=0)]
    assert module_semilinearity_check(data, [v], [one(WIN), pi_eps(WIN)])
    data2 = diagonal_module([pi_eps(WIN), one(WIN) + constant(WIN, 3)])
    vs = [[random_element(WIN, rng, lowest=0) for _ in range(2)] for _ in range(2)]
    assert module_semilinearity_check(data2, vs, [random_element(WIN, rng, lowest=0)])


polys = st.dictionaries(st.integers(0, 4), st.integers(0, 26), max_size=4)


@settings(max_examples=30, deadline=None)
@given(polys)
def test_phi_matches_substitution(c):
    x = from_coeffs(WIN, c)
    want = poly_compose(c, binomial_image(3), WIN.D)
    got = phi(x)
    top = min(got.known_to, WIN.D)
    assert all(got.coeff(e) == want.get(e, 0) for e in range(WIN.L, top + 1))


@settings(max_examples=30, deadline=None)
@given(polys, st.sampled_from([2, 4, 5, 7]))
def test_gamma_matches_substitution(c, a):
    x = from_coeffs(WIN, c)
    want = poly_compose(c, binomial_image(a), WIN.D)
    got = gamma(a, x)
    top = min(got.known_to, WIN.D)
    assert all(got.coeff(e) == want.get(e, 0) for e in range(0, top + 1))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_phi_is_ring_map_and_lifts_frobenius(seed):
    rng = random.Random(seed)
    x, y = random_element(WIN, rng, lowest=0), random_element(WIN, rng, lowest=0)
    assert phi(x * y).same_as(phi(x) * phi(y))
    assert phi(x + y).same_as(phi(x) + phi(y))
    assert frobenius_lift_ok(random_element(WIN, rng))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from([2, 4, 5, 8]), st.sampled_from([2, 7]))
def test_gamma_composes(seed, a, b):
    x = random_element(OEWindow(CTX, 0, 9), random.Random(seed))
    assert gamma_composition_ok(a, b, x)
