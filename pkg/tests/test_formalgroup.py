from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from lttower.formalgroup import (AxiomError, additive_law, additive_module, compose, fgl_verify,
                                 functional_equation_module, height, hom_verify, mult_by,
                                 multiplicative_module, neg_series, reduce_mod_p)
from lttower.padic import PadicContext, PrecisionError
from lttower.rings import IntegersMod
from lttower.series import TruncSeries

CTX = PadicContext(3, 3)
R = IntegersMod(27)
T = ("T",)
T12 = ("T1", "T2")


def series(terms, D):
    return TruncSeries.from_ints(R, T, D, terms)


def binomial_series(a, D, m=27):
    # (1+T)^a - 1 by the binomial theorem
    return TruncSeries.from_ints(IntegersMod(m), T, D, {k: comb(a, k) for k in range(1, min(a, D) + 1)})


@pytest.fixture(scope="module")
def mult():
    return multiplicative_module(CTX)


def test_axioms_accept_and_reject():
    assert fgl_verify(TruncSeries.from_ints(R, T12, 6, {(1, 0): 1, (0, 1): 1})).verified
    assert fgl_verify(TruncSeries.from_ints(R, T12, 6, {(1, 0): 1, (0, 1): 1, (1, 1): 1})).verified
    with pytest.raises(AxiomError):
        fgl_verify(TruncSeries.from_ints(R, T12, 6, {(1, 0): 1, (0, 1): 1, (2, 0): 1}))


def test_negation():
    assert neg_series(additive_law(R, 5)) == series({1: -1}, 5)
    X = multiplicative_module(CTX, 3)
    assert neg_series(X.fgl) == series({1: -1, 2: 1, 3: -1}, 3)
    assert X.add(X.bracket(1), neg_series(X.fgl)).is_zero()


def test_multiplicative_brackets(mult):
    assert mult.bracket(2) == series({1: 2, 2: 1}, 12)
    low = reduce_mod_p(mult).bracket(3)
    assert low == TruncSeries.from_ints(IntegersMod(3), T, 12, {3: 1})
    assert mult.bracket(-1) == neg_series(mult.fgl)
    assert mult_by(0, mult).is_zero()
    assert mult_by(3, mult) == binomial_series(3, 12)
    assert mult_by(-1, mult) == neg_series(mult.fgl)


def test_functional_equation_height_one():
    X = functional_equation_module(CTX, 1)
    bp = X.bracket(3)
    assert bp.coeff(1) == 3 and bp.coeff(3) % 3 == 1


def test_heights():
    assert height(reduce_mod_p(multiplicative_module(CTX))).h == 1
    X = functional_equation_module(CTX, 2)
    assert height(reduce_mod_p(X, {"u1": 0})).h == 2
    assert height(reduce_mod_p(X, {"u1": 1})).h == 1
    add = reduce_mod_p(additive_module(CTX, 12))
    rep = height(add)
    assert rep.h is None and rep.at_least is not None


def test_height_two_matches_constant_parameter_model():
    # building with u = 0 directly must give the same reduction as substituting later
    direct = functional_equation_module(CTX, 2, params=[0])
    assert height(reduce_mod_p(direct)).h == 2
    assert reduce_mod_p(direct).bracket(3) == reduce_mod_p(functional_equation_module(CTX, 2), {"u1": 0}).bracket(3)


def test_homomorphisms(mult):
    add = additive_module(CTX, 12)
    assert hom_verify(series({1: 1}, 12), mult, mult)
    assert hom_verify(mult.bracket(2), mult, mult)
    assert not hom_verify(series({2: 1}, 12), add, add)


def test_padic_scalar_needs_enough_digits(mult):
    with pytest.raises(PrecisionError):
        mult_by(PadicContext(3, 3)(2), mult)
    s, k = mult_by(PadicContext(3, 8)(5), mult, with_certificate=True)
    assert s == mult.bracket(5 % 3 ** k)


@settings(max_examples=30, deadline=None)
@given(st.integers(-8, 20), st.integers(-8, 20))
def test_bracket_is_ring_homomorphism(a, b):
    X = multiplicative_module(CTX)
    assert compose(X.bracket(a), X.bracket(b)) == X.bracket(a * b)
    assert X.add(X.bracket(a), X.bracket(b)) == X.bracket(a + b)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 40))
def test_multiplicative_bracket_is_binomial(a):
    X = multiplicative_module(CTX)
    assert X.bracket(a) == binomial_series(a, 12)
