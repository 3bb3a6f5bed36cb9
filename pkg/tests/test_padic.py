import pytest
from hypothesis import given, strategies as st

from lttower.padic import (INF, ContextMismatch, NonUnitError, PadicContext, hensel_lift, padd,
                           pinv, pmul, pneg, pval, teichmuller)

C34 = PadicContext(3, 4)
C53 = PadicContext(5, 3)


def test_addition_wraps_at_modulus():
    assert padd(C34(40), C34(41)) == 0


def test_product_inverse_pair():
    # extended Euclid: 126 = 125 + 1
    assert pmul(C53(2), C53(63)) == 1


def test_inverse_of_two():
    assert pinv(C34(2)).residue == pow(2, -1, 81) == 41
    assert pinv(C34(1)) == 1


def test_inverse_of_nonunit_raises():
    with pytest.raises(NonUnitError):
        pinv(C34(3))


def test_valuations():
    assert pval(C34(18)) == 2
    assert pval(C34(1)) == 0
    assert pval(C34(0)) == INF


def test_teichmuller_values():
    assert teichmuller(2, PadicContext(3, 2)).residue == 8
    assert teichmuller(1, C34) == 1
    assert teichmuller(2, PadicContext(5, 2)).residue == 7


def test_hensel():
    assert hensel_lift([-1, 0, 1], 2, PadicContext(3, 2)).residue == 8
    assert hensel_lift([-7, 1], 7, C34) == 7
    with pytest.raises(ValueError):
        hensel_lift([0, 0, 1], 0, C34)


def test_bad_context():
    with pytest.raises(ValueError):
        PadicContext(4, 2)
    with pytest.raises(ContextMismatch):
        C34(1) + PadicContext(3, 3)(1)


residues = st.integers(0, 80)


@given(residues, residues, residues)
def test_ring_axioms(a, b, c):
    x, y, z = C34(a), C34(b), C34(c)
    assert x + y == y + x and x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + pneg(x) == 0


@given(st.integers(1, 80).filter(lambda a: a % 3))
def test_inverse_property(a):
    assert C34(a) * pinv(C34(a)) == 1


@given(residues, residues)
def test_valuation_of_product(a, b):
    v = pval(C34(a * b))
    want = pval(C34(a)) + pval(C34(b))
    assert v == min(want, INF) or (want >= 4 and v == INF)


@given(st.sampled_from([3, 5, 7]), st.integers(1, 6), st.integers(1, 100))
def test_teichmuller_is_root_of_unity(p, N, a):
    if a % p == 0:
        return
    ctx = PadicContext(p, N)
    t = teichmuller(a, ctx)
    assert t ** (p - 1) == 1 and (t.residue - a) % p == 0
