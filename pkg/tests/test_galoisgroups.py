import pytest

from lttower.galoisgroups import (CLOSED_FORMS, SemidirectDescription, build_group, degree_ladder,
                                  identity, is_normal, ladder_consistent, mirabolic_decomposition,
                                  torsion_action_check, verify_semidirect)
from lttower.padic import BudgetExceeded, PadicContext
from lttower.towers import build_tower


def brute_gl_order(p):
    # count 2x2 matrices over F_p with nonzero determinant
    return sum(1 for a in range(p) for b in range(p) for c in range(p) for d in range(p)
               if (a * d - b * c) % p)


def test_enumerated_orders():
    assert build_group("gl", 2, 1, 3).order == brute_gl_order(3) == 48
    assert build_group("mirabolic", 2, 2, 3).order == 54
    assert build_group("congruence_kernel", 2, 2, 3).order == 81


@pytest.mark.parametrize("h,n,p", [(2, 1, 3), (2, 2, 3), (2, 1, 5), (3, 1, 2)])
@pytest.mark.parametrize("kind", ["gl", "parabolic", "mirabolic"])
def test_closed_forms(kind, h, n, p):
    assert build_group(kind, h, n, p).order == CLOSED_FORMS[kind](h, n, p)


def test_semidirect():
    G = build_group("mirabolic", 2, 1, 5)
    assert verify_semidirect(G, mirabolic_decomposition(G))
    d = mirabolic_decomposition(G)
    assert not verify_semidirect(G, SemidirectDescription(d.A, d.A))
    GL = build_group("gl", 2, 1, 3)
    small = [identity(2), (1, 1, 0, 1), (1, 2, 0, 1)]
    assert not verify_semidirect(GL, SemidirectDescription(small, small))


def test_kernel_is_normal():
    G = build_group("gl", 2, 2, 3)
    K = build_group("congruence_kernel", 2, 2, 3)
    assert is_normal(K.elements, G)


def test_ladder_values():
    rows = degree_ladder(2, 2, 3)
    assert rows[1].layer_degree == 27
    assert rows[1].inertia_order == 6
    assert rows[1].residue_step == 3
    assert ladder_consistent(rows)


def test_budget():
    with pytest.raises(BudgetExceeded):
        build_group("gl", 3, 2, 3, budget=1000)


def test_torsion_action():
    assert torsion_action_check(build_tower(PadicContext(3, 4), 2), 2)
