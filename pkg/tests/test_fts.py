import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jordan_attractors.fts import (BinaryCubicForm, ChargeClass, ChargeVector, act_on_charge,
                                   calibration_constant, classify, cubic_dictionary,
                                   cubic_from_charge, grad_I4, group_action_sl2, quartic_I4,
                                   random_charge, random_sl2z, symplectic)
from jordan_attractors.jordan import build_generic, build_herm3, build_rational, build_stu

MODELS = [build_rational(), build_stu(), build_generic(), build_herm3("imaginary_quadratic")]
ints = st.integers(-12, 12)
forms = st.tuples(ints, ints, ints, ints).filter(any).map(lambda c: BinaryCubicForm(*c))


def _deriv(f, h=Fraction(1)):
    # 5-point stencil, exact on quartics
    return (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h)


@pytest.mark.parametrize("J", MODELS, ids=lambda J: J.family)
def test_grad_I4_directional(J):
    rng = random.Random(1)
    for _ in range(10):
        g, d = random_charge(J, rng), random_charge(J, rng)
        exact = _deriv(lambda e: quartic_I4(g + d.scale(e)))
        G = grad_I4(g)
        pred = (d.p0 * G["p0"] + d.q0 * G["q0"] + J.pair(d.p, G["p"]) + J.pair(d.q, G["q"]))
        assert exact == pred


@pytest.mark.parametrize("J", MODELS, ids=lambda J: J.family)
def test_symplectic_antisymmetric(J):
    rng = random.Random(2)
    for _ in range(20):
        a, b = random_charge(J, rng), random_charge(J, rng)
        assert symplectic(a, b) == -symplectic(b, a)
        assert symplectic(a, a) == 0


@pytest.mark.parametrize("J", MODELS, ids=lambda J: J.family)
def test_I4_homogeneous(J):
    g = random_charge(J, random.Random(3))
    assert quartic_I4(g.scale(Fraction(3, 2))) == Fraction(81, 16) * quartic_I4(g)


@given(forms)
def test_dictionary_roundtrip(F):
    assert cubic_from_charge(cubic_dictionary(F)) == F


@given(forms)
def test_I4_is_disc(F):
    assert quartic_I4(cubic_dictionary(F)) == calibration_constant() * F.disc


@settings(max_examples=60)
@given(forms, st.integers(0, 10 ** 6))
def test_sl2_preserves_disc(F, seed):
    g = random_sl2z(random.Random(seed), 3)
    G = group_action_sl2(g, F)
    assert G.disc == F.disc
    assert quartic_I4(act_on_charge(g, cubic_dictionary(F))) == quartic_I4(cubic_dictionary(F))


def test_sl2_is_action():
    rng = random.Random(7)
    F = BinaryCubicForm(2, -1, 3, 5)
    g, h = random_sl2z(rng, 2), random_sl2z(rng, 2)
    gh = tuple(tuple(sum(g[i][k] * h[k][j] for k in range(2)) for j in range(2)) for i in range(2))
    assert group_action_sl2(gh, F) == group_action_sl2(g, group_action_sl2(h, F))


def test_bad_group_element():
    with pytest.raises(ValueError):
        group_action_sl2(((2, 0), (0, 1)), BinaryCubicForm(1, 0, 0, 1))


def test_classes():
    J = build_rational()
    assert classify(ChargeVector.make(J, p0=1, q0=1)) == ChargeClass.NONBPS
    assert classify(ChargeVector.make(J, p0=1)) == ChargeClass.DEGENERATE
    assert classify(cubic_dictionary(BinaryCubicForm(1, 0, -1, 0))) == ChargeClass.BPS


def test_charge_json():
    J = build_stu()
    g = random_charge(J, random.Random(0))
    assert ChargeVector.from_json(J, g.to_json()) == g
