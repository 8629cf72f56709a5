import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jordan_attractors import nonbps_locus as nl
from jordan_attractors.cubic_model import mobius
from jordan_attractors.fts import (BinaryCubicForm, ChargeVector, cubic_dictionary,
                                   group_action_sl2, random_charge, random_sl2z)
from jordan_attractors.jordan import build_herm3, build_rational, build_stu
from jordan_attractors.special_geometry import v_eff


@pytest.mark.parametrize("J", [build_rational(), build_stu(), build_herm3("rational")],
                         ids=lambda J: J.family)
def test_explicit_equals_v_eff(J):
    rng, nrng = random.Random(0), np.random.default_rng(0)
    for _ in range(50 if J.dimension == 1 else 10):
        g = random_charge(J, rng)
        lam = nl.random_cone_point(J, nrng) * nrng.uniform(0.3, 3)
        x = nrng.normal(size=J.dimension)
        assert nl.potential_4d_explicit(g, x, lam) == pytest.approx(v_eff(g, x + 1j * lam), rel=1e-11)


def test_gradients_agree():
    J = build_stu()
    g = random_charge(J, random.Random(2))
    nrng = np.random.default_rng(2)
    lam, x = nl.random_cone_point(J, nrng), nrng.normal(size=3)
    ex = nl.explicit_gradient(g, x, lam)
    from jordan_attractors.special_geometry import v_eff_gradient
    assert np.allclose(ex, v_eff_gradient(g, x + 1j * lam), rtol=1e-6, atol=1e-6 * np.abs(ex).max())


def test_kappa_only():
    J = build_herm3("rational")
    g = ChargeVector.make(J, p0=2, q0=3)
    assert nl.kappa_only_check(g, kappa=4.0) < 1e-12
    # switching on p breaks it
    g2 = ChargeVector.make(J, p0=2, q0=3, p=[1, 0, 0, 0, 0, 0])
    assert nl.kappa_only_check(g2, kappa=4.0) > 1e-3


def _x_grad_at_zero(g, lam):
    n = g.J.dimension
    return nl.explicit_gradient(g, np.zeros(n), lam)[:n]


def test_linear_terms():
    J = build_stu()
    nrng = np.random.default_rng(5)
    good = ChargeVector.make(J, p0=1, q0=2)
    assert all(nl.linear_term_conditions(good))
    bad = ChargeVector.make(J, p0=1, q0=2, p=[1, 0, 0])
    assert not nl.linear_term_conditions(bad)[0]
    for _ in range(5):
        lam = nl.random_cone_point(J, nrng)
        assert np.max(np.abs(_x_grad_at_zero(good, lam))) < 1e-12
        assert np.max(np.abs(_x_grad_at_zero(bad, lam))) > 1e-3


def test_locus_small():
    rep = nl.critical_locus_check(ChargeVector.make(build_stu(), p0=1, q0=2), samples=5, seed=1)
    assert rep.ok
    assert {(p.n_pos, p.n_zero, p.n_neg) for p in rep.points} == {(4, 2, 0)}


def test_locus_needs_same_sign():
    with pytest.raises(nl.ConeError):
        nl.sample_locus(build_stu(), 1, -2, np.random.default_rng(0))


ints = st.integers(-6, 6)


@settings(max_examples=30, deadline=None)
@given(st.tuples(ints, ints, ints, ints).filter(any), st.integers(0, 999))
def test_sl2_invariance(c, seed):
    F = BinaryCubicForm(*c)
    g = random_sl2z(random.Random(seed), 2)
    tau = 0.3 + 1.2j
    gt = mobius(g, tau)
    lhs = v_eff(cubic_dictionary(F), [tau])
    rhs = v_eff(cubic_dictionary(group_action_sl2(g, F)), [gt])
    assert rhs == pytest.approx(lhs, rel=1e-9, abs=1e-12)


def test_explicit_cancellation_near_axis():
    # the five-line expansion cancels O(|charge|^2 / y^3) terms; fine at y ~ 1,
    # loses ~6 digits at y = 0.07 with charges in the hundreds
    G = cubic_dictionary(BinaryCubicForm(27, 216, 576, 512))
    gt = complex(-2.704888352444176, 0.07242003621001823)
    ref = v_eff(G, [gt])
    err = abs(nl.potential_4d_explicit(G, [gt.real], [gt.imag]) - ref) / ref
    assert 1e-9 < err < 1e-4


def test_sign_flip_formula():
    J = build_stu()
    rng, nrng = random.Random(3), np.random.default_rng(3)
    for _ in range(5):
        q = nl.random_positive_charge_q(J, rng)
        rep = nl.sign_flip_check(J, 2, q, nl.random_cone_point(J, nrng))
        assert rep.rel_diff < 1e-12 and rep.formula_rel < 1e-12
