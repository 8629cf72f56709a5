import csv
import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jordan_attractors import cubic_model as cm
from jordan_attractors.fts import BinaryCubicForm, group_action_sl2, random_sl2z

ints = st.integers(-8, 8)
neg_forms = (st.tuples(ints, ints, ints, ints).map(lambda c: c)
             .filter(lambda c: any(c) and BinaryCubicForm(*c).disc < 0)
             .map(lambda c: BinaryCubicForm(*c)))
pos_forms = (st.tuples(ints, ints, ints, ints)
             .filter(lambda c: any(c) and BinaryCubicForm(*c).disc > 0)
             .map(lambda c: BinaryCubicForm(*c)))


@settings(max_examples=25, deadline=None)
@given(neg_forms.filter(lambda F: F.a != 0))
def test_julia_theta_constant(F):
    P = cm.julia_covariant(F)
    assert cm._julia_theta(F, P) == pytest.approx(cm.THETA_CONST * math.sqrt(-F.disc), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(neg_forms)
def test_closed_form_is_critical(F):
    from jordan_attractors.fts import cubic_dictionary
    from jordan_attractors.special_geometry import v_eff, v_eff_gradient
    tau = cm.nonbps_point(F).tau
    g = cubic_dictionary(F)
    gr = np.max(np.abs(v_eff_gradient(g, [tau], h=1e-6 * max(1, tau.imag))))
    assert gr < 1e-5 * v_eff(g, [tau])


@settings(max_examples=25, deadline=None)
@given(pos_forms)
def test_bps_numeric_matches_exact(F):
    exact = complex(cm.exact_bps_tau(F))
    assert cm.hyperbolic_distance(cm.bps_point(F).point.tau, exact) < 1e-8
    # attractor point carries no (2,1) part
    assert cm.hodge_oracle(F, exact) < 1e-9


def test_hodge_oracle_away_from_attractor():
    F = BinaryCubicForm(1, 0, -1, 0)
    assert cm.hodge_oracle(F, 0.3 + 2j) > 1e-2


def test_F2_forms_agree():
    for tau in (0.2 + 1.3j, -1.1 + 0.4j):
        a = cm.fake_superpotential_F2(3, -2, tau, form="expanded")
        b = cm.fake_superpotential_F2(3, -2, tau, form="product")
        assert a == pytest.approx(b, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(neg_forms)
def test_d0d6_image(F):
    r = cm.d0d6_transform(F)
    sc = max(abs(v) for v in F.coeffs)
    assert abs(r.det - 1) < 1e-9
    assert abs(r.image[1]) < 1e-7 * sc and abs(r.image[2]) < 1e-7 * sc
    # p q < 0 is forced by negative discriminant: -27 p^2 q^2 = Disc
    assert -27 * (r.p * r.q) ** 2 == pytest.approx(F.disc, rel=1e-7)


def test_d0d6_rejects_bps():
    with pytest.raises(cm.WrongClass):
        cm.d0d6_transform(BinaryCubicForm(1, 0, -1, 0))


@given(st.floats(-50, 50), st.floats(1e-3, 50))
def test_reduce_point(x, y):
    g, z = cm.reduce_point(complex(x, y))
    assert cm.in_fundamental_domain(z)
    assert abs(cm.mobius(g, complex(x, y)) - z) < 1e-8 * (1 + abs(z))
    assert g[0][0] * g[1][1] - g[0][1] * g[1][0] == 1


def test_boundary_convention():
    assert cm.in_fundamental_domain(complex(-0.5, 1))
    # membership is tolerant (roundoff); the reduction picks the left edge
    assert cm.reduce_point(complex(0.5, 1))[1] == complex(-0.5, 1)
    z = complex(math.cos(1.2), math.sin(1.2))
    assert not cm.in_fundamental_domain(z)
    assert cm.in_fundamental_domain(-z.conjugate())


def test_x3_plus_1():
    fcs = cm.enumerate_forms(27)
    hit = {fc.form.coeffs: fc.tau for fc in fcs if fc.disc == -27}
    # x^3 + y^3, plus the reducible y (x^2 + x y + 7 y^2) up in the cusp
    assert set(hit) == {(-1, 0, 0, -1), (0, -1, -1, -7)}
    assert abs(hit[(-1, 0, 0, -1)] - 1j) < 1e-12


def _brute(bound, sign, span):
    keys = set()
    for c in itertools.product(range(-span, span + 1), repeat=4):
        if not any(c):
            continue
        F = BinaryCubicForm(*c)
        if 0 < sign * F.disc <= bound:
            keys.add(cm.class_key(F).form.coeffs)
    return keys


@pytest.mark.parametrize("sign", [-1, 1])
def test_enumeration_covers_brute_force(sign):
    got = {fc.form.coeffs for fc in cm.enumerate_forms(150, sign)}
    assert _brute(150, sign, 4) <= got


def test_enumeration_pretwist_and_growth():
    g = random_sl2z(random.Random(0), 3)
    a = cm.enumerate_forms(300)
    b = cm.enumerate_forms(300, pretwist=g)
    assert [fc.form.coeffs for fc in a] == [fc.form.coeffs for fc in b]
    assert len(cm.enumerate_forms(100)) < len(a)
    assert all(cm.in_fundamental_domain(fc.tau) for fc in a)


def test_csv(tmp_path):
    fcs = cm.enumerate_forms(60)
    p = tmp_path / "forms.csv"
    cm.forms_to_csv(fcs, p)
    rows = list(csv.DictReader(open(p)))
    assert len(rows) == len(fcs)
    r = rows[0]
    assert int(r["disc"]) == BinaryCubicForm(int(r["a"]), int(r["b"]), int(r["c"]), int(r["d"])).disc
