import dataclasses
import random

import numpy as np
import pytest

from jordan_attractors.bps_attractor import WrongClass, cm_certificate, solve_bps, verify_attractor
from jordan_attractors.exactnum import QuadFieldElem
from jordan_attractors.fts import (BinaryCubicForm, ChargeClass, ChargeVector, classify,
                                   cubic_dictionary, random_charge)
from jordan_attractors.jordan import build_herm3, build_rational, build_stu
from jordan_attractors.special_geometry import v_eff, v_eff_gradient


def _bps(J, seed, n):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        g = random_charge(J, rng)
        if classify(g) == ChargeClass.BPS and g.p0 != 0:
            out.append(g)
    return out


def test_wrong_class():
    with pytest.raises(WrongClass):
        solve_bps(ChargeVector.make(build_rational(), p0=1, q0=1))


def test_t3_example():
    sol = solve_bps(cubic_dictionary(BinaryCubicForm(0, 1, 0, -1)))
    assert sol.D == -3
    assert cm_certificate(sol).passed


@pytest.mark.parametrize("J", [build_rational(), build_stu(), build_herm3("imaginary_quadratic")],
                         ids=lambda J: J.family)
def test_certificate_and_recovery(J):
    for g in _bps(J, 3, 8):
        sol = solve_bps(g)
        assert cm_certificate(sol).passed
        rep = verify_attractor(g, sol)
        assert rep.exact_match and rep.grad_norm < 1e-6


def test_scaling_keeps_t():
    g = _bps(build_stu(), 4, 1)[0]
    assert solve_bps(g).t == solve_bps(g.scale(5)).t


def test_v_eff_at_attractor_is_sqrt_I4():
    from math import sqrt
    from jordan_attractors.fts import quartic_I4
    for g in _bps(build_rational(), 6, 5):
        sol = solve_bps(g)
        if not verify_attractor(g, sol).positive_cone:
            continue
        assert v_eff(g, sol.t_complex()) == pytest.approx(sqrt(quartic_I4(g)), rel=1e-10)


def test_tampered_certificate_fails():
    sol = solve_bps(_bps(build_stu(), 8, 1)[0])
    F = list(sol.F)
    F[1] = F[1] + QuadFieldElem(0, 1, sol.D)
    cert = cm_certificate(dataclasses.replace(sol, F=F))
    assert not cert.passed
    assert "F_1" in cert.witness


def test_json_shape():
    sol = solve_bps(_bps(build_rational(), 9, 1)[0])
    d = sol.to_json()
    assert d["field_D"] < 0 and len(d["X"]) == 2 and len(d["t"]) == 1
