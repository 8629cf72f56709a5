import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jordan_attractors import five_d
from jordan_attractors.jordan import build_herm3, build_model, build_stu

STU = build_stu()


def test_metric_at_unit():
    assert np.allclose(five_d.metric_aIJ(STU, [1, 1, 1]), np.eye(3) / 3)


def test_symmetric_point():
    q = np.array([1.0, 1.0, 1.0])
    sol = five_d.solve_bps_5d(STU, q)
    assert np.allclose(sol.h, 1)
    assert sol.V == pytest.approx(9) and sol.Z == pytest.approx(3)


pos = st.floats(0.2, 5)


@settings(max_examples=30, deadline=None)
@given(pos, pos, pos)
def test_stu_closed_form(a, b, c):
    q = np.array([a, b, c])
    sol = five_d.solve_bps_5d(STU, q)
    assert np.allclose(sol.h, five_d.closed_form_h(STU, q), atol=1e-9)
    # at the attractor V = Z^2 (tangential part vanishes)
    assert sol.V == pytest.approx(sol.Z ** 2, rel=1e-9)
    assert sol.restricted_min_eig > 0


@settings(max_examples=20, deadline=None)
@given(pos, pos, pos, st.floats(0.3, 3))
def test_scale_covariance(a, b, c, s):
    q = np.array([a, b, c])
    h1, h2 = five_d.solve_bps_5d(STU, q).h, five_d.solve_bps_5d(STU, s * q).h
    assert np.allclose(h1, h2, atol=1e-9)


def test_decomposition_and_frame_invariance():
    rng = np.random.default_rng(3)
    J = build_herm3("rational")
    h = five_d.project(J, np.array([1.3, 0.8, 1.1, 0.2, -0.1, 0.15]))
    q = rng.uniform(0.5, 2, size=6)
    P = five_d.potential_5d(J, q, h)
    assert P.decomposition_residual < 1e-12
    R, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    P2 = five_d.potential_5d(J, q, h, five_d.tangent_frame(J, h, R))
    assert P2.tangential == pytest.approx(P.tangential, rel=1e-12)


@pytest.mark.parametrize("name", ["herm3q", "herm3c", "generic"])
def test_solver_vs_closed_form(name):
    J = build_model(name)
    rng = np.random.default_rng(7)
    u = np.array([float(v) for v in J.unit])
    for _ in range(5):
        q = J.gram_np @ (u + 0.2 * rng.normal(size=u.size) / np.sqrt(u.size))
        sol = five_d.solve_bps_5d(J, q)
        assert np.allclose(sol.h, five_d.closed_form_h(J, q), atol=1e-8)
        assert np.max(np.abs(five_d.restricted_potential_gradient(J, q, sol.h))) < 1e-6 * sol.V


def test_off_hypersurface():
    with pytest.raises(five_d.HypersurfaceError):
        five_d.HypersurfacePoint(STU, [1, 1, 2])


def test_charge_outside_dual_cone():
    with pytest.raises(five_d.ConvergenceError):
        five_d.solve_bps_5d(STU, np.array([1.0, -1.0, 1.0]))


def test_in_cone():
    assert five_d.in_cone(STU, [2, 1, 0.5])
    assert not five_d.in_cone(STU, [-1, -1, 1])      # N > 0, other component
