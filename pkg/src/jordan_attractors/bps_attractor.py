"""Exact BPS attractors.

For a charge with I4 > 0 write -I4 = k^2 D with D squarefree.  The
attractor lift is

    X^I = p^I - (k / (2 I4)) dI4/dq_I sqrt(D),

(i.e. p^I - i dI1/dq_I with I1 = sqrt(I4), using i/sqrt(I4) = k sqrt(D)/I4),
and F_I = dF/dX^I is computed from the cubic prepotential in Q(sqrt D).
The real parts of (X^I, F_I) then reproduce the charge exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exactnum import QuadFieldElem, rational_sqrt_split, rational_to_json
from .fts import ChargeClass, ChargeVector, classify, grad_I4, quartic_I4
from .special_geometry import metric, v_eff, v_eff_gradient


class WrongClass(ValueError):
    pass


class ChartError(ValueError):
    pass


@dataclass
class AttractorSolution:
    charge: ChargeVector
    X: list            # X^0..X^n in Q(sqrt D)
    F: list            # F_0..F_n covector components
    D: int
    t: list = field(default_factory=list)
    scale_note: str = "Re X^0 = p0 (lift fixed by the real parts)"

    @property
    def F_jordan(self) -> list:
        """(F_0, G^{-1} F_vec) so that Re of it is (q0, q) in charge coordinates."""
        J = self.charge.J
        return [self.F[0]] + J.from_dual(self.F[1:])

    def t_complex(self) -> np.ndarray:
        return np.array([complex(v) for v in self.t])

    def to_json(self) -> dict:
        return {"charge": self.charge.to_json(), "field_D": self.D,
                "X": [v.to_json() for v in self.X], "F": [v.to_json() for v in self.F],
                "t": [v.to_json() for v in self.t]}


def _prepotential_grad(J, X):
    """Exact F_I for F = N(X_vec)/X^0: (-N/X0^2, dN/X0)."""
    x0, xv = X[0], X[1:]
    inv = x0.inverse()
    N = J.norm(xv)
    dN = J.grad_norm(xv)
    return [-(N * inv * inv)] + [v * inv for v in dN]


def solve_bps(gamma: ChargeVector) -> AttractorSolution:
    if classify(gamma) != ChargeClass.BPS:
        raise WrongClass(f"charge is {classify(gamma).value}, expected BPS")
    J = gamma.J
    r = Fraction(quartic_I4(gamma))
    k, D = rational_sqrt_split(-r)
    g = grad_I4(gamma)
    coef = k / (2 * r)
    X = [QuadFieldElem(gamma.p0, -coef * g["q0"], D)]
    X += [QuadFieldElem(pi, -coef * gi, D) for pi, gi in zip(gamma.p, g["q"])]
    if X[0].is_zero():
        raise ChartError("X^0 vanishes: p0 = 0 and dI1/dq0 = 0; only the homogeneous "
                         f"solution {X} is available")
    F = _prepotential_grad(J, X)
    inv = X[0].inverse()
    t = [x * inv for x in X[1:]]
    return AttractorSolution(gamma, X, F, D, t)


@dataclass
class Certificate:
    passed: bool
    field_D: int
    checks: dict
    real_class: list          # Re(Omega) as rationals (p0, p, q, q0)
    twisted_class: list       # Re(sqrt D Omega)
    witness: str = ""

    def to_json(self) -> dict:
        return {"passed": self.passed, "field_D": self.field_D, "checks": self.checks,
                "real_class": [rational_to_json(v) for v in self.real_class],
                "twisted_class": [rational_to_json(v) for v in self.twisted_class],
                "witness": self.witness}


def _rank2(u, v) -> bool:
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            if u[i] * v[j] - u[j] * v[i] != 0:
                return True
    return False


def cm_certificate(sol: AttractorSolution) -> Certificate:
    """Exact check that the attractor lift lives in V_Q (x) Q(sqrt D), D < 0.

    * every X^I, F_I and t^i lies in one field Q(sqrt D) with D < 0;
    * F_I is the prepotential gradient at X (the lift is a genuine period);
    * t^i X^0 = X^i;
    * Re(sqrt D . X^I), Re(sqrt D . F_I) are rational, and together with the
      real parts they span a rational 2-plane (Re Omega, Re sqrt D Omega).
    """
    J = sol.charge.J
    checks = {}
    witness = []
    entries = list(sol.X) + list(sol.F) + list(sol.t)
    same = all(isinstance(e, QuadFieldElem) and e.D == sol.D for e in entries)
    checks["single_field"] = same and sol.D < 0
    if not checks["single_field"]:
        witness.append(f"field mismatch or D={sol.D} not negative")
    if same:
        F_re = _prepotential_grad(J, sol.X)
        bad = [i for i, (a, b) in enumerate(zip(F_re, sol.F)) if a != b]
        checks["prepotential_gradient"] = not bad
        if bad:
            i = bad[0]
            witness.append(f"F_{i} = {sol.F[i]} but dF/dX^{i} = {F_re[i]}")
        bad_t = [i for i, (ti, xi) in enumerate(zip(sol.t, sol.X[1:])) if ti * sol.X[0] != xi]
        checks["affine_coordinates"] = not bad_t
        if bad_t:
            witness.append(f"t^{bad_t[0] + 1} X^0 != X^{bad_t[0] + 1}")
    else:
        checks["prepotential_gradient"] = checks["affine_coordinates"] = False
    s = QuadFieldElem(0, 1, sol.D) if sol.D not in (0, 1) else None
    Omega = [sol.X[0]] + list(sol.X[1:]) + sol.F_jordan[1:] + [sol.F_jordan[0]] if same else []
    real = [e.a for e in Omega]
    twisted = [(s * e).a for e in Omega] if same else []
    checks["rational_twisted_parts"] = same and all(isinstance(v, Fraction) for v in real + twisted)
    checks["rational_plane"] = same and _rank2(real, twisted)
    passed = all(checks.values())
    return Certificate(passed, sol.D, checks, real, twisted, "; ".join(witness))


@dataclass
class VerifyReport:
    recovered: ChargeVector
    exact_match: bool
    grad_norm: float
    uniqueness_ok: bool
    residual: list
    positive_cone: bool = True

    @property
    def ok(self) -> bool:
        # the growth test only means something where the metric is positive definite;
        # for I4 > 0 charges whose Im t sits in another component of {N > 0} the
        # point is still critical but a saddle of v_eff
        return self.exact_match and (self.uniqueness_ok or not self.positive_cone)


def verify_attractor(gamma: ChargeVector, sol: AttractorSolution, directions: int = 4,
                     seed: int = 0) -> VerifyReport:
    J = gamma.J
    Fj = sol.F_jordan
    rec = ChargeVector.make(J, sol.X[0].a, [x.a for x in sol.X[1:]],
                            [f.a for f in Fj[1:]], Fj[0].a)
    resid = [a - b for a, b in zip(rec.flat(), gamma.flat())]
    exact = all(r == 0 for r in resid)
    # numeric sanity: critical point of v_eff, and v_eff increases away from it
    t = sol.t_complex()
    pos = bool(np.linalg.eigvalsh(metric(J, t)).min() > 0)
    gn = float(np.max(np.abs(v_eff_gradient(gamma, t))))
    scale = abs(v_eff(gamma, t))
    rng = np.random.default_rng(seed)
    up = True
    v0 = v_eff(gamma, t)
    for _ in range(directions):
        d = rng.normal(size=t.size) + 1j * rng.normal(size=t.size)
        d *= 1e-4 * np.linalg.norm(t) / np.linalg.norm(d)
        try:
            up &= v_eff(gamma, t + d) > v0
        except ValueError:
            pass
    return VerifyReport(rec, exact, gn / max(scale, 1e-300), bool(up), resid, pos)
