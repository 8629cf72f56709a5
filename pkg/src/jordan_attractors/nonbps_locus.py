"""Explicit 4d black-hole potential in (x, lam) coordinates and the
non-BPS critical locus of charges (p0, 0, q0, 0).

Index conventions: d_ijk = 6 T_ijk with T the symmetric tensor of N, so
kappa = d lam lam lam = 6 N(lam) and V(lam) = N(lam).  Charges enter as
(p0, p^i, q_i, q0) with q_i the covector components G q.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .five_d import a_inverse, in_cone
from .fts import ChargeVector, quartic_I4
from .jordan import CubicNormStructure
from .special_geometry import charge_arrays, numeric, v_eff


class ConeError(ValueError):
    pass


@dataclass
class AuxTensors:
    kappa: object
    kappa_i: np.ndarray
    kappa_ij: np.ndarray
    kappa_up: np.ndarray
    kappa_hat: object
    kappa_hat_i: np.ndarray
    kappa_hat_ij: np.ndarray
    g: object
    g_i: np.ndarray
    g_ij: np.ndarray
    g_up: np.ndarray
    h: object
    h_i: np.ndarray
    h_ij: np.ndarray
    vol: object


def aux_tensors(J: CubicNormStructure, x, lam) -> AuxTensors:
    d = 6 * J.tensor_np
    lam = np.asarray(lam)
    x = np.asarray(x)
    kij = np.einsum("ijk,k->ij", d, lam)
    ki = kij @ lam
    kap = ki @ lam
    vol = kap / 6
    if not np.real(vol) > 0:
        raise ConeError("N(lam) must be positive")
    try:
        kinv = np.linalg.inv(kij)
    except np.linalg.LinAlgError as exc:
        raise ConeError("kappa_ij is singular") from exc
    lh = vol ** (-1 / 3) * lam
    khij = np.einsum("ijk,k->ij", d, lh)
    khi = khij @ lh
    gij = 0.25 * (0.25 * np.outer(khi, khi) - khij) * vol ** (-2 / 3)
    gup = 2 * (np.outer(lam, lam) - kap / 3 * kinv)
    hij = np.einsum("ijk,k->ij", d, x)
    hi = hij @ x
    return AuxTensors(kap, ki, kij, kinv, khi @ lh, khi, khij, x @ gij @ x, -4 * gij @ x,
                      gij, gup, hi @ x, hi, hij, vol)


def _explicit(J, p0, p, q, q0, x, lam):
    A = aux_tensors(J, x, lam)
    k, gup, hi, hij, h = A.kappa, A.g_up, A.h_i, A.h_ij, A.h
    L1 = (k / 6 * (1 + 4 * A.g) + h * h / (6 * k) + 3 / (8 * k) * hi @ gup @ hi) * p0 ** 2
    L2 = p @ (2 / 3 * k * A.g_ij + 3 / (2 * k) * (np.outer(hi, hi) + hij @ gup @ hij)) @ p
    L3 = 6 / k * (q0 ** 2 + 2 * (x @ q) * q0 + q @ (np.outer(x, x) + 0.25 * gup) @ q)
    # the bracket on this line multiplies p0 p^i
    L4 = 2 * p0 * (p @ (k / 6 * A.g_i - h / (2 * k) * hi - 3 / (4 * k) * hij @ gup @ hi))
    L5 = -2 / k * (-h * p0 * q0 + 3 * q0 * (p @ hi) - p0 * (q @ (h * x + 0.75 * gup @ hi))
                   + 3 * (q @ (np.outer(x, hi) + 0.5 * gup @ hij) @ p))
    return (L1 + L2 + L3 + L4 + L5) / 2


def potential_4d_explicit(gamma: ChargeVector, x, lam):
    """V from the five-line expansion; equals special_geometry.v_eff at t = x + i lam."""
    p0, p, q, q0 = charge_arrays(gamma)
    return _explicit(gamma.J, p0, p, q, q0, np.asarray(x), np.asarray(lam))


def _as_real(gamma, xl):
    n = gamma.J.dimension
    return potential_4d_explicit(gamma, xl[:n], xl[n:])


def cs_gradient(f, z, h=1e-30) -> np.ndarray:
    """Complex-step gradient: exact to rounding for real-analytic f."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    for i in range(z.size):
        w = z.astype(complex)
        w[i] += 1j * h
        out[i] = np.imag(f(w)) / h
    return out


def hessian(f, z, h=1e-3) -> np.ndarray:
    """Richardson-extrapolated central differences of the complex-step gradient."""
    z = np.asarray(z, dtype=float)
    n = z.size
    H = np.empty((n, n))

    def col(i, s):
        e = np.zeros(n)
        e[i] = s
        return (cs_gradient(f, z + e) - cs_gradient(f, z - e)) / (2 * s)
    for i in range(n):
        H[:, i] = (4 * col(i, h / 2) - col(i, h)) / 3
    return (H + H.T) / 2


def explicit_gradient(gamma, x, lam) -> np.ndarray:
    return cs_gradient(lambda w: _as_real(gamma, w), np.concatenate([x, lam]))


def explicit_hessian(gamma, x, lam, h=1e-3) -> np.ndarray:
    return hessian(lambda w: _as_real(gamma, w), np.concatenate([x, lam]), h)


# ---------------------------------------------------------------------------

def linear_term_conditions(gamma: ChargeVector) -> tuple:
    """(p0 p^i = 0 for all i, q_i p^j = 0 for all i,j, q0 q_i = 0 for all i)."""
    qd = gamma.q_dual
    return (all(gamma.p0 * v == 0 for v in gamma.p),
            all(a * b == 0 for a in qd for b in gamma.p),
            all(gamma.q0 * v == 0 for v in qd))


def random_cone_point(J: CubicNormStructure, rng: np.random.Generator, spread=0.3) -> np.ndarray:
    u = np.array([float(v) for v in J.unit])
    for _ in range(1000):
        lam = u + spread * rng.normal(size=u.size)
        if in_cone(J, lam):
            return lam
    raise ConeError("could not sample the positive cone")


def sample_locus(J, p0, q0, rng) -> np.ndarray:
    """lam in the positive cone with N(lam) = q0 / p0 (so kappa = 6 q0 / p0)."""
    target = float(q0) / float(p0)
    if target <= 0:
        raise ConeError("q0/p0 must be positive for the locus to meet the positive cone")
    lam = random_cone_point(J, rng)
    return lam * np.cbrt(target / numeric(J).N(lam))


@dataclass
class LocusPoint:
    lam: np.ndarray
    grad_norm: float
    eigenvalues: np.ndarray
    n_pos: int
    n_zero: int
    n_neg: int
    kappa_curvature: float      # d^2(2V)/dkappa^2 along the ray
    kappa_expected: float       # 12 q0^2 / kappa^3
    x_block_error: float        # |H_xx - (2 kappa/3) p0^2 g_ij| / |H_xx|
    veff_agreement: float

    def to_json(self) -> dict:
        return {"lam": self.lam.tolist(), "grad_norm": self.grad_norm,
                "eigenvalues": self.eigenvalues.tolist(),
                "signature": [self.n_pos, self.n_zero, self.n_neg],
                "kappa_curvature": self.kappa_curvature, "kappa_expected": self.kappa_expected,
                "x_block_error": self.x_block_error, "veff_agreement": self.veff_agreement}


@dataclass
class LocusReport:
    n: int
    points: list = field(default_factory=list)
    grad_tol: float = 1e-7
    zero_rel: float = 1e-6

    @property
    def max_grad(self) -> float:
        return max(p.grad_norm for p in self.points)

    @property
    def signature_ok(self) -> bool:
        return all((p.n_pos, p.n_zero, p.n_neg) == (self.n + 1, self.n - 1, 0) for p in self.points)

    @property
    def ok(self) -> bool:
        return self.max_grad < self.grad_tol and self.signature_ok

    def to_json(self) -> dict:
        return {"n": self.n, "max_grad": self.max_grad, "signature_ok": self.signature_ok,
                "ok": self.ok, "points": [p.to_json() for p in self.points]}


def critical_locus_check(gamma: ChargeVector, samples: int = 20, seed: int = 0,
                         zero_rel: float = 1e-6) -> LocusReport:
    J = gamma.J
    n = J.dimension
    if any(v != 0 for v in gamma.p) or any(v != 0 for v in gamma.q):
        raise ValueError("locus check expects a charge (p0, 0, q0, 0)")
    p0, q0 = float(gamma.p0), float(gamma.q0)
    rng = np.random.default_rng(seed)
    rep = LocusReport(n, zero_rel=zero_rel)
    x0 = np.zeros(n)
    for _ in range(samples):
        lam = sample_locus(J, p0, q0, rng)
        g = explicit_gradient(gamma, x0, lam)
        H = explicit_hessian(gamma, x0, lam)
        w = np.linalg.eigvalsh(H)
        thr = zero_rel * np.max(np.abs(w))
        A = aux_tensors(J, x0, lam)
        # curvature along the ray lam -> s lam at fixed direction, as a function of kappa
        f = lambda k: 2 * float(potential_4d_explicit(gamma, x0, lam * np.cbrt(k / A.kappa)))
        hk = 1e-3 * A.kappa
        kc = (f(A.kappa + hk) - 2 * f(A.kappa) + f(A.kappa - hk)) / hk ** 2
        Hxx = H[:n, :n]
        expect = (2 * A.kappa / 3) * p0 ** 2 * A.g_ij
        xerr = float(np.linalg.norm(Hxx - expect) / np.linalg.norm(Hxx))
        Vv = v_eff(gamma, x0 + 1j * lam)
        Ve = float(potential_4d_explicit(gamma, x0, lam))
        rep.points.append(LocusPoint(lam, float(np.max(np.abs(g))), w,
                                     int(np.sum(w > thr)), int(np.sum(np.abs(w) <= thr)),
                                     int(np.sum(w < -thr)), kc, 12 * q0 ** 2 / A.kappa ** 3, xerr,
                                     abs(Vv - Ve) / abs(Vv)))
    return rep


def kappa_only_check(gamma: ChargeVector, kappa: float, samples: int = 10, seed: int = 0) -> float:
    """Max relative spread of V(x=0) over lam with fixed kappa."""
    J = gamma.J
    rng = np.random.default_rng(seed)
    vals = []
    for _ in range(samples):
        lam = random_cone_point(J, rng)
        lam = lam * np.cbrt(kappa / 6 / numeric(J).N(lam))
        vals.append(float(potential_4d_explicit(gamma, np.zeros(J.dimension), lam)))
    vals = np.array(vals)
    return float(np.ptp(vals) / np.abs(vals).mean())


@dataclass
class SignFlipReport:
    I3: float
    rel_diff: float
    formula_rel: float          # against (1/2)[p0^2 N + N^{-1/3} q a^{-1} q / 3]
    I4_plus: object
    I4_minus: object


def sign_flip_check(J: CubicNormStructure, p0, q, lam) -> SignFlipReport:
    """Potential of (+-p0, 0, 0, q) on x = 0, and the 5d-metric closed form.

    With a_IJ = -(1/3) d d log N at lam / N^{1/3}, the x = 0 potential is
    (1/2)[p0^2 N + N^{-1/3} q a^{-1} q / 3]; the 1/3 is the inverse of the
    normalization in a_IJ.
    """
    plus = ChargeVector.make(J, p0=p0, q=q)
    minus = ChargeVector.make(J, p0=-p0, q=q)
    lam = np.asarray(lam, dtype=float)
    x0 = np.zeros(J.dimension)
    Vp = float(potential_4d_explicit(plus, x0, lam))
    Vm = float(potential_4d_explicit(minus, x0, lam))
    Nl = numeric(J).N(lam)
    qd = np.array([float(v) for v in plus.q_dual])
    ainv = a_inverse(J, lam / np.cbrt(Nl))
    Vf = 0.5 * (float(p0) ** 2 * Nl + Nl ** (-1 / 3) * qd @ ainv @ qd / 3)
    return SignFlipReport(float(J.norm(q)), abs(Vp - Vm) / abs(Vp), abs(Vf - Vp) / abs(Vp),
                          quartic_I4(plus), quartic_I4(minus))


def random_positive_charge_q(J, rng: random.Random, lo=-5, hi=5, tries=1000):
    """Integer q (Jordan coordinates) with N(q) > 0."""
    for _ in range(tries):
        q = [rng.randint(lo, hi) for _ in range(J.dimension)]
        if J.norm(q) > 0:
            return q
    raise ConeError("no charge with N(q) > 0 found")
