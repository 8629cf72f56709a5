"""Special geometry on the tube domain J + i J_+ for the prepotential N(X)/X^0.

Conventions
-----------
* t = x + i lam with N(lam) > 0.
* Period vector Omega(t) = (1, t, t^#, -N(t)) as a complex charge, i.e.
  X = (1, t), F_i = dN(t)/dt^i (covector), F_0 = -N(t).
* Z = omega(gamma, Omega), so for J = Q and the cubic dictionary Z = -F(t).
* e^{-K} = i omega(Omega, conj Omega) = 8 N(lam).
* g_{i jbar} = d_i d_jbar K = -(1/4) Hess_lam log N(lam).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fts import ChargeVector
from .jordan import CubicNormStructure


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class TubeDomainPoint:
    x: np.ndarray
    lam: np.ndarray

    @classmethod
    def from_complex(cls, t) -> "TubeDomainPoint":
        t = np.atleast_1d(np.asarray(t, dtype=complex))
        return cls(t.real.copy(), t.imag.copy())

    @property
    def t(self) -> np.ndarray:
        return self.x + 1j * self.lam

    def to_json(self) -> dict:
        return {"x": [float(v) for v in self.x], "lambda": [float(v) for v in self.lam]}


@dataclass(frozen=True)
class PeriodVector:
    X: np.ndarray      # X^0..X^n
    F: np.ndarray      # F_0..F_n (covector components)


@dataclass
class NumericModel:
    """Float views of a cubic norm structure: tensor d with N(x) = d x x x, Gram G."""
    J: CubicNormStructure

    def __post_init__(self):
        self.d = self.J.tensor_np
        self.G = self.J.gram_np
        self.Ginv = self.J.gram_inv_np
        self.n = self.J.dimension

    def N(self, x):
        return np.einsum("ijk,i,j,k->", self.d, x, x, x)

    def dN(self, x):
        return 3 * np.einsum("ijk,j,k->i", self.d, x, x)

    def d2N(self, x):
        return 6 * np.einsum("ijk,k->ij", self.d, x)

    def sharp(self, x):
        return self.Ginv @ self.dN(x)


_MODELS: dict = {}


def numeric(J: CubicNormStructure) -> NumericModel:
    hit = _MODELS.get(id(J))
    if hit is None or hit.J is not J:
        hit = NumericModel(J)
        _MODELS[id(J)] = hit
    return hit


def charge_arrays(gamma: ChargeVector):
    """(p0, p, q_dual, q0) as floats."""
    J = gamma.J
    return (float(gamma.p0), np.array([float(v) for v in gamma.p]),
            np.array([float(v) for v in J.to_dual(gamma.q)]) if J.dimension else np.zeros(0),
            float(gamma.q0))


# ---------------------------------------------------------------------------

def prepotential(X, J: CubicNormStructure):
    X = np.asarray(X, dtype=complex)
    if X[0] == 0:
        raise ZeroDivisionError("prepotential has a pole at X^0 = 0")
    return numeric(J).N(X[1:]) / X[0]


def prepotential_derivs(X, J: CubicNormStructure):
    """(F_I, F_IJ) for the homogeneous prepotential."""
    M = numeric(J)
    X = np.asarray(X, dtype=complex)
    x0, xv = X[0], X[1:]
    N, dN, d2N = M.N(xv), M.dN(xv), M.d2N(xv)
    n = M.n
    FI = np.concatenate([[-N / x0 ** 2], dN / x0])
    FIJ = np.zeros((n + 1, n + 1), dtype=complex)
    FIJ[0, 0] = 2 * N / x0 ** 3
    FIJ[0, 1:] = FIJ[1:, 0] = -dN / x0 ** 2
    FIJ[1:, 1:] = d2N / x0
    return FI, FIJ


def periods(J: CubicNormStructure, t) -> PeriodVector:
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    X = np.concatenate([[1.0 + 0j], t])
    FI, _ = prepotential_derivs(X, J)
    return PeriodVector(X, FI)


def _check_cone(M: NumericModel, lam):
    Nl = M.N(lam)
    if not Nl > 0:
        raise DomainError(f"N(Im t) = {Nl} is not positive; t is outside the tube domain")
    return Nl


def kahler_potential(J: CubicNormStructure, t) -> float:
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    M = numeric(J)
    Nl = _check_cone(M, t.imag)
    return -np.log(8 * Nl)


def kahler_from_periods(J: CubicNormStructure, t) -> float:
    """K from the symplectic product of the periods (cross-check of the closed form)."""
    P = periods(J, t)
    # i <Omega, conj Omega> with <A, B> = A^I B_I - A_I B^I
    val = 1j * (P.X @ P.F.conj() - P.F @ P.X.conj())
    if val.real <= 0:
        raise DomainError("i<Omega, conj Omega> is not positive")
    return -np.log(val.real)


def metric(J: CubicNormStructure, t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    M = numeric(J)
    lam = t.imag
    Nl = _check_cone(M, lam)
    dN = M.dN(lam)
    H = -M.d2N(lam) / Nl + np.outer(dN, dN) / Nl ** 2
    return 0.25 * H


def dK(J: CubicNormStructure, t) -> np.ndarray:
    """d K / d t^i."""
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    M = numeric(J)
    lam = t.imag
    Nl = _check_cone(M, lam)
    return 0.5j * M.dN(lam) / Nl


def central_charge(gamma: ChargeVector, t) -> complex:
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    M = numeric(gamma.J)
    p0, p, qd, q0 = charge_arrays(gamma)
    return -p0 * M.N(t) + p @ M.dN(t) - qd @ t - q0


def rescaled_Z(gamma: ChargeVector, t) -> complex:
    return np.exp(kahler_potential(gamma.J, t) / 2) * central_charge(gamma, t)


def central_charge_from_periods(gamma: ChargeVector, P: PeriodVector) -> complex:
    """<gamma, Omega> = p^I F_I - q_I X^I for an arbitrary lift."""
    p0, p, qd, q0 = charge_arrays(gamma)
    pI = np.concatenate([[p0], p])
    qI = np.concatenate([[q0], qd])
    return pI @ P.F - qI @ P.X


def dZ(gamma: ChargeVector, t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    M = numeric(gamma.J)
    p0, p, qd, q0 = charge_arrays(gamma)
    return -p0 * M.dN(t) + M.d2N(t) @ p - qd


def covariant_derivative_Z(gamma: ChargeVector, t) -> np.ndarray:
    return dZ(gamma, t) + dK(gamma.J, t) * central_charge(gamma, t)


def v_eff(gamma: ChargeVector, t) -> float:
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    g = metric(gamma.J, t)
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise DomainError("singular metric") from exc
    DZ = covariant_derivative_Z(gamma, t)
    Z = central_charge(gamma, t)
    eK = np.exp(kahler_potential(gamma.J, t))
    return float(eK * ((DZ @ ginv @ DZ.conj()).real + abs(Z) ** 2))


def v_eff_real(gamma: ChargeVector, xl: np.ndarray) -> float:
    """v_eff as a function of the 2n real coordinates (x, lam)."""
    n = gamma.J.dimension
    return v_eff(gamma, xl[:n] + 1j * xl[n:])


def fd_gradient(f, z: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central differences with a Richardson step; z real."""
    z = np.asarray(z, dtype=float)
    g1 = np.zeros_like(z)
    g2 = np.zeros_like(z)
    for i in range(z.size):
        e = np.zeros_like(z)
        e[i] = 1.0
        g1[i] = (f(z + h * e) - f(z - h * e)) / (2 * h)
        g2[i] = (f(z + 2 * h * e) - f(z - 2 * h * e)) / (4 * h)
    return (4 * g1 - g2) / 3


def fd_hessian(f, z: np.ndarray, h: float = 1e-4) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    n = z.size
    H = np.zeros((n, n))
    f0 = f(z)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        H[i, i] = (-f(z + 2 * ei) + 16 * f(z + ei) - 30 * f0 + 16 * f(z - ei) - f(z - 2 * ei)) / (12 * h * h)
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            H[i, j] = H[j, i] = (f(z + ei + ej) - f(z + ei - ej) - f(z - ei + ej) + f(z - ei - ej)) / (4 * h * h)
    return H


def v_eff_gradient(gamma: ChargeVector, t, h: float = 1e-5) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    z = np.concatenate([t.real, t.imag])
    return fd_gradient(lambda w: v_eff_real(gamma, w), z, h)


def metric_from_log_Z(gamma: ChargeVector, t, h: float = 1e-4) -> np.ndarray:
    """d d-bar log|e^{K/2} Z|^2 by finite differences; equals the metric where Z != 0."""
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    n = t.size
    f = lambda w: np.log(abs(rescaled_Z(gamma, w[:n] + 1j * w[n:])) ** 2)
    H = fd_hessian(f, np.concatenate([t.real, t.imag]), h)
    # d_i d_jbar = (1/4)(d_xx + d_ll) + (i/4)(d_x d_l - d_l d_x) for real f
    Hxx, Hll, Hxl = H[:n, :n], H[n:, n:], H[:n, n:]
    return 0.25 * (Hxx + Hll) + 0.25j * (Hxl - Hxl.T)


# ---------------------------------------------------------------------------
# Darboux coordinates and the Hesse potential

@dataclass
class DarbouxCoords:
    p: np.ndarray
    q: np.ndarray
    phi: np.ndarray
    psi: np.ndarray


def darboux(J: CubicNormStructure, X: np.ndarray) -> DarbouxCoords:
    FI, _ = prepotential_derivs(X, J)
    return DarbouxCoords(X.real.copy(), FI.real.copy(), X.imag.copy(), FI.imag.copy())


def solve_phi(J: CubicNormStructure, p, q, phi0, tol=1e-13, maxit=60):
    """Solve Re F_I(p + i phi) = q for phi by Newton, starting at phi0."""
    phi = np.array(phi0, dtype=float)
    for _ in range(maxit):
        FI, FIJ = prepotential_derivs(p + 1j * phi, J)
        r = FI.real - q
        if np.max(np.abs(r)) < tol * (1 + np.max(np.abs(q))):
            break
        Jac = -FIJ.imag      # d Re F_I / d phi^J = Re(i F_IJ)
        phi = phi - np.linalg.solve(Jac, r)
    return phi


def hesse_S(J: CubicNormStructure, p, q, phi0) -> float:
    """S(p, q) = q_I phi^I - Im F(p + i phi(p, q))."""
    phi = solve_phi(J, p, q, phi0)
    X = p + 1j * phi
    return float(q @ phi - prepotential(X, J).imag)


@dataclass
class LegendreReport:
    S: float
    phi_residual: float
    psi_residual: float

    @property
    def ok(self) -> bool:
        return self.phi_residual < 1e-6 and self.psi_residual < 1e-6


def darboux_legendre_check(J: CubicNormStructure, t, scale: complex = 1.0,
                           h: float = 1e-5) -> LegendreReport:
    """Verify phi = dS/dq and psi = -dS/dp by finite differences at the lift scale*Omega(t)."""
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    X = scale * np.concatenate([[1.0 + 0j], t])
    dc = darboux(J, X)
    p, q = dc.p, dc.q
    m = p.size
    S = lambda pp, qq: hesse_S(J, pp, qq, dc.phi)
    z = np.concatenate([p, q])
    grad = fd_gradient(lambda w: S(w[:m], w[m:]), z, h * max(1.0, np.max(np.abs(z))))
    dSdp, dSdq = grad[:m], grad[m:]
    nrm = max(1.0, np.max(np.abs(dc.phi)), np.max(np.abs(dc.psi)))
    return LegendreReport(S(p, q), float(np.max(np.abs(dSdq - dc.phi)) / nrm),
                          float(np.max(np.abs(-dSdp - dc.psi)) / nrm))
