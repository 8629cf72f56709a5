"""5d attractors on the real hypersurface N(h) = 1.

a_IJ = -(1/3) d_I d_J log N.  At N = 1 the normal direction h is
a-orthogonal to the tangent space (a_IJ h^J = N_I / 3), so the full inverse
of a splits into h h^T plus the tangent block.  With g_xy = (3/2) E^T a E
for a tangent frame E this gives

    V(q) = q a^{-1} q = Z^2 + (3/2) g^{xy} dZ_x dZ_y,

with Z = q.h.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jordan import CubicNormStructure
from .special_geometry import numeric


class HypersurfaceError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass
class HypersurfacePoint:
    J: CubicNormStructure
    h: np.ndarray

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        N = numeric(self.J).N(self.h)
        if abs(N - 1) > 1e-10:
            raise HypersurfaceError(f"N(h) = {N!r}, not 1")


def in_cone(J: CubicNormStructure, h) -> bool:
    """h lies in the component of {N > 0} containing the unit.

    N is hyperbolic with respect to the unit, so this means every root s of
    N(h - s unit) (the "eigenvalues" of h) is positive.  A sign test along the
    segment unit -> h is not enough: N can touch zero there without crossing.
    """
    M = numeric(J)
    h = np.asarray(h, dtype=float)
    u = np.array([float(v) for v in J.unit])
    ss = np.array([-1.0, 0.0, 1.0, 2.0])
    vals = [M.N(h - s * u) for s in ss]
    ev = np.roots(np.polyfit(ss, vals, 3))
    scale = max(1.0, float(np.max(np.abs(ev))))
    return bool(np.all(ev.real > 1e-12 * scale))


def project(J: CubicNormStructure, h) -> np.ndarray:
    """Radial projection onto N = 1 (exact, since N is homogeneous)."""
    h = np.asarray(h, dtype=float)
    N = numeric(J).N(h)
    if not N > 0:
        raise HypersurfaceError("N(h) <= 0: no positive rescaling reaches N = 1")
    return h / np.cbrt(N)


def metric_aIJ(J: CubicNormStructure, h) -> np.ndarray:
    M = numeric(J)
    h = np.asarray(h, dtype=float)
    N = M.N(h)
    if not N > 0:
        raise HypersurfaceError("metric needs N(h) > 0")
    g = M.dN(h)
    return -(M.d2N(h) / N - np.outer(g, g) / N ** 2) / 3


def tangent_frame(J: CubicNormStructure, h, rotate=None) -> np.ndarray:
    """Orthonormal (Euclidean) basis of ker dN(h), as columns."""
    g = numeric(J).dN(np.asarray(h, dtype=float))
    n = g.size
    Q, _ = np.linalg.qr(np.column_stack([g, np.eye(n)]))
    E = Q[:, 1:n]
    if rotate is not None:
        E = E @ rotate
    return E


def tangent_metric(J, h, E=None) -> np.ndarray:
    """g_xy = (3/2) E^T a E."""
    E = tangent_frame(J, h) if E is None else E
    return 1.5 * E.T @ metric_aIJ(J, h) @ E


def a_inverse(J, h) -> np.ndarray:
    a = metric_aIJ(J, h)
    w = np.linalg.eigvalsh(a)
    if np.min(np.abs(w)) < 1e-12 * np.max(np.abs(w)):
        raise HypersurfaceError("a_IJ is singular here")
    return np.linalg.inv(a)


@dataclass
class Potential5d:
    V: float
    Z: float
    tangential: float           # (3/2) g^{xy} dZ dZ
    decomposition_residual: float

    def to_json(self) -> dict:
        return {"V": self.V, "Z": self.Z, "tangential": self.tangential,
                "decomposition_residual": self.decomposition_residual}


def potential_5d(J, q, h, E=None) -> Potential5d:
    q = np.asarray(q, dtype=float)
    h = HypersurfacePoint(J, h).h
    V = float(q @ a_inverse(J, h) @ q)
    Z = float(q @ h)
    E = tangent_frame(J, h) if E is None else E
    dZ = E.T @ q
    tang = float(1.5 * dZ @ np.linalg.solve(tangent_metric(J, h, E), dZ))
    return Potential5d(V, Z, tang, abs(V - Z * Z - tang) / max(abs(V), 1e-300))


def closed_form_h(J, q) -> np.ndarray:
    """h = y^# / N(y)^{2/3} with y = G^{-1} q; needs (y^#)^# = N(y) y."""
    M = numeric(J)
    y = J.gram_inv_np @ np.asarray(q, dtype=float)
    Ny = M.N(y)
    if not Ny > 0:
        raise HypersurfaceError("N(G^{-1} q) <= 0")
    return M.sharp(y) / np.cbrt(Ny) ** 2


@dataclass
class Solution5d:
    q: np.ndarray
    h: np.ndarray
    Z: float
    V: float
    tangent_residual: float
    iterations: int
    restricted_min_eig: float
    history: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"q": [float(v) for v in self.q], "h": [float(v) for v in self.h],
                "Z": self.Z, "V": self.V, "tangent_residual": self.tangent_residual}


def solve_bps_5d(J, q, h0=None, tol=1e-10, maxit=200) -> Solution5d:
    """grad N(h) parallel to q on N = 1.

    Stage 1 minimizes the convex barrier q.h - log N(h) on the cone by damped
    Newton; its stationary point has grad N / N = q.  Stage 2 polishes the
    Lagrange system [grad N - mu q, N - 1] by plain Newton.
    """
    M = numeric(J)
    q = np.asarray(q, dtype=float)
    h = np.array([float(v) for v in J.unit]) if h0 is None else np.asarray(h0, dtype=float)
    hist = []

    def f(h):
        N = M.N(h)
        return q @ h - np.log(N) if N > 0 and in_cone(J, h) else np.inf

    it = 0
    for it in range(maxit):
        N = M.N(h)
        g = q - M.dN(h) / N
        H = -(M.d2N(h) / N - np.outer(M.dN(h), M.dN(h)) / N ** 2)
        hist.append(float(np.linalg.norm(g)))
        if np.linalg.norm(g) < tol * max(1.0, np.linalg.norm(q)):
            break
        if len(hist) > 3 and hist[-1] >= hist[-3] and hist[-1] < 1e-6 * max(1.0, np.linalg.norm(q)):
            break   # roundoff floor; the Lagrange stage finishes
        try:
            step = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular barrier Hessian") from exc
        if g @ step >= 0:
            raise ConvergenceError(f"charge outside the dual cone; history {hist[-5:]}")
        t, f0 = 1.0, f(h)
        while f(h + t * step) > f0 + 1e-4 * t * (g @ step):
            t *= 0.5
            if t < 1e-14:
                raise ConvergenceError(f"line search stalled; history {hist[-5:]}")
        h = h + t * step
    else:
        raise ConvergenceError(f"barrier Newton did not converge; history {hist[-5:]}")
    h = project(J, h)
    # Lagrange polish: unknowns (h, mu)
    n = h.size
    mu = float(M.dN(h) @ h / (q @ h))
    for _ in range(8):
        r = np.concatenate([M.dN(h) - mu * q, [M.N(h) - 1]])
        if np.linalg.norm(r) < 1e-15 * max(1.0, np.linalg.norm(q)):
            break
        Jac = np.zeros((n + 1, n + 1))
        Jac[:n, :n] = M.d2N(h)
        Jac[:n, n] = -q
        Jac[n, :n] = M.dN(h)
        h_mu = np.linalg.solve(Jac, -r)
        h, mu = h + h_mu[:n], mu + h_mu[n]
    h = project(J, h)
    E = tangent_frame(J, h)
    res = float(np.linalg.norm(E.T @ q) / np.linalg.norm(q))
    if res > 1e-9:
        raise ConvergenceError(f"tangent residual {res:.3e}")
    mine = float(np.linalg.eigvalsh(tangent_metric(J, h, E)).min())
    if mine <= 0:
        raise ConvergenceError("restricted metric not positive definite: wrong orbit")
    P = potential_5d(J, q, h, E)
    return Solution5d(q, h, P.Z, P.V, res, it, mine, hist)


def restricted_potential_gradient(J, q, h, step=1e-5) -> np.ndarray:
    """Finite-difference gradient of V along the hypersurface (via radial projection)."""
    E = tangent_frame(J, h)
    out = []
    for k in range(E.shape[1]):
        vals = []
        for s in (-2, -1, 1, 2):
            vals.append(potential_5d(J, q, project(J, h + s * step * E[:, k])).V)
        out.append((vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * step))
    return np.array(out)
