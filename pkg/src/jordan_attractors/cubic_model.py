"""The t^3 model: binary cubic forms and their attractor points.

Everything here works with F(x) = a x^3 + b x^2 + c x + d, i.e. the
dehomogenized form F(x, 1).  SL2 acts by (g.F)(v) = F(g^{-1} v), so roots
and covariant points move by the Moebius action of g.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .fts import (BinaryCubicForm, ChargeClass, ChargeVector, classify, cubic_dictionary,
                  cubic_from_charge, disc, group_action_sl2)


class WrongClass(ValueError):
    pass


class NumericFailure(RuntimeError):
    pass


class DegenerateQuadratic(ValueError):
    pass


@dataclass(frozen=True)
class UpperHalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"y = {self.y} is not positive")

    @property
    def tau(self) -> complex:
        return complex(self.x, self.y)

    def to_json(self) -> dict:
        return {"x": float(self.x) + 0.0, "y": float(self.y)}


@dataclass(frozen=True)
class H3Point:
    t: complex
    u: float

    def __post_init__(self):
        if not self.u > 0:
            raise ValueError("height must be positive")

    def to_uhp(self) -> UpperHalfPlanePoint:
        return UpperHalfPlanePoint(float(self.t.real), float(self.u))


def hyperbolic_distance(z1: complex, z2: complex) -> float:
    z1, z2 = complex(z1), complex(z2)
    return 2 * math.asinh(abs(z1 - z2) / (2 * math.sqrt(z1.imag * z2.imag)))


def mobius(g, z):
    (a, b), (c, d) = g
    return (a * z + b) / (c * z + d)


def _coeffs(F):
    return F.coeffs if isinstance(F, BinaryCubicForm) else tuple(F)


def _disc_of(F):
    return disc(*_coeffs(F))


# ---------------------------------------------------------------------------
# roots

INF = complex("inf")


def roots(F) -> list[complex]:
    """Roots in P^1(C); the point at infinity is INF (one entry per missing degree)."""
    a, b, c, d = _coeffs(F)
    if (a, b, c, d) == (0, 0, 0, 0):
        raise ValueError("zero form")
    coeffs = [a, b, c, d]
    lead = 0
    while coeffs[lead] == 0:
        lead += 1
    poly = coeffs[lead:]
    out = [INF] * lead
    if len(poly) > 1:
        with mpmath.workdps(40):
            rs = mpmath.polyroots([mpmath.mpf(int(v)) if isinstance(v, int) else mpmath.mpf(v)
                                   for v in poly], maxsteps=200, extraprec=80)
        out += [complex(r) for r in rs]
    return out


def root_multiplicity_flag(F) -> bool:
    return _disc_of(F) == 0


# ---------------------------------------------------------------------------
# Julia's F1 on hyperbolic 3-space

def julia_F1(F, P: H3Point) -> float:
    """prod over roots of (|t - r|^2 + u^2)/u; a root at infinity contributes 1/u."""
    out = 1.0
    for r in roots(F):
        if r == INF:
            out *= 1.0 / P.u
        else:
            out *= (abs(P.t - r) ** 2 + P.u ** 2) / P.u
    return out


def _logF1_slice(rs, x, s):
    """log F1 on the real slice t = x, u = e^s, with gradient and Hessian in (x, s)."""
    u = math.exp(s)
    f = 0.0
    g = np.zeros(2)
    H = np.zeros((2, 2))
    for r in rs:
        dx = x - r.real
        q = dx * dx + r.imag ** 2 + u * u
        f += math.log(q) - s
        # d/dx, d/ds of log q
        qx, qs = 2 * dx, 2 * u * u
        g += (qx / q, qs / q - 1.0)
        H[0, 0] += 2 / q - qx * qx / q ** 2
        H[1, 1] += 4 * u * u / q - qs * qs / q ** 2
        H[0, 1] += -qx * qs / q ** 2
    H[1, 0] = H[0, 1]
    return f, g, H


def _newton_slice(rs, x0, s0, tol=1e-13, maxit=200):
    x, s = x0, s0
    f, g, H = _logF1_slice(rs, x, s)
    for _ in range(maxit):
        if np.max(np.abs(g)) < tol:
            return x, s, f, g, True
        try:
            w, V = np.linalg.eigh(H)
            step = -V @ ((V.T @ g) / np.maximum(np.abs(w), 1e-8))
        except np.linalg.LinAlgError:
            step = -g
        nrm = np.linalg.norm(step)
        if nrm > 2.0:
            step *= 2.0 / nrm
        lam = 1.0
        while lam > 1e-12:
            xn, sn = x + lam * step[0], s + lam * step[1]
            fn, gn, Hn = _logF1_slice(rs, xn, sn)
            if fn <= f + 1e-4 * lam * (g @ step) or np.max(np.abs(gn)) < np.max(np.abs(g)):
                break
            lam *= 0.5
        x, s, f, g, H = xn, sn, fn, gn, Hn
    return x, s, f, g, np.max(np.abs(g)) < 1e-9


def _make_a_nonzero(F):
    """SL2(Z) element g with (g.F)(1,0) != 0."""
    a, b, c, d = _coeffs(F)
    if a != 0:
        return ((1, 0), (0, 1))
    for k in range(1, 5):
        g = ((1, 0), (k, 1))       # g^{-1} = ((1,0),(-k,1)): (g.F)(1,0) = F(1, -k)
        if BinaryCubicForm(*[int(v) for v in (a, b, c, d)])(1, -k) != 0:
            return g
    raise NumericFailure("could not move the roots away from infinity")


def _inv(g):
    (a, b), (c, d) = g
    return ((d, -b), (-c, a))


def julia_covariant(F, tol: float = 1e-12) -> H3Point:
    """Minimizer of F1.  Real forms have their minimizer on the real slice t in R."""
    if _disc_of(F) == 0:
        raise WrongClass("repeated root: Julia's covariant is undefined")
    g = _make_a_nonzero(F)
    if g != ((1, 0), (0, 1)):
        G = group_action_sl2(g, F if isinstance(F, BinaryCubicForm) else tuple(F))
        P = julia_covariant(G, tol)
        tau = mobius(_inv(g), complex(P.t.real, P.u))
        return H3Point(complex(tau.real, 0.0), tau.imag)
    rs = roots(F)
    centre = sum(rs) / 3
    spread = max(abs(r - centre) for r in rs)
    starts = [(centre.real, math.log(max(spread, 1e-300))), (0.0, 0.0),
              (rs[0].real, math.log(max(spread, 1e-300)) - 1.0)]
    best = None
    sols = []
    for x0, s0 in starts:
        x, s, f, gr, ok = _newton_slice(rs, x0, s0, tol)
        if ok:
            sols.append((f, x, s))
            if best is None or f < best[0]:
                best = (f, x, s)
    if best is None:
        raise NumericFailure(f"Julia minimization did not converge for {F}")
    f, x, s = best
    u = math.exp(s)
    for f2, x2, s2 in sols:
        if hyperbolic_distance(complex(x, u), complex(x2, math.exp(s2))) > 1e-6:
            raise NumericFailure("multistart found distinct minima")
    _verify_full_h3(rs, x, u)
    return H3Point(complex(x, 0.0), u)


def _verify_full_h3(rs, x, u, h=1e-6):
    """The imaginary floor direction is stationary and convex at the slice minimizer."""
    def logF1(y):
        return sum(math.log(abs(complex(x, y) - r) ** 2 + u * u) - math.log(u) for r in rs)
    d1 = (logF1(h * u) - logF1(-h * u)) / (2 * h * u)
    d2 = (logF1(h * u) - 2 * logF1(0.0) + logF1(-h * u)) / (h * u) ** 2
    if abs(d1) * u > 1e-6 or d2 < -1e-6 / (u * u):
        raise NumericFailure("real-slice minimizer is not a minimum in H^3")


# ---------------------------------------------------------------------------
# BPS points (Disc > 0)

@dataclass
class BPSPoint:
    point: UpperHalfPlanePoint
    quadratic: tuple            # (A, B, C) integers with A tau^2 + B tau + C = 0
    field_disc: int             # B^2 - 4AC
    residual: float


def _log_Zt(F, x, s):
    """log |F(tau)|^2 - 3 log y and derivatives in (x, s = log y)."""
    a, b, c, d = (float(v) for v in _coeffs(F))
    y = math.exp(s)
    tau = complex(x, y)
    P = ((a * tau + b) * tau + c) * tau + d
    P1 = (3 * a * tau + 2 * b) * tau + c
    P2 = 6 * a * tau + 2 * b
    w = P1 / P
    wp = (P2 * P - P1 * P1) / (P * P)
    f = math.log(abs(P) ** 2) - 3 * s
    fx = 2 * w.real
    fy = -2 * w.imag - 3 / y
    fxx = 2 * wp.real
    fyy = -2 * wp.real + 3 / y ** 2
    fxy = -2 * wp.imag
    g = np.array([fx, y * fy])
    H = np.array([[fxx, y * fxy], [y * fxy, y * y * fyy + y * fy]])
    return f, g, H


def bps_point(F, tol: float = 1e-13) -> BPSPoint:
    """Minimizer of |F(tau)| / y^{3/2} for a form with three real roots."""
    if _disc_of(F) <= 0:
        raise WrongClass("BPS points need a positive discriminant")
    rs = roots(F)
    finite = [r for r in rs if r != INF]
    cx = float(np.mean([r.real for r in finite])) if finite else 0.0
    spread = max([abs(r.real - cx) for r in finite] + [1.0 if len(finite) < 3 else 1e-300])
    best = None
    for x0, y0 in ((cx, spread), (cx, 2 * spread), (0.0, 1.0)):
        x, s = x0, math.log(y0)
        ok = False
        for _ in range(300):
            f, g, H = _log_Zt(F, x, s)
            if np.max(np.abs(g)) < tol:
                ok = True
                break
            w, V = np.linalg.eigh(H)
            step = -V @ ((V.T @ g) / np.maximum(np.abs(w), 1e-8))
            nrm = np.linalg.norm(step)
            if nrm > 2.0:
                step *= 2.0 / nrm
            lam = 1.0
            while lam > 1e-12:
                fn, gn, _ = _log_Zt(F, x + lam * step[0], s + lam * step[1])
                if fn <= f + 1e-4 * lam * (g @ step) or np.max(np.abs(gn)) < np.max(np.abs(g)):
                    break
                lam *= 0.5
            x, s = x + lam * step[0], s + lam * step[1]
        if ok and (best is None or f < best[0]):
            best = (f, x, s)
    if best is None:
        raise NumericFailure("BPS minimization did not converge")
    _, x, s = best
    y = math.exp(s)
    quad, res = _fit_quadratic(complex(x, y))
    A, B, C = quad
    return BPSPoint(UpperHalfPlanePoint(x, y), quad, B * B - 4 * A * C, res)


def _fit_quadratic(tau: complex, max_den: int = 10 ** 6):
    """Smallest integer A tau^2 + B tau + C with tau + conj = -B/A and |tau|^2 = C/A."""
    s = Fraction(2 * tau.real).limit_denominator(max_den)
    n = Fraction(abs(tau) ** 2).limit_denominator(max_den)
    A = s.denominator * n.denominator // math.gcd(s.denominator, n.denominator)
    B, C = int(-s * A), int(n * A)
    g = math.gcd(math.gcd(A, abs(B)), abs(C))
    A, B, C = A // g, B // g, C // g
    res = abs(A * tau * tau + B * tau + C) / max(A, abs(B), abs(C))
    return (A, B, C), res


# ---------------------------------------------------------------------------
# non-BPS points (Disc < 0): closed-form quadratic

HP_DPS = 50       # working precision for the closed-form path


def real_root(F, hp: bool = False):
    """The real root of a form with Disc < 0 and a != 0.

    Exact Fraction when rational; otherwise a float, or an mpf at HP_DPS
    digits when hp is set (call inside mpmath.workdps(HP_DPS) to keep it).
    """
    a, b, c, d = _coeffs(F)
    rs = roots(F)
    alpha = min((r for r in rs if r != INF), key=lambda r: abs(r.imag)).real
    if all(isinstance(v, int) for v in (a, b, c, d)) and a != 0:
        cand = Fraction(alpha).limit_denominator(abs(a))
        if ((a * cand + b) * cand + c) * cand + d == 0:
            return cand
    if not hp:
        return alpha
    coeffs = [mpmath.mpf(v) if not isinstance(v, Fraction) else mpmath.mpf(v.numerator) / v.denominator
              for v in (a, b, c, d)]
    with mpmath.workdps(HP_DPS):
        r = mpmath.findroot(lambda x: ((coeffs[0] * x + coeffs[1]) * x + coeffs[2]) * x + coeffs[3],
                            mpmath.mpf(alpha))
    return +r


def quadratic_h(F, alpha=None) -> tuple:
    """(h0, h1, h2) from the charges (P0, P1, Q1, Q0) = (d, c, b, -3a) and the real root."""
    a, b, c, d = _coeffs(F)
    if alpha is None:
        alpha = real_root(F)
    P0, P1, Q1, Q0 = d, c, b, -3 * a
    h0 = Q0 * Q0 * alpha * alpha - 2 * Q0 * Q1 * alpha - 2 * P1 * Q0 - Q1 * Q1
    h1 = -2 * Q0 * Q1 * alpha * alpha + (6 * Q1 * Q1 + 2 * Q0 * P1) * alpha + 2 * P1 * Q1
    h2 = -P1 * Q0 * alpha * alpha + 3 * (P1 * Q1 + P0 * Q0) * alpha + 2 * P1 * P1 - 3 * P0 * Q1
    return h0, h1, h2


def _uhp_root(h0, h1, h2) -> complex:
    if h0 == 0:
        raise DegenerateQuadratic(f"h0 = 0; linear solution tau = {-h2 / h1 if h1 else None}")
    disc_ = 4 * h0 * h2 - h1 * h1
    if disc_ <= 0:
        raise NumericFailure("quadratic has no root in the upper half plane")
    if all(isinstance(v, (int, Fraction)) for v in (h0, h1, h2)):
        x = -float(Fraction(h1) / (2 * Fraction(h0)))
        num = Fraction(disc_)
        r, rd = math.isqrt(num.numerator), math.isqrt(num.denominator)
        if r * r == num.numerator and rd * rd == num.denominator:
            y = float(Fraction(r, rd) / (2 * abs(Fraction(h0))))
        else:
            with mpmath.workdps(HP_DPS):
                h0f = Fraction(h0)
                y = float(mpmath.sqrt(mpmath.mpf(num.numerator) / num.denominator)
                          / (2 * abs(mpmath.mpf(h0f.numerator) / h0f.denominator)))
        return complex(x, y)
    with mpmath.workdps(HP_DPS):
        return complex(float(-h1 / (2 * h0)), float(mpmath.sqrt(disc_) / (2 * abs(h0))))


def nonbps_point(F) -> UpperHalfPlanePoint:
    if _disc_of(F) >= 0:
        raise WrongClass("non-BPS points need a negative discriminant")
    a = _coeffs(F)[0]
    if a == 0:
        g = _make_a_nonzero(F)
        G = group_action_sl2(g, F)
        tau = mobius(_inv(g), nonbps_point(G).tau)
        return UpperHalfPlanePoint(tau.real, tau.imag)
    with mpmath.workdps(HP_DPS):
        h = quadratic_h(F, real_root(F, hp=True))
        tau = _uhp_root(*h)
    return UpperHalfPlanePoint(tau.real, tau.imag)


# ---------------------------------------------------------------------------
# D0-D6 system: fake superpotential and the transporter M

def _cbrt(v: float) -> float:
    return float(np.cbrt(v))


def fake_superpotential_F2(p, q, tau, form: str = "expanded") -> float:
    tau = complex(tau)
    y = tau.imag
    if not y > 0:
        raise ValueError("tau must lie in the upper half plane")
    p3, q3 = _cbrt(p), _cbrt(q)
    A = abs(q3 + p3 * tau)
    if form == "expanded":
        P, Qq = p3 * p3, q3 * q3
        br = (Qq - P * abs(tau) ** 2) ** 2 - P * Qq * ((tau - tau.conjugate()) ** 2).real
        return 0.25 * y ** -1.5 * A ** 3 * (1 + 3 * br / A ** 4)
    if form == "product":
        return A * (4 * p3 * p3 * abs(tau) ** 2 - 2 * p3 * q3 * 2 * tau.real + 4 * q3 * q3) / (4 * y ** 1.5)
    raise ValueError(form)


def F1_on_H(F, tau) -> float:
    """F1 restricted to the real slice, as a function on the upper half plane."""
    tau = complex(tau)
    return julia_F1(F, H3Point(complex(tau.real, 0.0), tau.imag))


@dataclass
class D0D6Result:
    M: np.ndarray
    p: float
    q: float
    method: str
    det: float
    image: tuple


def _act_real(M, F):
    g = ((float(M[0, 0]), float(M[0, 1])), (float(M[1, 0]), float(M[1, 1])))
    return tuple(float(v) for v in group_action_sl2(g, tuple(float(v) for v in _coeffs(F))))


def _is_d0d6(G, scale) -> bool:
    return abs(G[1]) < 1e-8 * scale and abs(G[2]) < 1e-8 * scale


def _closed_form_M(F):
    """The displayed zeta, rho, xi recipe, normalized to determinant one."""
    a, b, c, d = (float(v) for v in _coeffs(F))
    P0, P1, Q1, Q0 = d, c, b, -3 * a
    I = -float(_disc_of(F))          # -I4 in the displayed normalization, up to a positive factor
    sq = math.sqrt(I)
    den = 2 * P0 * P1 - P0 * Q1
    zeta = (sq + (P0 * Q0 - P1 * Q1)) / den
    rho = (sq - (P0 * Q0 - P1 * Q1)) / den
    num = 2 * P1 ** 3 + P0 * (sq - (P1 * Q1 + P0 * Q0))
    dd = 2 * P1 ** 3 - P0 * (sq - (P1 * Q1 + P0 * Q0))
    xi = _cbrt(P0 / Q0) * num / dd
    M = (-math.copysign(1.0, xi) / math.sqrt(zeta + rho)) * np.array([[zeta * xi, -rho], [xi, 1.0]])
    det = np.linalg.det(M)
    return M / math.sqrt(det)


def _numeric_M(F):
    """SL2(R) element taking the covariant point to i and the real root to -1."""
    tau = nonbps_point(F).tau
    x, y = tau.real, tau.imag
    A = np.array([[1 / math.sqrt(y), -x / math.sqrt(y)], [0.0, math.sqrt(y)]])
    alpha = float(real_root(F)) if _coeffs(F)[0] != 0 else math.inf
    s = (alpha - x) / y if math.isfinite(alpha) else math.inf
    phi = math.atan2(1.0, s) if math.isfinite(s) else 0.0   # s = cot(phi)
    th = 3 * math.pi / 4 - phi
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    return R @ A


def d0d6_transform(F) -> D0D6Result:
    if _disc_of(F) >= 0:
        raise WrongClass("D0-D6 frames exist for negative discriminant only")
    scale = max(abs(float(v)) for v in _coeffs(F))
    if _coeffs(F)[1] == 0 and _coeffs(F)[2] == 0:
        M = np.eye(2)
        G = tuple(float(v) for v in _coeffs(F))
        return D0D6Result(M, G[0], G[3], "identity", 1.0, G)
    tries = []
    try:
        M = _closed_form_M(F)
        if np.all(np.isfinite(M)):
            tries.append(("closed_form", M))
    except (ZeroDivisionError, ValueError):
        pass
    tries.append(("numeric", _numeric_M(F)))
    for method, M in tries:
        det = float(np.linalg.det(M))
        if abs(det - 1) > 1e-9:
            continue
        G = _act_real(M, F)
        sc = max(scale, max(abs(v) for v in G))
        if _is_d0d6(G, sc):
            return D0D6Result(M, G[0], G[3], method, det, G)
    raise NumericFailure("no D0-D6 transporter found")


# ---------------------------------------------------------------------------
# Hodge-theoretic oracle

def hodge_coefficients(F, tau) -> np.ndarray:
    """Coordinates of F in the basis (X - tau Y)^{3-k} (X - conj(tau) Y)^k, k = 0..3."""
    tau = complex(tau)
    tb = tau.conjugate()
    B = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        # expand (X - tau Y)^{3-k} (X - tb Y)^k into coefficients of X^3, X^2Y, XY^2, Y^3
        poly = np.array([1.0 + 0j])
        for _ in range(3 - k):
            poly = np.convolve(poly, [1.0, -tau])
        for _ in range(k):
            poly = np.convolve(poly, [1.0, -tb])
        B[:, k] = poly
    coeffs = np.array([float(v) for v in _coeffs(F)], dtype=complex)
    return np.linalg.solve(B, coeffs)


def hodge_projection(F, tau) -> np.ndarray:
    """Component of F in H^{2,1} + H^{1,2}, in a unitary frame (weights 1/binom(3,k))."""
    c = hodge_coefficients(F, tau)
    y = complex(tau).imag
    # |X - tau Y| has Hodge norm ~ sqrt(2y); normalize each monomial accordingly
    w = np.array([1.0, 1 / math.sqrt(3), 1 / math.sqrt(3), 1.0]) * (2 * y) ** 1.5
    return (c * w)[1:3]


def hodge_oracle(gamma, tau) -> float:
    """Relative size of the (2,1)+(1,2) part; zero exactly at BPS attractor points."""
    F = cubic_from_charge(gamma) if isinstance(gamma, ChargeVector) else gamma
    c = hodge_coefficients(F, tau)
    y = complex(tau).imag
    w = np.array([1.0, 1 / math.sqrt(3), 1 / math.sqrt(3), 1.0]) * (2 * y) ** 1.5
    v = c * w
    total = np.linalg.norm(v)
    return float(np.linalg.norm(v[1:3]) / total) if total else 0.0


# ---------------------------------------------------------------------------
# fundamental domain and class keys

S_MAT = ((0, -1), (1, 0))


def _mul(g, h):
    return ((g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
            (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]))


def reduce_point(tau: complex, tol: float = 1e-11):
    """(g, g.tau) with g in SL2(Z) and g.tau in the standard fundamental domain.

    Boundary convention: Re < 1/2 strictly, and |tau| = 1 forces Re <= 0.
    """
    g = ((1, 0), (0, 1))
    z = complex(tau)
    for _ in range(10000):
        n = math.floor(z.real + 0.5)
        if n:
            T = ((1, -n), (0, 1))
            g = _mul(T, g)
            z = z - n
        if abs(z) < 1 - tol:
            g = _mul(S_MAT, g)
            z = -1 / z
            continue
        break
    else:
        raise NumericFailure("reduction did not terminate")
    if z.real >= 0.5 - tol:
        T = ((1, -1), (0, 1))
        g, z = _mul(T, g), z - 1
    if abs(abs(z) - 1) <= tol and z.real > tol:
        g, z = _mul(S_MAT, g), -1 / z
    return g, z


def in_fundamental_domain(tau: complex, tol: float = 1e-9) -> bool:
    z = complex(tau)
    if z.imag <= 0 or z.real >= 0.5 + tol or z.real < -0.5 - tol:
        return False
    if abs(z) < 1 - tol:
        return False
    if abs(abs(z) - 1) <= tol and z.real > tol:
        return False
    return True


def _stabilizer(z: complex, tol: float = 1e-9):
    gens = [((1, 0), (0, 1))]
    if abs(z - 1j) < tol:
        gens.append(S_MAT)
    rho = complex(-0.5, math.sqrt(3) / 2)
    if abs(z - rho) < tol:
        ST = _mul(S_MAT, ((1, 1), (0, 1)))
        gens += [ST, _mul(ST, ST)]
    return gens


def canonical_form(F: BinaryCubicForm, point: complex) -> tuple:
    """Minimal coefficient tuple over the stabilizer of an already reduced point and +-1."""
    best = None
    for h in _stabilizer(point):
        G = group_action_sl2(h, F)
        for sgn in (1, -1):
            key = tuple(sgn * v for v in G.coeffs)
            if best is None or key < best:
                best = key
    return best


def attractor_point(F) -> complex:
    D = _disc_of(F)
    if D < 0:
        return nonbps_point(F).tau
    if D > 0:
        t = exact_bps_tau(F)
        return complex(t)
    raise WrongClass("zero discriminant")


def exact_bps_tau(F):
    from .bps_attractor import solve_bps
    return solve_bps(cubic_dictionary(F)).t[0]


@dataclass(frozen=True)
class FormClass:
    form: BinaryCubicForm
    disc: int
    tau: complex

    @property
    def tag(self) -> str:
        return "nonBPS" if self.disc < 0 else "BPS"

    def csv_row(self) -> list:
        f = self.form
        return [f.a, f.b, f.c, f.d, self.disc, repr(self.tau.real), repr(self.tau.imag), self.tag]


def class_key(F: BinaryCubicForm) -> FormClass:
    """Reduce the attractor point of F into the fundamental domain and canonicalize."""
    tau = attractor_point(F)
    g, z = reduce_point(tau)
    G = group_action_sl2(g, F)
    z = attractor_point(G) if _near_boundary(z) else z
    key = canonical_form(G, z)
    return FormClass(BinaryCubicForm(*key), F.disc, complex(z.real + 0.0, z.imag))


def _near_boundary(z, tol=1e-6):
    return abs(abs(z.real) - 0.5) < tol or abs(abs(z) - 1) < tol


# ---------------------------------------------------------------------------
# enumeration

THETA_CONST = 8 / math.sqrt(27)    # min_P prod h_P(L_k) = THETA_CONST * sqrt|Disc|


def _julia_theta(F, P: H3Point) -> float:
    """prod_k h_P(L_k) for F = prod L_k; SL2(C)-invariant, equals |a|^2 F1 when a != 0."""
    a = _coeffs(F)[0]
    if a == 0:
        raise ValueError("use a form with a != 0")
    return float(abs(a)) ** 2 * julia_F1(F, P)


def _nonbps_vec(a, b, c, d):
    """Vectorized non-BPS point for arrays with a != 0 and Disc < 0."""
    a = a.astype(float)
    b = b.astype(float)
    c = c.astype(float)
    d = d.astype(float)
    # depressed cubic y^3 + P y + Q with x = y - b/(3a)
    P = (3 * a * c - b * b) / (3 * a * a)
    Qd = (2 * b ** 3 - 9 * a * b * c + 27 * a * a * d) / (27 * a ** 3)
    D0 = Qd * Qd / 4 + P ** 3 / 27
    sq = np.sqrt(np.maximum(D0, 0.0))
    u = np.cbrt(-Qd / 2 - np.where(Qd >= 0, 1.0, -1.0) * sq)
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.where(u != 0, u - P / (3 * np.where(u != 0, u, 1.0)), 0.0)
    al = y - b / (3 * a)
    for _ in range(3):
        f = ((a * al + b) * al + c) * al + d
        fp = (3 * a * al + 2 * b) * al + c
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(fp != 0, f / np.where(fp != 0, fp, 1.0), 0.0)
        al = al - step
    P0, P1, Q1, Q0 = d, c, b, -3 * a
    h0 = Q0 * Q0 * al * al - 2 * Q0 * Q1 * al - 2 * P1 * Q0 - Q1 * Q1
    h1 = -2 * Q0 * Q1 * al * al + (6 * Q1 * Q1 + 2 * Q0 * P1) * al + 2 * P1 * Q1
    h2 = -P1 * Q0 * al * al + 3 * (P1 * Q1 + P0 * Q0) * al + 2 * P1 * P1 - 3 * P0 * Q1
    x = -h1 / (2 * h0)
    yy = np.sqrt(np.maximum(4 * h0 * h2 - h1 * h1, 0.0)) / (2 * np.abs(h0))
    return x, yy


def _bps_vec(a, b, c, d):
    """Vectorized BPS point from the closed-form lift (J = Q)."""
    a, b, c, d = (v.astype(float) for v in (a, b, c, d))
    p0, p, q, q0 = a, -b / 3, c / 3, d
    r = disc(a, b, c, d) / 27
    W = p0 * q0 + 3 * p * q
    g0 = 4 * p ** 3 - 2 * W * p0
    g1 = -4 * p0 * q * q + 8 * q * p * p - 2 * W * p
    s = 1 / (2 * np.sqrt(r))
    X0 = p0 - 1j * g0 * s
    X1 = p - 1j * g1 * s
    t = X1 / X0
    return t.real, t.imag


def _candidate_boxes(bound: int):
    theta = THETA_CONST * math.sqrt(bound)
    rt = math.sqrt(theta)
    u_min = math.sqrt(3) / 2
    amax = int(math.floor(rt * u_min ** -1.5 + 1e-9))
    return theta, rt, u_min, amax


def _d_range_vec(a, b, c, bound, sign):
    """Integer d interval such that 0 < sign*Disc <= bound, as (lo, hi) float arrays."""
    A = -27.0 * a * a
    B = 18.0 * a * b * c - 4.0 * b ** 3
    C = b * b * c * c - 4.0 * a * c ** 3
    lo = np.full(a.shape, np.inf)
    hi = np.full(a.shape, -np.inf)
    quad = a != 0
    if np.any(quad):
        # sign=-1: Disc >= -bound ; sign=+1: Disc > 0
        target = -bound if sign < 0 else 0.0
        Aq, Bq, Cq = A[quad], B[quad], C[quad] - target
        dsc = Bq * Bq - 4 * Aq * Cq
        ok = dsc >= 0
        s = np.sqrt(np.maximum(dsc, 0))
        r1 = (-Bq + s) / (2 * Aq)
        r2 = (-Bq - s) / (2 * Aq)
        l = np.minimum(r1, r2)
        h = np.maximum(r1, r2)
        lo[quad] = np.where(ok, l, np.inf)
        hi[quad] = np.where(ok, h, -np.inf)
    lin = ~quad
    if np.any(lin):
        # a = 0: Disc = b^2 c^2 - 4 b^3 d, linear in d
        bb, cc = b[lin], c[lin]
        slope = -4.0 * bb ** 3
        base = bb * bb * cc * cc
        if sign < 0:
            e1 = (-bound - base) / slope
            e2 = (0 - base) / slope
        else:
            e1 = (0 - base) / slope
            e2 = (bound - base) / slope
        lo[lin] = np.minimum(e1, e2)
        hi[lin] = np.maximum(e1, e2)
    return lo, hi


CHUNK_ROWS = 2_000_000


def _candidate_chunks(bound: int, sign: int):
    """Integer forms, a >= 0 (b > 0 when a = 0), containing every reduced representative.

    Yields int64 (m, 4) blocks of at most ~CHUNK_ROWS rows; for a = 0 and small b
    the box is long in d, and the full set does not fit in memory past ~3e4.
    """
    theta, rt, u_min, amax = _candidate_boxes(bound)
    for a in range(0, amax + 1):
        if a > 0:
            U = (rt / a) ** (2.0 / 3.0)
            bmax = 3 * rt * (u_min ** -0.5 + 0.5 * u_min ** -1.5)
            bs = np.arange(-math.floor(bmax), math.floor(bmax) + 1)
        else:
            bmax = 3 * rt * u_min ** -0.5
            bs = np.arange(1, math.floor(bmax) + 1)
        for b in bs:
            if a == 0:
                U = 9 * theta / float(b * b)
            cmax = 3 * rt * (U ** 0.5 + 2 * 0.5 * U ** -0.5 + 0.25 * U ** -1.5) \
                if U >= u_min else 3 * rt * (u_min ** 0.5 + u_min ** -0.5 + 0.25 * u_min ** -1.5)
            cmax = max(cmax, 3 * rt * (u_min ** 0.5 + u_min ** -0.5 + 0.25 * u_min ** -1.5))
            cs = np.arange(-math.floor(cmax), math.floor(cmax) + 1, dtype=np.int64)
            av = np.full(cs.shape, a, dtype=np.int64)
            bv = np.full(cs.shape, b, dtype=np.int64)
            lo, hi = _d_range_vec(av.astype(float), bv.astype(float), cs.astype(float), bound, sign)
            Um = max(U, u_min)
            dmax = rt * (Um ** 1.5 + 1.5 * Um ** 0.5 + 0.75 * Um ** -0.5 + 0.125 * Um ** -1.5)
            lo = np.maximum(np.ceil(lo - 1e-9), -math.floor(dmax) - 1)
            hi = np.minimum(np.floor(hi + 1e-9), math.floor(dmax) + 1)
            n = np.maximum(hi - lo + 1, 0).astype(np.int64)
            # split the c range so each block stays small
            cum = np.cumsum(n)
            start = 0
            while start < cs.size:
                stop = max(int(np.searchsorted(cum, cum[start] - n[start] + CHUNK_ROWS, side="right")),
                           start + 1)
                nn = n[start:stop]
                if nn.sum():
                    rep = np.repeat(np.arange(start, stop), nn)
                    offs = np.arange(nn.sum()) - np.repeat(np.cumsum(nn) - nn, nn)
                    dv = (lo[rep] + offs).astype(np.int64)
                    yield np.stack([av[rep], bv[rep], cs[rep], dv], axis=1)
                start = stop


def _candidates(bound: int, sign: int):
    chunks = list(_candidate_chunks(bound, sign))
    return np.concatenate(chunks) if chunks else np.zeros((0, 4), dtype=np.int64)


def _reduced_rows(cand, bound, sign):
    """Rows with 0 < sign*Disc <= bound whose attractor point is already in F."""
    a, b, c, d = (cand[:, i] for i in range(4))
    D = (18 * a * b * c * d - 4 * b ** 3 * d + b * b * c * c - 4 * a * c ** 3 - 27 * a * a * d * d)
    keep = (sign * D > 0) & (sign * D <= bound)
    cand = cand[keep]
    a, b, c, d = (cand[:, i] for i in range(4))
    x = np.full(a.shape, np.nan)
    y = np.full(a.shape, np.nan)
    nz = a != 0
    vec = _nonbps_vec if sign < 0 else _bps_vec
    if np.any(nz):
        x[nz], y[nz] = vec(a[nz], b[nz], c[nz], d[nz])
    if np.any(~nz):
        # apply S: S.F has coefficients (-d, c, -b, a); the point moves back by -1/tau
        xs, ys = vec(-d[~nz], c[~nz], -b[~nz], a[~nz])
        z = -1 / (xs + 1j * ys)
        x[~nz], y[~nz] = z.real, z.imag
    tol = 1e-7
    inF = (np.abs(x) <= 0.5 + tol) & (x * x + y * y >= 1 - tol) & (y > 0)
    return cand[inF]


def enumerate_forms(bound: int, sign: int = -1, pretwist=None) -> list[FormClass]:
    """SL2(Z) classes of integer binary cubics with 0 < sign*Disc <= bound.

    Candidates come from a box that provably contains a representative whose
    attractor point lies in the fundamental domain; duplicates are merged by
    the canonical form at the reduced point.  ``pretwist`` (an SL2(Z) element)
    is applied to every candidate first; it must not change the result.
    """
    if bound < 1:
        raise ValueError("bound must be positive")
    rows = [_reduced_rows(ch, bound, sign) for ch in _candidate_chunks(bound, sign)]
    rows = [r for r in rows if len(r)]
    reduced = np.concatenate(rows) if rows else np.zeros((0, 4), dtype=np.int64)
    classes: dict = {}
    for row in reduced:
        F = BinaryCubicForm(*(int(v) for v in row))
        if pretwist is not None:
            F = group_action_sl2(pretwist, F)
        fc = class_key(F)
        classes.setdefault(fc.form.coeffs, fc)
    return sorted(classes.values(), key=lambda fc: (abs(fc.disc), fc.form.coeffs))


def forms_to_csv(classes, path) -> None:
    import csv
    import os
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "b", "c", "d", "disc", "x", "y", "tag"])
        for fc in classes:
            w.writerow(fc.csv_row())
    os.replace(tmp, path)
