"""Freudenthal triple system V_J = Q + J + J^v + Q.

Charges carry q in Jordan coordinates; the covector components are G q with
G the trace Gram matrix.  Sign conventions:

    omega(v, w) = p0 q0' + (p, q') - (q, p') - q0 p0'
    I4 = -4 p0 N(q) + 4 q0 N(p) + 4 (q^#, p^#) - (p0 q0 + (p, q))^2

For J = Q a binary cubic aX^3 + bX^2Y + cXY^2 + dY^3 sits at
(p0, p, q, q0) = (a, -b/3, c/3, d).  Then the central charge on the
period vector (1, t, t^2, -t^3) is -F(t, 1) and I4 = Disc(F) / 27.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .exactnum import Q, rational_from_json, rational_to_json
from .jordan import CubicNormStructure, build_rational


@dataclass(frozen=True, eq=False)
class ChargeVector:
    J: CubicNormStructure
    p0: object
    p: tuple
    q: tuple
    q0: object

    def __post_init__(self):
        if len(self.p) != self.J.dimension or len(self.q) != self.J.dimension:
            raise ValueError("charge components do not match the Jordan dimension")
        object.__setattr__(self, "p", tuple(self.p))
        object.__setattr__(self, "q", tuple(self.q))

    @classmethod
    def make(cls, J, p0=0, p=None, q=None, q0=0) -> "ChargeVector":
        z = [Fraction(0)] * J.dimension
        p = z if p is None else [Q(v) for v in p]
        q = z if q is None else [Q(v) for v in q]
        return cls(J, Q(p0), tuple(p), tuple(q), Q(q0))

    def __eq__(self, other):
        return (isinstance(other, ChargeVector) and self.J is other.J
                and (self.p0, self.p, self.q, self.q0) == (other.p0, other.p, other.q, other.q0))

    def __hash__(self):
        return hash((self.p0, self.p, self.q, self.q0))

    def scale(self, s) -> "ChargeVector":
        return ChargeVector(self.J, s * self.p0, tuple(s * v for v in self.p),
                            tuple(s * v for v in self.q), s * self.q0)

    def __add__(self, other):
        return ChargeVector(self.J, self.p0 + other.p0,
                            tuple(a + b for a, b in zip(self.p, other.p)),
                            tuple(a + b for a, b in zip(self.q, other.q)), self.q0 + other.q0)

    def __neg__(self):
        return self.scale(-1)

    @property
    def q_dual(self) -> list:
        return self.J.to_dual(self.q)

    def flat(self) -> list:
        return [self.p0, *self.p, *self.q, self.q0]

    def to_json(self) -> dict:
        return {"p0": rational_to_json(self.p0), "p": [rational_to_json(v) for v in self.p],
                "q": [rational_to_json(v) for v in self.q], "q0": rational_to_json(self.q0)}

    @classmethod
    def from_json(cls, J, d: dict) -> "ChargeVector":
        return cls.make(J, rational_from_json(d["p0"]), [rational_from_json(v) for v in d["p"]],
                        [rational_from_json(v) for v in d["q"]], rational_from_json(d["q0"]))

    def __repr__(self):
        f = lambda v: str(v)
        return (f"Charge(p0={f(self.p0)}, p=[{', '.join(map(f, self.p))}], "
                f"q=[{', '.join(map(f, self.q))}], q0={f(self.q0)})")


class ChargeClass(str, Enum):
    BPS = "BPS"
    NONBPS = "nonBPS"
    DEGENERATE = "degenerate"


def symplectic(v: ChargeVector, w: ChargeVector):
    J = v.J
    return v.p0 * w.q0 + J.pair(v.p, w.q) - J.pair(v.q, w.p) - v.q0 * w.p0


def quartic_I4(v: ChargeVector):
    J = v.J
    w = v.p0 * v.q0 + J.pair(v.p, v.q)
    return (-4 * v.p0 * J.norm(v.q) + 4 * v.q0 * J.norm(v.p)
            + 4 * J.pair(J.sharp(v.q), J.sharp(v.p)) - w * w)


def grad_I4(v: ChargeVector) -> dict:
    """Partial derivatives of I4.

    'p0', 'q0' are scalars.  'q' is the derivative with respect to the
    covector components of q, returned as a J-vector; 'p' is the derivative
    with respect to the Jordan coordinates of p pulled back to a J-vector the
    same way (i.e. G^{-1} d/dp).
    """
    J = v.J
    w = v.p0 * v.q0 + J.pair(v.p, v.q)
    ps, qs = J.sharp(v.p), J.sharp(v.q)
    q_x_ps = J.cross(v.q, ps)
    p_x_qs = J.cross(v.p, qs)
    dq = [-4 * v.p0 * a + 4 * b - 2 * w * c for a, b, c in zip(qs, q_x_ps, v.p)]
    dp = [4 * v.q0 * a + 4 * b - 2 * w * c for a, b, c in zip(ps, p_x_qs, v.q)]
    return {"p0": -4 * J.norm(v.q) - 2 * w * v.q0,
            "q0": 4 * J.norm(v.p) - 2 * w * v.p0,
            "p": dp, "q": dq}


def classify(v: ChargeVector) -> ChargeClass:
    r = quartic_I4(v)
    if r > 0:
        return ChargeClass.BPS
    if r < 0:
        return ChargeClass.NONBPS
    return ChargeClass.DEGENERATE


def random_charge(J: CubicNormStructure, rng: random.Random, lo=-9, hi=9) -> ChargeVector:
    n = J.dimension
    return ChargeVector.make(J, rng.randint(lo, hi), [rng.randint(lo, hi) for _ in range(n)],
                             [rng.randint(lo, hi) for _ in range(n)], rng.randint(lo, hi))


# ---------------------------------------------------------------------------
# Binary cubic forms (J = Q)

@dataclass(frozen=True)
class BinaryCubicForm:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if (self.a, self.b, self.c, self.d) == (0, 0, 0, 0):
            raise ValueError("zero form")

    @property
    def coeffs(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    @property
    def disc(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        return 18 * a * b * c * d - 4 * b ** 3 * d + b * b * c * c - 4 * a * c ** 3 - 27 * a * a * d * d

    def __call__(self, X, Y=1):
        return self.a * X ** 3 + self.b * X * X * Y + self.c * X * Y * Y + self.d * Y ** 3

    def to_json(self) -> dict:
        return {k: _num_json(getattr(self, k)) for k in "abcd"}

    def __neg__(self):
        return BinaryCubicForm(-self.a, -self.b, -self.c, -self.d)


def _num_json(v):
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return rational_to_json(v)
    return float(v)


def disc(a, b, c, d):
    return 18 * a * b * c * d - 4 * b ** 3 * d + b * b * c * c - 4 * a * c ** 3 - 27 * a * a * d * d


_TQ = None


def t3_model() -> CubicNormStructure:
    global _TQ
    if _TQ is None:
        _TQ = build_rational()
    return _TQ


def cubic_dictionary(F: BinaryCubicForm) -> ChargeVector:
    J = t3_model()
    return ChargeVector.make(J, F.a, [Fraction(-F.b, 3)], [Fraction(F.c, 3)], F.d)


def cubic_from_charge(v: ChargeVector) -> BinaryCubicForm:
    if v.J.dimension != 1:
        raise ValueError("cubic dictionary needs the rank-one model J = Q")
    vals = (v.p0, -3 * v.p[0], 3 * v.q[0], v.q0)
    if any(Q(x).denominator != 1 for x in vals):
        raise ValueError("charge does not correspond to an integral form")
    return BinaryCubicForm(*(int(x) for x in vals))


def calibration_constant() -> Fraction:
    """c with I4(gamma_F) = c Disc(F), read off from x^3 + y^3."""
    F = BinaryCubicForm(1, 0, 0, 1)
    return Fraction(quartic_I4(cubic_dictionary(F))) / F.disc


def _check_sl2(g):
    (a, b), (c, d) = g
    det = a * d - b * c
    exact = all(isinstance(x, (int, Fraction)) for row in g for x in row)
    if (det != 1) if exact else abs(det - 1) > 1e-9:
        raise ValueError(f"det g = {det}, expected 1")


def group_action_sl2(g, F):
    """(g.F)(v) = F(g^{-1} v).  Works for integer forms or real coefficient tuples."""
    _check_sl2(g)
    (A, B), (C, D) = g
    # g^{-1} = [[D, -B], [-C, A]]; X -> D X - B Y, Y -> -C X + A Y
    a, b, c, d = F.coeffs if isinstance(F, BinaryCubicForm) else F
    l1 = (D, -B)   # coefficients of X, Y in the new X
    l2 = (-C, A)
    out = _expand(a, b, c, d, l1, l2)
    if isinstance(F, BinaryCubicForm):
        return BinaryCubicForm(*out)
    return tuple(out)


def _expand(a, b, c, d, l1, l2):
    """Coefficients of a L1^3 + b L1^2 L2 + c L1 L2^2 + d L2^3 in X, Y."""
    def mul(P, Lin):
        out = [0] * (len(P) + 1)
        for i, coef in enumerate(P):
            out[i] += coef * Lin[0]
            out[i + 1] += coef * Lin[1]
        return out
    res = [0, 0, 0, 0]
    for coef, k in ((a, 3), (b, 2), (c, 1), (d, 0)):
        P = [1]
        for _ in range(k):
            P = mul(P, l1)
        for _ in range(3 - k):
            P = mul(P, l2)
        res = [r + coef * pp for r, pp in zip(res, P)]
    return res


def act_on_charge(g, v: ChargeVector) -> ChargeVector:
    return cubic_dictionary(group_action_sl2(g, cubic_from_charge(v)))


def random_sl2z(rng: random.Random, steps: int = 6):
    """Random word in S and T^k."""
    g = ((1, 0), (0, 1))
    for _ in range(steps):
        k = rng.randint(-3, 3)
        T = ((1, k), (0, 1))
        S = ((0, -1), (1, 0))
        for h in (T, S):
            g = ((g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
                 (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]))
    return g
