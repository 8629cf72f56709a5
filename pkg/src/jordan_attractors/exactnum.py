"""Exact scalars: rationals, elements of Q(sqrt D), and Cayley-Dickson algebras over Q.

Rationals are plain ``fractions.Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence


def Q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("refusing to build an exact rational from a float")
    return Fraction(x)


def squarefree_split(n: int) -> tuple[int, int]:
    """n = k^2 * core with core squarefree (sign kept on core)."""
    if n == 0:
        raise ValueError("zero has no squarefree core")
    sign = -1 if n < 0 else 1
    m = abs(n)
    k = 1
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            k *= p
        p += 1 if p == 2 else 2
    return k, sign * m


def rational_sqrt_split(r: Fraction) -> tuple[Fraction, int]:
    """sqrt(r) = c * sqrt(D) with c rational, D squarefree integer."""
    r = Q(r)
    num, den = r.numerator, r.denominator
    # sqrt(num/den) = sqrt(num*den)/den
    k, core = squarefree_split(num * den)
    return Fraction(k, den), core


class FieldMismatch(ValueError):
    pass


@dataclass(frozen=True)
class QuadFieldElem:
    """a + b*sqrt(D), D squarefree."""

    a: Fraction
    b: Fraction
    D: int

    def __post_init__(self):
        object.__setattr__(self, "a", Q(self.a))
        object.__setattr__(self, "b", Q(self.b))
        if self.D in (0, 1):
            raise ValueError("D must be squarefree and not 0 or 1")
        k, core = squarefree_split(self.D)
        if k != 1:
            object.__setattr__(self, "b", self.b * k)
            object.__setattr__(self, "D", core)

    @classmethod
    def rational(cls, r, D: int) -> "QuadFieldElem":
        return cls(Q(r), Fraction(0), D)

    def _coerce(self, other) -> "QuadFieldElem":
        if isinstance(other, QuadFieldElem):
            if other.D != self.D:
                raise FieldMismatch(f"Q(sqrt {self.D}) vs Q(sqrt {other.D})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadFieldElem(Q(other), Fraction(0), self.D)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadFieldElem(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadFieldElem(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadFieldElem(self.a - o.a, self.b - o.b, self.D)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadFieldElem(self.a * o.a + self.D * self.b * o.b,
                             self.a * o.b + self.b * o.a, self.D)

    __rmul__ = __mul__

    def conj(self) -> "QuadFieldElem":
        return QuadFieldElem(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.D * self.b * self.b

    def inverse(self) -> "QuadFieldElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in a quadratic field")
        c = self.conj()
        return QuadFieldElem(c.a / n, c.b / n, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadFieldElem(Fraction(1), Fraction(0), self.D)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadFieldElem):
            return self.D == other.D and self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __complex__(self):
        s = complex(self.D) ** 0.5
        return complex(float(self.a)) + float(self.b) * s

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt({self.D}))"

    def to_json(self) -> dict:
        return {"a": rational_to_json(self.a), "b": rational_to_json(self.b), "D": self.D}

    @classmethod
    def from_json(cls, d: dict) -> "QuadFieldElem":
        return cls(rational_from_json(d["a"]), rational_from_json(d["b"]), int(d["D"]))


def quad_arith(x: QuadFieldElem, y: QuadFieldElem | None, op: str) -> QuadFieldElem:
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "conj":
        return x.conj()
    raise ValueError(f"unknown op {op!r}")


def rational_to_json(r) -> dict:
    r = Q(r)
    return {"num": str(r.numerator), "den": str(r.denominator)}


def rational_from_json(d: dict) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


# ---------------------------------------------------------------------------
# Composition algebras via Cayley-Dickson doubling.
#
# An element of the doubled algebra is a pair (u, v) with
#   (u, v)(w, z) = (u w + g * conj(z) v,  z u + v conj(w)),
#   conj(u, v)   = (conj(u), -v),
# and norm(u, v) = n(u) - g n(v).  Coordinates are stored flat: the first
# half is u, the second half is v.  Parameters are applied innermost first.

KIND_DIMS = {"rational": 1, "imaginary_quadratic": 2, "quaternion": 4, "octonion": 8}
DEFAULT_PARAMS = {"rational": (), "imaginary_quadratic": (-1,), "quaternion": (-1, -1),
                  "octonion": (-1, -1, -1)}


class IncompatibleAlgebra(ValueError):
    pass


def _cd_mul(x: Sequence, y: Sequence, params: Sequence) -> list:
    n = len(x)
    if n == 1:
        return [x[0] * y[0]]
    h = n // 2
    g = params[-1]
    inner = params[:-1]
    u, v = x[:h], x[h:]
    w, z = y[:h], y[h:]
    zc = _cd_conj(z)
    wc = _cd_conj(w)
    left = [s + g * t for s, t in zip(_cd_mul(u, w, inner), _cd_mul(zc, v, inner))]
    right = [s + t for s, t in zip(_cd_mul(z, u, inner), _cd_mul(v, wc, inner))]
    return left + right


def _cd_conj(x: Sequence) -> list:
    if len(x) == 1:
        return [x[0]]
    return [x[0]] + [-c for c in x[1:]]


def _cd_norm(x: Sequence, params: Sequence):
    # n(u, v) = n(u) - g n(v)
    n = len(x)
    if n == 1:
        return x[0] * x[0]
    h = n // 2
    return _cd_norm(x[:h], params[:-1]) - params[-1] * _cd_norm(x[h:], params[:-1])


@dataclass(frozen=True)
class CompositionElem:
    kind: str
    params: tuple
    coords: tuple

    def __post_init__(self):
        if self.kind not in KIND_DIMS:
            raise ValueError(f"unknown algebra kind {self.kind}")
        if len(self.coords) != KIND_DIMS[self.kind]:
            raise ValueError("coordinate length does not match algebra dimension")
        if len(self.params) != {1: 0, 2: 1, 4: 2, 8: 3}[KIND_DIMS[self.kind]]:
            raise ValueError("wrong number of Cayley-Dickson parameters")

    @classmethod
    def make(cls, kind: str, coords, params=None):
        params = tuple(DEFAULT_PARAMS[kind] if params is None else params)
        return cls(kind, tuple(Q(p) for p in params), tuple(Q(c) for c in coords))

    def _check(self, other):
        if not isinstance(other, CompositionElem) or other.kind != self.kind \
                or other.params != self.params:
            raise IncompatibleAlgebra(f"{self.kind}{self.params} vs "
                                      f"{getattr(other, 'kind', type(other))}")

    def __add__(self, other):
        self._check(other)
        return CompositionElem(self.kind, self.params,
                               tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return CompositionElem(self.kind, self.params,
                               tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return CompositionElem(self.kind, self.params, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CompositionElem(self.kind, self.params, tuple(a * other for a in self.coords))
        return comp_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def conj(self):
        return CompositionElem(self.kind, self.params, tuple(_cd_conj(self.coords)))

    def norm(self) -> Fraction:
        return _cd_norm(self.coords, self.params)

    def trace(self) -> Fraction:
        return 2 * self.coords[0]

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": [rational_to_json(p) for p in self.params],
                "coords": [rational_to_json(c) for c in self.coords]}


def comp_mul(x: CompositionElem, y: CompositionElem) -> CompositionElem:
    x._check(y)
    return CompositionElem(x.kind, x.params, tuple(_cd_mul(x.coords, y.coords, x.params)))


def basis_elem(kind: str, k: int, params=None) -> CompositionElem:
    c = [0] * KIND_DIMS[kind]
    c[k] = 1
    return CompositionElem.make(kind, c, params)
