"""Cubic norm structures of degree 3.

A structure is stored as a sparse cubic polynomial N (monomials i<=j<=k),
the trace Gram matrix, a unit vector and the sharp map as sparse quadratics
x^# = G^{-1} grad N(x).  Every polynomial evaluates over any ring that
supports + and *, so the same data serves Fractions, floats, complex numbers
and quadratic-field elements.

Normalization: the trilinear form satisfies (x, x, x) = 6 N(x).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from .exactnum import (DEFAULT_PARAMS, KIND_DIMS, CompositionElem, Q, _cd_mul, _cd_norm,
                       rational_to_json)


def _mat_inv(G: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(G)
    A = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(G)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise ValueError("trace form is degenerate")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [v * inv for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [row[n:] for row in A]


@dataclass(frozen=True, eq=False)
class CubicNormStructure:
    family: str
    params: tuple
    dimension: int
    labels: tuple
    unit: tuple
    norm_poly: dict            # (i,j,k) with i<=j<=k -> coefficient of x_i x_j x_k
    gram: tuple                # tuple of tuples of Fractions
    _gram_inv: tuple = field(repr=False, default=())
    _sharp: tuple = field(repr=False, default=())      # per output: ((i,j,c), ...)
    _grad: tuple = field(repr=False, default=())       # per output: ((i,j,c), ...) of dN/dx_l

    @classmethod
    def build(cls, family, params, labels, unit, norm_poly, gram):
        n = len(labels)
        norm_poly = {k: Q(v) for k, v in norm_poly.items() if v != 0}
        gram = tuple(tuple(Q(v) for v in row) for row in gram)
        ginv = tuple(tuple(r) for r in _mat_inv([list(r) for r in gram]))
        grad = _gradient(norm_poly, n)
        sharp = []
        for l in range(n):
            acc: dict = {}
            for m in range(n):
                g = ginv[l][m]
                if g == 0:
                    continue
                for (i, j), c in grad[m].items():
                    acc[(i, j)] = acc.get((i, j), 0) + g * c
            sharp.append(tuple((i, j, c) for (i, j), c in sorted(acc.items()) if c != 0))
        grad_t = tuple(tuple((i, j, c) for (i, j), c in sorted(g.items())) for g in grad)
        return cls(family, tuple(params), n, tuple(labels), tuple(Q(u) for u in unit),
                   norm_poly, gram, ginv, tuple(sharp), grad_t)

    # -- polynomial evaluation (ring agnostic) --------------------------------
    def norm(self, x: Sequence):
        s = 0
        for (i, j, k), c in self.norm_poly.items():
            s = s + c * x[i] * x[j] * x[k]
        return s

    def sharp(self, x: Sequence) -> list:
        out = []
        for terms in self._sharp:
            s = 0
            for i, j, c in terms:
                s = s + c * x[i] * x[j]
            out.append(s)
        return out

    def grad_norm(self, x: Sequence) -> list:
        out = []
        for terms in self._grad:
            s = 0
            for i, j, c in terms:
                s = s + c * x[i] * x[j]
            out.append(s)
        return out

    def pair(self, x: Sequence, y: Sequence):
        """Trace form (x, y)."""
        s = 0
        for i, j, g in self._gram_sparse:
            s = s + g * x[i] * y[j]
        return s

    @property
    def _gram_sparse(self):
        hit = _SPARSE.get(id(self))
        if hit is None or hit[0] is not self:
            nz = tuple((i, j, v) for i, row in enumerate(self.gram)
                       for j, v in enumerate(row) if v != 0)
            hit = (self, nz)
            _SPARSE[id(self)] = hit
        return hit[1]

    def cross(self, x: Sequence, y: Sequence) -> list:
        xy = [a + b for a, b in zip(x, y)]
        return [a - b - c for a, b, c in zip(self.sharp(xy), self.sharp(x), self.sharp(y))]

    def trilinear(self, x: Sequence, y: Sequence, z: Sequence):
        # (x,y,z) = (x × y, z): polarization of (x^#, z) = (x,x,z)/2
        return self.pair(self.cross(x, y), z)

    def to_dual(self, x: Sequence) -> list:
        """Jordan coordinates -> covector components G x."""
        G = self.gram
        return [sum((G[i][j] * x[j] for j in range(self.dimension) if G[i][j] != 0), 0 * x[0])
                for i in range(self.dimension)]

    def from_dual(self, v: Sequence) -> list:
        Gi = self._gram_inv
        return [sum((Gi[i][j] * v[j] for j in range(self.dimension) if Gi[i][j] != 0), 0 * v[0])
                for i in range(self.dimension)]

    def zero(self) -> list:
        return [Fraction(0)] * self.dimension

    # -- numeric views ----------------------------------------------------------
    @property
    def gram_np(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.gram])

    @property
    def gram_inv_np(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self._gram_inv])

    @property
    def tensor_np(self) -> np.ndarray:
        """Symmetric d_ijk with N(x) = sum_ijk d_ijk x_i x_j x_k (cached)."""
        return _tensor_cache(self)

    def norm_tensor(self) -> list[tuple]:
        """Sparse symmetric entries (i,j,k,d_ijk) with i<=j<=k."""
        out = []
        for (i, j, k), c in sorted(self.norm_poly.items()):
            out.append((i, j, k, c / _multiplicity(i, j, k)))
        return out

    def to_json(self) -> dict:
        return {"family": self.family, "params": [str(p) for p in self.params],
                "dimension": self.dimension,
                "norm_tensor": [[i, j, k, rational_to_json(v)]
                                for i, j, k, v in self.norm_tensor()]}

    def random_element(self, rng: random.Random) -> list[Fraction]:
        return [Fraction(rng.randint(-9, 9), rng.choice((1, 2, 3))) for _ in range(self.dimension)]

    def mpq_view(self) -> "CubicNormStructure":
        """Same structure with gmpy2 rationals as coefficients (fast exact checks)."""
        conv = lambda c: mpq(c.numerator, c.denominator)
        return CubicNormStructure(
            self.family, self.params, self.dimension, self.labels,
            tuple(conv(u) for u in self.unit),
            {k: conv(v) for k, v in self.norm_poly.items()},
            tuple(tuple(conv(v) for v in row) for row in self.gram),
            tuple(tuple(conv(v) for v in row) for row in self._gram_inv),
            tuple(tuple((i, j, conv(c)) for i, j, c in t) for t in self._sharp),
            tuple(tuple((i, j, conv(c)) for i, j, c in t) for t in self._grad))

    def with_norm_poly(self, norm_poly: dict) -> "CubicNormStructure":
        """Same family data with a different norm polynomial (sharp recomputed)."""
        return CubicNormStructure.build(self.family, self.params, self.labels, self.unit,
                                        norm_poly, self.gram)


def _multiplicity(i, j, k) -> int:
    if i == j == k:
        return 1
    if i == j or j == k or i == k:
        return 3
    return 6


def _gradient(norm_poly: dict, n: int) -> list[dict]:
    grad = [dict() for _ in range(n)]
    for (i, j, k), c in norm_poly.items():
        idx = (i, j, k)
        for pos in range(3):
            l = idx[pos]
            rest = tuple(sorted(idx[:pos] + idx[pos + 1:]))
            grad[l][rest] = grad[l].get(rest, 0) + c
    return grad


_TENSORS: dict = {}
_SPARSE: dict = {}


def _tensor_cache(J: CubicNormStructure) -> np.ndarray:
    key = id(J)
    hit = _TENSORS.get(key)
    if hit is not None and hit[0] is J:
        return hit[1]
    n = J.dimension
    d = np.zeros((n, n, n))
    for (i, j, k), c in J.norm_poly.items():
        v = float(c) / _multiplicity(i, j, k)
        for a, b, e in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
            d[a, b, e] = v
    _TENSORS[key] = (J, d)
    return d


# ---------------------------------------------------------------------------
# Families

def _poly_from_cubic(f, n: int) -> dict:
    """Monomial coefficients of a cubic form given as a black box on exact vectors."""
    e = [[Fraction(int(a == b)) for a in range(n)] for b in range(n)]

    def add(*vs):
        return [sum(c) for c in zip(*vs)]

    Nval = {}

    def N(*idx):
        key = tuple(sorted(idx))
        if key not in Nval:
            Nval[key] = f(add(*[e[i] for i in key]))
        return Nval[key]

    poly = {}
    for i, j, k in combinations_with_replacement(range(n), 3):
        # (e_i, e_j, e_k) by inclusion-exclusion; equals 6 * symmetric d_ijk
        T = N(i, j, k) - N(i, j) - N(i, k) - N(j, k) + N(i) + N(j) + N(k)
        if T != 0:
            poly[(i, j, k)] = T * _multiplicity(i, j, k) / 6
    return poly


def build_rational() -> CubicNormStructure:
    """J = Q with N(x) = x^3."""
    return CubicNormStructure.build("rational", (), ("x",), (1,), {(0, 0, 0): 1}, [[3]])


def build_generic(S=None, c0=None) -> CubicNormStructure:
    """J = Q + W with N(a, w) = a B(w), B(w) = w^T S w / 2 and B(c0) = 1."""
    if S is None:
        S = [[0, 1], [1, 0]]
        c0 = (1, 1)
    S = [[Q(v) for v in row] for row in S]
    c0 = [Q(v) for v in c0]
    m = len(S)
    if sum(c0[i] * S[i][j] * c0[j] for i in range(m) for j in range(m)) != 2:
        raise ValueError("base point must have B(c0) = 1")
    poly = {}
    for i in range(m):
        for j in range(i, m):
            c = S[i][j] / 2 if i == j else S[i][j]
            if c != 0:
                poly[(0, 1 + i, 1 + j)] = c
    Sc = [sum(S[i][j] * c0[j] for j in range(m)) for i in range(m)]
    gram = [[Fraction(0)] * (m + 1) for _ in range(m + 1)]
    gram[0][0] = Fraction(1)
    for i in range(m):
        for j in range(m):
            gram[1 + i][1 + j] = Sc[i] * Sc[j] - S[i][j]
    labels = ("alpha",) + tuple(f"w{i}" for i in range(m))
    return CubicNormStructure.build("generic", tuple(c0), labels, (1,) + tuple(c0), poly, gram)


def build_stu() -> CubicNormStructure:
    """N = h1 h2 h3 (diagonal of Herm3, equivalently Q + hyperbolic plane up to basis)."""
    gram = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    return CubicNormStructure.build("stu", (), ("h1", "h2", "h3"), (1, 1, 1),
                                    {(0, 1, 2): 1}, gram)


@lru_cache(maxsize=None)
def build_herm3(kind: str = "rational", params: tuple | None = None) -> CubicNormStructure:
    """Hermitian 3x3 matrices over a composition algebra.

    Basis order: diagonal (a, b, c), then x at (2,3), y at (3,1), z at (1,2),
    each off-diagonal block in Cayley-Dickson coordinates.
    N = abc + T((xy)z) - a n(x) - b n(y) - c n(z).
    """
    params = tuple(Q(p) for p in (DEFAULT_PARAMS[kind] if params is None else params))
    k = KIND_DIMS[kind]
    n = 3 + 3 * k

    def N(v):
        a, b, c = v[0], v[1], v[2]
        x, y, z = v[3:3 + k], v[3 + k:3 + 2 * k], v[3 + 2 * k:]
        xyz = _cd_mul(_cd_mul(x, y, params), z, params)
        return (a * b * c + 2 * xyz[0] - a * _cd_norm(x, params)
                - b * _cd_norm(y, params) - c * _cd_norm(z, params))

    poly = _poly_from_cubic(N, n)
    # n(e_m) for the Cayley-Dickson basis
    basis_norms = []
    for m in range(k):
        e = [Fraction(int(m == i)) for i in range(k)]
        basis_norms.append(_cd_norm(e, params))
    gram = [[Fraction(0)] * n for _ in range(n)]
    for i in range(3):
        gram[i][i] = Fraction(1)
    for blk in range(3):
        for m in range(k):
            gram[3 + blk * k + m][3 + blk * k + m] = 2 * basis_norms[m]
    labels = ("a", "b", "c") + tuple(f"{s}{m}" for s in "xyz" for m in range(k))
    unit = (1, 1, 1) + (0,) * (3 * k)
    return CubicNormStructure.build(f"herm3:{kind}", params, labels, unit, poly, gram)


def build_model(name: str) -> CubicNormStructure:
    """Model names used by the CLI and scripts."""
    name = name.lower()
    if name in ("t3", "q", "rational"):
        return build_rational()
    if name == "stu":
        return build_stu()
    if name in ("generic", "hyperbolic"):
        return build_generic()
    table = {"herm3q": "rational", "herm3r": "rational", "herm3c": "imaginary_quadratic",
             "herm3h": "quaternion", "herm3o": "octonion"}
    base, _, rest = name.partition(":")
    if base in table:
        params = tuple(int(p) for p in rest.split(",")) if rest else None
        return build_herm3(table[base], params)
    raise ValueError(f"unknown model {name!r}")


# ---------------------------------------------------------------------------
# Free-function API

def norm(J: CubicNormStructure, x):
    return J.norm(x)


def sharp(J: CubicNormStructure, x):
    return J.sharp(x)


def cross(J: CubicNormStructure, x, y):
    return J.cross(x, y)


def jordan_product(J: CubicNormStructure, x, y) -> list:
    """Springer product x o y = (x × y + T(x) y + T(y) x - S(x,y) 1) / 2.

    T(x) = (1, x) and S(x, y) = (1 × x, y)... only used for sanity checks.
    """
    one = list(J.unit)
    tx, ty = J.pair(one, x), J.pair(one, y)
    sxy = tx * ty - J.pair(x, y)
    xy = J.cross(x, y)
    return [(xy[i] + tx * y[i] + ty * x[i] - sxy * one[i]) / 2 for i in range(J.dimension)]


@dataclass
class AxiomReport:
    family: str
    samples: int
    passed: dict
    witness: dict

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def to_json(self) -> dict:
        return {"family": self.family, "samples": self.samples,
                "passed": self.passed,
                "witness": {k: [[str(c) for c in v] for v in w] for k, w in self.witness.items()}}


def axiom_check(J: CubicNormStructure, samples: int = 100, seed: int = 0) -> AxiomReport:
    """Check the four cubic-norm axioms exactly on random rational elements.

    (1) N(1)=1, 1^#=1, 1 × x = (1,x) 1 - x
    (2) (x^#)^# = N(x) x
    (3) (x,y) = T(x) T(y) - (1,x,y) with T(x) = (1,1,x)/2
    (4) N(x+y) = N(x) + (x^#,y) + (x,y^#) + N(y)
    """
    rng = random.Random(seed)
    fam = J.family
    J = J.mpq_view()
    one = list(J.unit)
    passed = {"1": True, "2": True, "3": True, "4": True}
    witness: dict = {}

    def fail(ax, *vs):
        if passed[ax]:
            passed[ax] = False
            witness[ax] = [[Fraction(int(c.numerator), int(c.denominator)) for c in v]
                           for v in vs]

    if J.norm(one) != 1 or J.sharp(one) != one:
        fail("1", one)
    for _ in range(samples):
        x = [mpq(v.numerator, v.denominator) for v in J.random_element(rng)]
        y = [mpq(v.numerator, v.denominator) for v in J.random_element(rng)]
        if passed["1"]:
            lhs = J.cross(one, x)
            t = J.pair(one, x)
            if lhs != [t * o - xi for o, xi in zip(one, x)]:
                fail("1", x)
        xs = J.sharp(x)
        Nx = J.norm(x)
        if passed["2"] and J.sharp(xs) != [Nx * v for v in x]:
            fail("2", x)
        if passed["3"]:
            tx = J.trilinear(one, one, x) / 2
            ty = J.trilinear(one, one, y) / 2
            if J.pair(x, y) != tx * ty - J.trilinear(one, x, y):
                fail("3", x, y)
        if passed["4"]:
            xy = [a + b for a, b in zip(x, y)]
            if J.norm(xy) != Nx + J.pair(xs, y) + J.pair(x, J.sharp(y)) + J.norm(y):
                fail("4", x, y)
    return AxiomReport(fam, samples, passed, witness)
