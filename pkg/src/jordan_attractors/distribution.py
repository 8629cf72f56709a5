"""Empirical distribution of non-BPS attractor points on the modular fundamental domain.

The density rho uses the fiber integral over a complex variable Y of
exp(-V) det(d^2 V) / |Y|^2 restricted to det > 0, with

    det d^2 V |Y|^2 = A |Y|^2 + 2 Re(B Y^2),
    A = 4 + 10|F|^2 + (9/4)|F|^4 - |DF|^2,   B = 2 DF conj(F)^2,

and F = tau^3/3.  What Y is, and which frame F and DF are taken in, is a
modelling choice; see RHO_INTERPRETATIONS.  For every choice here the
radial Y integral is trivial and only the angular Heaviside cut remains:
in polar form A + 2|B| cos(psi), so the angular measure is closed form.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .cubic_model import FormClass, enumerate_forms, in_fundamental_domain


Y_MIN = math.sqrt(3) / 2


def attractor_sample(bound: int, grouping: str = "cumulative", pretwist=None) -> list[FormClass]:
    """Reduced non-BPS points of all classes with -bound <= Disc < 0 (or Disc = -bound)."""
    classes = enumerate_forms(bound, -1, pretwist=pretwist)
    if grouping == "exact":
        return [c for c in classes if c.disc == -bound]
    if grouping != "cumulative":
        raise ValueError(f"unknown grouping {grouping!r}")
    return classes


# ---------------------------------------------------------------------------
# histogram

@dataclass
class HistogramSpec:
    nx: int = 20
    ny: int = 20
    y_max: float = 100.0

    @property
    def x_edges(self) -> np.ndarray:
        return np.linspace(-0.5, 0.5, self.nx + 1)

    @property
    def y_edges(self) -> np.ndarray:
        return np.geomspace(Y_MIN, self.y_max, self.ny + 1)


@dataclass
class EmpiricalMeasure:
    spec: HistogramSpec
    counts: np.ndarray          # (nx, ny + 1); last column is the overflow y > y_max
    total: int
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_points(cls, taus, spec: HistogramSpec, meta=None) -> "EmpiricalMeasure":
        taus = np.asarray(list(taus), dtype=complex)
        for t in taus:
            if not in_fundamental_domain(t, tol=1e-7):
                raise ValueError(f"point {t} is outside the fundamental domain")
        x = np.clip(taus.real, -0.5, 0.5 - 1e-15)
        ix = np.minimum(np.searchsorted(spec.x_edges, x, side="right") - 1, spec.nx - 1)
        iy = np.searchsorted(spec.y_edges, taus.imag, side="right") - 1
        iy = np.where(taus.imag > spec.y_max, spec.ny, np.clip(iy, 0, spec.ny - 1))
        counts = np.zeros((spec.nx, spec.ny + 1), dtype=np.int64)
        np.add.at(counts, (ix, iy), 1)
        return cls(spec, counts, int(taus.size), dict(meta or {}))

    def merge(self, other: "EmpiricalMeasure") -> "EmpiricalMeasure":
        if (self.spec.nx, self.spec.ny, self.spec.y_max) != (other.spec.nx, other.spec.ny, other.spec.y_max):
            raise ValueError("histograms have different binning")
        return EmpiricalMeasure(self.spec, self.counts + other.counts, self.total + other.total,
                                dict(self.meta))

    @property
    def mass(self) -> np.ndarray:
        if self.total == 0:
            raise ValueError("empty measure")
        return self.counts / self.total


# ---------------------------------------------------------------------------
# rho

def _fiber_coeffs(tau, rescaled: bool):
    tau = np.asarray(tau, dtype=complex)
    y = tau.imag
    F = tau ** 3 / 3
    DF = tau ** 2 + 1j * tau ** 3 / (2 * y)       # covariant derivative with K = -log(8/3 y^3)
    if rescaled:
        s = np.sqrt(3 / (8 * y ** 3))                # e^{K/2}
        F, DF = s * F, s * DF
    else:
        DF = tau ** 2
    A = 4 + 10 * abs(F) ** 2 + 2.25 * abs(F) ** 4 - abs(DF) ** 2
    B = 2 * DF * np.conj(F) ** 2
    return A, B


def _angular(A, B):
    """Measure of {psi in [0, 2pi) : A + 2|B| cos psi > 0} weighted by A + 2|B| cos psi."""
    A = np.asarray(A, dtype=float)
    b = 2 * np.abs(B)
    out = np.where(A >= b, 2 * np.pi * A, 0.0)
    mid = (A < b) & (A > -b)
    with np.errstate(invalid="ignore", divide="ignore"):
        psi0 = np.arccos(np.clip(-A / np.where(b > 0, b, 1), -1, 1))
    out = np.where(mid, 2 * A * psi0 + 2 * b * np.sin(psi0), out)
    return out


RHO_INTERPRETATIONS = {
    # Y is the fiber coordinate over tau; F, DF in the unit-norm frame e^{K/2}
    "fiber_rescaled": lambda tau: _angular(*_fiber_coeffs(tau, True)) / (16 * np.pi ** 2),
    # same, with the bare prepotential t^3/3 and its ordinary derivative
    "fiber_raw": lambda tau: _angular(*_fiber_coeffs(tau, False)) / (16 * np.pi ** 2),
    # hyperbolic measure, as a reference
    "hyperbolic": lambda tau: 1 / np.asarray(tau, dtype=complex).imag ** 2,
}


@dataclass
class DensityRho:
    interpretation: str = "fiber_rescaled"

    def __post_init__(self):
        if self.interpretation not in RHO_INTERPRETATIONS:
            raise ValueError(f"unknown interpretation {self.interpretation!r}")

    def __call__(self, tau):
        return RHO_INTERPRETATIONS[self.interpretation](tau)

    def bin_masses(self, spec: HistogramSpec, order: int = 12) -> np.ndarray:
        """Integral of rho dx dy over each bin intersected with the fundamental domain,
        normalized over y <= y_max; the overflow column is 0."""
        gx, wx = np.polynomial.legendre.leggauss(order)
        out = np.zeros((spec.nx, spec.ny + 1))
        xe, ye = spec.x_edges, np.log(spec.y_edges)
        for i in range(spec.nx):
            xs = 0.5 * (xe[i + 1] - xe[i]) * gx + 0.5 * (xe[i + 1] + xe[i])
            wxs = 0.5 * (xe[i + 1] - xe[i]) * wx
            for j in range(spec.ny):
                ls = 0.5 * (ye[j + 1] - ye[j]) * gx + 0.5 * (ye[j + 1] + ye[j])
                wls = 0.5 * (ye[j + 1] - ye[j]) * wx
                X, L = np.meshgrid(xs, ls, indexing="ij")
                Yv = np.exp(L)
                tau = X + 1j * Yv
                inside = np.abs(tau) >= 1
                val = np.where(inside, self(tau), 0.0) * Yv          # dy = y dlog y
                out[i, j] = wxs @ val @ wls
        tot = out.sum()
        if not tot > 0:
            raise ValueError("rho integrates to zero on the truncated domain")
        return out / tot


def tv_distance(m1: np.ndarray, m2: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(m1) - np.asarray(m2)).sum())


@dataclass
class Comparison:
    tv: float
    n_points: int
    overflow_mass: float
    interpretation: str

    def to_json(self) -> dict:
        return {"tv": self.tv, "n_points": self.n_points, "overflow_mass": self.overflow_mass,
                "interpretation": self.interpretation}


def compare(measure: EmpiricalMeasure, rho: DensityRho | EmpiricalMeasure) -> Comparison:
    if measure.total < 100:
        raise ValueError("need at least 100 points for a comparison")
    if isinstance(rho, EmpiricalMeasure):
        ref, label = rho.mass, "empirical"
    else:
        ref, label = rho.bin_masses(measure.spec), rho.interpretation
    return Comparison(tv_distance(measure.mass, ref), measure.total,
                      float(measure.mass[:, -1].sum()), label)


def hyperbolic_uniform_sample(n: int, y_max: float, rng: np.random.Generator) -> np.ndarray:
    """Points of the fundamental domain from dx dy / y^2, truncated at y_max."""
    out = []
    a, b = 1 / Y_MIN, 1 / y_max
    while len(out) < n:
        x = rng.uniform(-0.5, 0.5, size=2 * n)
        y = 1 / rng.uniform(b, a, size=2 * n)
        z = x + 1j * y
        out.extend(z[np.abs(z) >= 1])
    return np.array(out[:n])


def trend(bounds, rho: DensityRho, spec_for=None) -> list[dict]:
    """TV distance between the class sample and rho for each bound (exploratory)."""
    rows = []
    for B in bounds:
        spec = spec_for(B) if spec_for else HistogramSpec(y_max=math.sqrt(B))
        pts = attractor_sample(B)
        m = EmpiricalMeasure.from_points([c.tau for c in pts], spec)
        c = compare(m, rho)
        rows.append({"bound": B, **c.to_json()})
    return rows


# ---------------------------------------------------------------------------
# export

def _atomic_write(path, write):
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        write(fh)
    os.replace(tmp, path)


def histogram_csv(measure: EmpiricalMeasure, rho: DensityRho | None, path) -> None:
    ref = rho.bin_masses(measure.spec) if rho is not None else None
    xe, ye = measure.spec.x_edges, measure.spec.y_edges

    def w(fh):
        wr = csv.writer(fh)
        wr.writerow(["bin_x", "bin_y", "x_lo", "x_hi", "y_lo", "y_hi", "count", "mass", "rho_value"])
        for i in range(measure.spec.nx):
            for j in range(measure.spec.ny + 1):
                y_hi = ye[j + 1] if j < measure.spec.ny else math.inf
                wr.writerow([i, j, f"{xe[i]:.17g}", f"{xe[i + 1]:.17g}", f"{ye[min(j, measure.spec.ny)]:.17g}",
                             f"{y_hi:.17g}", int(measure.counts[i, j]), f"{measure.mass[i, j]:.17g}",
                             "" if ref is None else f"{ref[i, j]:.17g}"])
    _atomic_write(path, w)


def plot_json(measure: EmpiricalMeasure, rho: DensityRho | None, path) -> None:
    doc = {"x_edges": measure.spec.x_edges.tolist(), "y_edges": measure.spec.y_edges.tolist(),
           "counts": measure.counts.tolist(), "total": measure.total, "meta": measure.meta}
    if rho is not None:
        doc["rho_interpretation"] = rho.interpretation
        doc["rho_bin_mass"] = rho.bin_masses(measure.spec).tolist()
    _atomic_write(path, lambda fh: json.dump(doc, fh, indent=1))
