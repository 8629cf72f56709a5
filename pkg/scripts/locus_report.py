"""Hessian signatures on the (p0, 0, 0, q0) critical locus, per model."""
import argparse

from jordan_attractors.fts import ChargeVector
from jordan_attractors.jordan import build_model
from jordan_attractors.nonbps_locus import critical_locus_check

p = argparse.ArgumentParser()
p.add_argument("--models", nargs="+", default=["t3", "stu", "herm3q", "herm3c", "herm3h"])
p.add_argument("--samples", type=int, default=10)
p.add_argument("--p0", type=int, default=1)
p.add_argument("--q0", type=int, default=2)
a = p.parse_args()

for name in a.models:
    J = build_model(name)
    rep = critical_locus_check(ChargeVector.make(J, p0=a.p0, q0=a.q0), samples=a.samples)
    sigs = sorted({(pt.n_pos, pt.n_zero, pt.n_neg) for pt in rep.points})
    worst_k = max(abs(pt.kappa_curvature / pt.kappa_expected - 1) for pt in rep.points)
    print(f"{name:8s} dim {J.dimension:2d}  max|grad| {rep.max_grad:.1e}  "
          f"signatures {sigs}  kappa-curvature rel err {worst_k:.1e}  ok={rep.ok}")
