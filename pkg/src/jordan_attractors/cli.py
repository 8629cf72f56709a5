"""jattr: command-line front end.

Exit codes: 0 ok, 2 usage / parse error, 3 numeric failure, 4 certificate failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import cubic_model as cm
from . import distribution as dist
from . import five_d, nonbps_locus
from .bps_attractor import cm_certificate, solve_bps, verify_attractor
from .exactnum import KIND_DIMS, rational_to_json
from .fts import BinaryCubicForm, ChargeClass, ChargeVector, classify, cubic_dictionary, quartic_I4
from .jordan import axiom_check, build_herm3, build_model


class UsageError(ValueError):
    pass


class CertificateFailure(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# output: 17 significant digits, atomic writes

def _enc(v, ind=0) -> str:
    pad = " " * (ind + 1)
    if isinstance(v, bool) or v is None:
        return {True: "true", False: "false", None: "null"}[v]
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return '"' + repr(v) + '"'
        s = format(v, ".17g")
        return s if any(c in s for c in ".en") else s + ".0"
    if isinstance(v, Fraction):
        return _enc(rational_to_json(v), ind)
    if isinstance(v, str):
        import json
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{_enc(str(k))}: {_enc(x, ind + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * ind + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        v = list(v)
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in v):
            return "[" + ", ".join(_enc(x, ind + 1) for x in v) + "]"
        return "[\n" + ",\n".join(pad + _enc(x, ind + 1) for x in v) + "\n" + " " * ind + "]"
    raise TypeError(f"cannot encode {type(v)}")


def dumps(doc) -> str:
    return _enc(doc) + "\n"


def emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    tmp = f"{out}.tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, out)


# ---------------------------------------------------------------------------
# parsing

def parse_form(s: str) -> BinaryCubicForm:
    try:
        vals = [int(v) for v in s.split(",")]
    except ValueError as exc:
        raise UsageError(f"--form expects four integers a,b,c,d, got {s!r}") from exc
    if len(vals) != 4:
        raise UsageError(f"--form expects four integers a,b,c,d, got {s!r}")
    try:
        return BinaryCubicForm(*vals)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def parse_charge(s: str, J) -> ChargeVector:
    """key=val list: p0=1,q0=2,p=1:0:2,q=3:1:1; vector entries colon-separated.

    q is given in Jordan coordinates, like p.
    """
    parts = {}
    try:
        for item in s.split(","):
            if not item.strip():
                continue
            k, _, v = item.partition("=")
            k = k.strip()
            if k not in ("p0", "q0", "p", "q") or not v:
                raise UsageError(f"bad charge component {item!r}")
            vals = [Fraction(x) for x in v.split(":")]
            parts[k] = vals if k in ("p", "q") else vals[0]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse charge {s!r}: {exc}") from exc
    n = J.dimension
    for k in ("p", "q"):
        if k in parts and len(parts[k]) != n:
            raise UsageError(f"{k} needs {n} entries for this model, got {len(parts[k])}")
    return ChargeVector.make(J, parts.get("p0", 0), parts.get("p"), parts.get("q"), parts.get("q0", 0))


def _model(name):
    try:
        return build_model(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands

def cmd_solve(a) -> dict:
    J = _model(a.model)
    if a.form:
        if J.dimension != 1:
            raise UsageError("--form only makes sense with --model t3")
        F = parse_form(a.form)
        gamma = cubic_dictionary(F)
    elif a.charge:
        F = None
        gamma = parse_charge(a.charge, J)
    else:
        raise UsageError("solve needs --form or --charge")
    cls = classify(gamma)
    doc = {"model": J.family, "charge": gamma.to_json(), "I4": Fraction(quartic_I4(gamma)),
           "class": cls.value}
    if cls == ChargeClass.BPS:
        sol = solve_bps(gamma)
        cert = cm_certificate(sol)
        ver = verify_attractor(gamma, sol)
        doc.update({"field_D": sol.D, "t": [v.to_json() for v in sol.t],
                    "t_numeric": [{"x": complex(v).real, "y": complex(v).imag} for v in sol.t],
                    "certificate": cert.to_json(), "recovered_exactly": ver.exact_match,
                    "positive_cone": ver.positive_cone})
        if not (cert.passed and ver.exact_match):
            emit(dumps(doc), a.out)
            raise CertificateFailure(cert.witness or "charge not recovered exactly")
    elif cls == ChargeClass.NONBPS:
        if F is not None:
            h = cm.quadratic_h(F) if F.a != 0 else None
            P = cm.nonbps_point(F)
            doc["tau"] = P.to_json()
            if h is not None:
                doc["h"] = list(h) if all(isinstance(v, Fraction) for v in h) else [float(v) for v in h]
        elif all(v == 0 for v in gamma.p) and all(v == 0 for v in gamma.q):
            r = gamma.q0 / gamma.p0 if gamma.p0 else None
            doc["locus"] = {"x": 0, "N_lam": r, "kappa": None if r is None else 6 * r,
                            "dimension": J.dimension - 1}
        else:
            doc["locus"] = None
            doc["note"] = "closed-form non-BPS data only for J = Q or charges (p0, 0, q0, 0)"
    return doc


def cmd_enumerate(a) -> str:
    classes = cm.enumerate_forms(a.bound, -1 if a.sign == "neg" else 1)
    if a.out and a.out != "-":
        cm.forms_to_csv(classes, a.out)
        return ""
    import csv
    import io
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["a", "b", "c", "d", "disc", "x", "y", "tag"])
    for fc in classes:
        w.writerow(fc.csv_row())
    return buf.getvalue()


def _trend_row(args):
    B, interp, nx, ny = args
    spec = dist.HistogramSpec(nx, ny, math.sqrt(B))
    pts = dist.attractor_sample(B)
    m = dist.EmpiricalMeasure.from_points([c.tau for c in pts], spec)
    return {"bound": B, **dist.compare(m, dist.DensityRho(interp)).to_json()}


def cmd_distribution(a) -> dict:
    rho = dist.DensityRho(a.interpretation)
    spec = dist.HistogramSpec(a.nx, a.ny, math.sqrt(a.bound))
    pts = dist.attractor_sample(a.bound, a.grouping)
    m = dist.EmpiricalMeasure.from_points([c.tau for c in pts], spec,
                                          {"bound": a.bound, "grouping": a.grouping,
                                           "interpretation": a.interpretation})
    out = a.out or "histogram.csv"
    dist.histogram_csv(m, rho, out)
    dist.plot_json(m, rho, out + ".json")
    doc = {"histogram": out, "total": m.total, "mass": float(m.mass.sum()),
           "overflow_mass": float(m.mass[:, -1].sum())}
    if m.total >= 100:
        doc["comparison"] = dist.compare(m, rho).to_json()
    if a.trend:
        bounds = [int(b) for b in a.trend.split(",")]
        jobs = [(b, a.interpretation, a.nx, a.ny) for b in bounds]
        if a.threads > 1:
            with ProcessPoolExecutor(a.threads) as ex:
                doc["trend"] = list(ex.map(_trend_row, jobs))
        else:
            doc["trend"] = [_trend_row(j) for j in jobs]
    return doc


def cmd_check(a) -> dict:
    if a.what == "axioms":
        if a.algebra:
            if a.algebra not in KIND_DIMS:
                raise UsageError(f"--algebra must be one of {sorted(KIND_DIMS)}")
            J = build_herm3(a.algebra)
        else:
            J = _model(a.model)
        rep = axiom_check(J, a.samples, a.seed)
        doc = rep.to_json()
        doc["ok"] = rep.ok
        if not rep.ok:
            emit(dumps(doc), a.out)
            raise CertificateFailure("axiom check failed")
        return doc
    if a.what == "locus":
        J = _model(a.model)
        gamma = parse_charge(a.charge or "p0=1,q0=2", J)
        try:
            rep = nonbps_locus.critical_locus_check(gamma, a.samples, a.seed)
        except (ValueError, nonbps_locus.ConeError) as exc:
            raise UsageError(str(exc)) from exc
        rep.grad_tol = a.tol if a.tol else rep.grad_tol
        doc = rep.to_json()
        if not rep.ok:
            emit(dumps(doc), a.out)
            raise cm.NumericFailure("locus check failed")
        return doc
    if a.what == "5d":
        J = _model(a.model)
        if not a.charge:
            raise UsageError("check 5d needs --charge q=...")
        q = parse_charge(a.charge, J)
        qd = np.array([float(v) for v in q.q_dual])
        sol = five_d.solve_bps_5d(J, qd)
        doc = sol.to_json()
        doc["closed_form_h"] = [float(v) for v in five_d.closed_form_h(J, qd)]
        doc["restricted_gradient"] = float(np.abs(five_d.restricted_potential_gradient(J, qd, sol.h)).max())
        tol = a.tol or 1e-9
        doc["ok"] = bool(sol.tangent_residual < tol)
        return doc
    raise UsageError(a.what)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jattr", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default="t3")
    common.add_argument("--out", default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--threads", type=int, default=1)
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", parents=[common])
    s.add_argument("--form")
    s.add_argument("--charge")

    e = sub.add_parser("enumerate", parents=[common])
    e.add_argument("--bound", type=int, required=True)
    e.add_argument("--sign", choices=["neg", "pos"], default="neg")

    d = sub.add_parser("distribution", parents=[common])
    d.add_argument("--bound", type=int, required=True)
    d.add_argument("--interpretation", default="fiber_rescaled", choices=sorted(dist.RHO_INTERPRETATIONS))
    d.add_argument("--grouping", default="cumulative", choices=["cumulative", "exact"])
    d.add_argument("--nx", type=int, default=20)
    d.add_argument("--ny", type=int, default=20)
    d.add_argument("--trend", help="comma-separated bounds for a TV-distance trend")

    c = sub.add_parser("check", parents=[common])
    c.add_argument("what", choices=["axioms", "locus", "5d"])
    c.add_argument("--algebra")
    c.add_argument("--charge")
    c.add_argument("--samples", type=int, default=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)          # argparse exits with 2 on usage errors
    if a.cmd == "check" and a.samples is None:
        a.samples = {"axioms": 1000, "locus": 20, "5d": 1}[a.what]
    try:
        if a.cmd == "solve":
            emit(dumps(cmd_solve(a)), a.out)
        elif a.cmd == "enumerate":
            text = cmd_enumerate(a)      # writes the CSV itself when --out is a path
            if text:
                sys.stdout.write(text)
        elif a.cmd == "distribution":
            sys.stdout.write(dumps(cmd_distribution(a)))
        elif a.cmd == "check":
            emit(dumps(cmd_check(a)), a.out)
    except UsageError as exc:
        print(f"jattr: {exc}", file=sys.stderr)
        return 2
    except CertificateFailure as exc:
        print(f"jattr: certificate failure: {exc}", file=sys.stderr)
        return 4
    except (cm.NumericFailure, cm.DegenerateQuadratic, five_d.ConvergenceError,
            five_d.HypersurfaceError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"jattr: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
