"""Solve random BPS charges in every model and tally certificate / recovery outcomes."""
import argparse
import collections
import random
from dataclasses import dataclass

from jordan_attractors.bps_attractor import ChartError, cm_certificate, solve_bps, verify_attractor
from jordan_attractors.fts import ChargeClass, classify, random_charge
from jordan_attractors.jordan import build_model


@dataclass
class Config:
    models: tuple = ("t3", "stu", "generic", "herm3q", "herm3c", "herm3h", "herm3o")
    per_model: int = 50
    seed: int = 0
    span: int = 9


def sweep(cfg: Config):
    rng = random.Random(cfg.seed)
    out = {}
    for name in cfg.models:
        J = build_model(name)
        tally = collections.Counter()
        fields = collections.Counter()
        while tally["solved"] < cfg.per_model:
            g = random_charge(J, rng, -cfg.span, cfg.span)
            if classify(g) != ChargeClass.BPS:
                continue
            try:
                sol = solve_bps(g)
            except ChartError:
                tally["chart"] += 1
                continue
            tally["solved"] += 1
            tally["certificate"] += cm_certificate(sol).passed
            rep = verify_attractor(g, sol)
            tally["exact_recovery"] += rep.exact_match
            tally["saddle (other cone)"] += not rep.positive_cone
            fields[sol.D] += 1
        out[name] = (dict(tally), fields.most_common(5))
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--per-model", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    for name, (tally, fields) in sweep(Config(per_model=a.per_model, seed=a.seed)).items():
        print(f"{name:8s} {tally}  common D: {fields}")
