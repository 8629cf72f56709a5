"""TV distance between non-BPS attractor points and rho as the discriminant bound grows.

    python scripts/distribution_trend.py --bounds 1000 10000 100000 --out trend.json

The 1e5 run enumerates ~1.5e5 classes and takes a while; everything is cached
per bound in --cache so reruns are cheap.
"""
import argparse
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field

from jordan_attractors import cubic_model as cm
from jordan_attractors import distribution as dist


@dataclass
class Config:
    bounds: list = field(default_factory=lambda: [1000, 3000, 10000])
    interpretations: list = field(default_factory=lambda: list(dist.RHO_INTERPRETATIONS))
    nx: int = 20
    ny: int = 20
    cache: str = "cache"
    out: str = "trend.json"


def load_or_enumerate(B, cache):
    path = os.path.join(cache, f"forms_{B}.csv")
    if os.path.exists(path):
        import csv
        with open(path) as fh:
            return [complex(float(r["x"]), float(r["y"])) for r in csv.DictReader(fh)], None
    t = time.time()
    fcs = cm.enumerate_forms(B)
    os.makedirs(cache, exist_ok=True)
    cm.forms_to_csv(fcs, path)
    return [fc.tau for fc in fcs], time.time() - t


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bounds", type=int, nargs="+")
    ap.add_argument("--nx", type=int)
    ap.add_argument("--ny", type=int)
    ap.add_argument("--cache")
    ap.add_argument("--out")
    args = {k: v for k, v in vars(ap.parse_args()).items() if v is not None}
    cfg = Config(**args)
    rows = []
    for B in cfg.bounds:
        taus, secs = load_or_enumerate(B, cfg.cache)
        spec = dist.HistogramSpec(cfg.nx, cfg.ny, math.sqrt(B))
        m = dist.EmpiricalMeasure.from_points(taus, spec)
        row = {"bound": B, "classes": len(taus), "enumerate_s": secs}
        for name in cfg.interpretations:
            row[name] = dist.compare(m, dist.DensityRho(name)).tv
        print(json.dumps(row), flush=True)
        rows.append(row)
    with open(cfg.out, "w") as fh:
        json.dump({"config": asdict(cfg), "rows": rows}, fh, indent=1)


if __name__ == "__main__":
    main()
