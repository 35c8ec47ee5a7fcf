"""Sweep the boundary-concentration family toward the hexagon step map.

Prints |K''(O)|, the Hall gap and the distance to 16 pi^4/81 for each lambda.

    python scripts/concentration_sweep.py --lams 0 0.3 0.6 0.8 0.9
"""
from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass

from zerocurv.bounds import FLAT_BOUND
from zerocurv.rkc import concentration_family, family_report


@dataclass(frozen=True)
class SweepConfig:
    lams: tuple = (0.0, 0.2, 0.4, 0.6, 0.7, 0.8, 0.85, 0.9)
    target: str = "disk"
    modes: int = 512
    working_radius: float = 0.99


def run(cfg: SweepConfig) -> list[dict]:
    rows = []
    for lam in cfg.lams:
        rep = family_report(concentration_family(lam, cfg.target), cfg.modes, cfg.working_radius)
        rows.append({
            "lambda": lam,
            "magnitude": rep.magnitude,
            "fraction_of_flat_bound": rep.magnitude / FLAT_BOUND.value,
            "hall_gap": None if rep.hall_lhs is None else rep.hall_lhs - rep.hall_rhs,
            "violations": rep.violations(),
        })
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lams", type=float, nargs="+", default=list(SweepConfig.lams))
    ap.add_argument("--target", choices=("disk", "hexagon"), default="disk")
    ap.add_argument("--modes", type=int, default=SweepConfig.modes)
    args = ap.parse_args()
    cfg = SweepConfig(tuple(args.lams), args.target, args.modes)
    print(json.dumps({"config": asdict(cfg), "rows": run(cfg)}, indent=2))


if __name__ == "__main__":
    main()
