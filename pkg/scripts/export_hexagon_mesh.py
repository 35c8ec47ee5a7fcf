"""Write the hexagon graph as OBJ and CSV plus a short boundary summary.

    python scripts/export_hexagon_mesh.py --out-dir out/ --n-radial 32 --n-angular 96
"""
from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from zerocurv.hexagon import boundary_geometry, build_hexagon, export_mesh


@dataclass(frozen=True)
class MeshConfig:
    out_dir: str = "out"
    n_radial: int = 32
    n_angular: int = 96
    r_max: float = 0.95
    boundary_samples: int = 720


def run(cfg: MeshConfig) -> dict:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = build_hexagon()
    for fmt in ("obj", "csv"):
        export_mesh(cfg.n_radial, cfg.n_angular, cfg.r_max, fmt, out / f"hexagon.{fmt}", model)
    _, _, dist, vertices = boundary_geometry(cfg.boundary_samples, model=model)
    return {
        "config": asdict(cfg),
        "max_boundary_distance": float(dist.max()),
        "vertices": [[v.real, v.imag] for v in vertices],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, default in asdict(MeshConfig()).items():
        ap.add_argument("--" + f.replace("_", "-"), type=type(default), default=default)
    cfg = MeshConfig(**vars(ap.parse_args()))
    print(json.dumps(run(cfg), indent=2))


if __name__ == "__main__":
    main()
