"""Command-line front end.

Exit codes: 0 pass, 2 input error, 3 numeric failure, 4 bound violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .analytic import BranchError, QuadratureError, RadiusError
from .bounds import DirectionDependenceError, PremiseError, build_report
from .hexagon import build_hexagon, export_mesh, kpp_report
from .rkc import BatchConfig, CorrespondenceError, family_report, generate_batch, load_correspondence
from .weierstrass import AdmissibilityError, ConvergenceError, loads_data

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_BOUND = 4

COMMANDS = ("hexagon-report", "hexagon-mesh", "kpp", "verify", "rkc")


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str | None = None
    out: str | None = None
    seed: int = 0
    size: int = 200
    modes: int = 512
    numeric: bool = True
    n_radial: int = 16
    n_angular: int = 48
    r_max: float = 0.9
    format: str = "obj"
    tolerances: dict = field(default_factory=dict)


class InputError(ValueError):
    pass


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _report_status(reports) -> int:
    return EXIT_BOUND if any(r.violations() for r in reports) else EXIT_OK


def _cmd_hexagon_report(cfg: RunConfig) -> int:
    rep = kpp_report(build_hexagon(), numeric=cfg.numeric)
    _emit(rep.to_json() + "\n", cfg.out)
    return _report_status([rep])


def _cmd_hexagon_mesh(cfg: RunConfig) -> int:
    mesh = export_mesh(cfg.n_radial, cfg.n_angular, cfg.r_max, cfg.format)
    _emit(mesh.to_obj() if cfg.format == "obj" else mesh.to_csv(), cfg.out)
    return EXIT_OK


def _cmd_kpp(cfg: RunConfig) -> int:
    if not cfg.input:
        raise InputError("kpp needs a Weierstrass data file")
    try:
        data = loads_data(Path(cfg.input).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from exc
    rep = build_report(data, label=Path(cfg.input).stem, numeric=cfg.numeric)
    _emit(rep.to_json() + "\n", cfg.out)
    return _report_status([rep])


def _cmd_verify(cfg: RunConfig) -> int:
    from .verify import run_suite

    results = run_suite(seed=cfg.seed, overrides=cfg.tolerances)
    doc = {
        "seed": cfg.seed,
        "passed": all(r.passed for r in results),
        "checks": [
            {k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results
        ],
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n", cfg.out)
    for r in results:
        print(r.line(), file=sys.stderr)
    if doc["passed"]:
        return EXIT_OK
    bound_checks = {"theorem_bounds", "bound_machinery"}
    if any(not r.passed and r.name in bound_checks for r in results):
        return EXIT_BOUND
    return EXIT_NUMERIC


def _cmd_rkc(cfg: RunConfig) -> int:
    if cfg.input:
        try:
            bc = load_correspondence(Path(cfg.input))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(str(exc)) from exc
        reports = [family_report(bc, modes=cfg.modes, numeric=cfg.numeric, label=Path(cfg.input).stem)]
        rejected = 0
    else:
        batch = generate_batch(BatchConfig(size=cfg.size, seed=cfg.seed, modes=cfg.modes))
        reports = [r for _, r, _ in batch]
        rejected = sum(a for *_, a in batch)
    doc = {
        "seed": None if cfg.input else cfg.seed,
        "instances": len(reports),
        "rejected_draws": rejected,
        "violations": sum(len(r.violations()) for r in reports),
        "max_magnitude": max(r.magnitude for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", cfg.out)
    return _report_status(reports)


_DISPATCH = {
    "hexagon-report": _cmd_hexagon_report,
    "hexagon-mesh": _cmd_hexagon_mesh,
    "kpp": _cmd_kpp,
    "verify": _cmd_verify,
    "rkc": _cmd_rkc,
}


def run(cfg: RunConfig) -> int:
    """Execute one command; map failures onto exit codes."""
    if cfg.command not in _DISPATCH:
        print(f"error: unknown command {cfg.command!r}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return _DISPATCH[cfg.command](cfg)
    except (InputError, CorrespondenceError, AdmissibilityError, PremiseError, BranchError,
            RadiusError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, DirectionDependenceError, QuadratureError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def _tolerance_pair(text: str):
    name, _, value = text.partition("=")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zerocurv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, numeric=None):
        p.add_argument("--out", help="output file (default: stdout)")
        if numeric == "on":
            p.add_argument("--no-numeric", dest="numeric", action="store_false",
                           help="skip the Richardson limit estimate")
        elif numeric == "off":
            p.add_argument("--numeric", dest="numeric", action="store_true",
                           help="add the Richardson limit estimate")

    p = sub.add_parser("hexagon-report", help="curvature report of the hexagon graph")
    common(p, "on")
    p = sub.add_parser("hexagon-mesh", help="tessellate the hexagon graph")
    common(p)
    p.add_argument("--n-radial", type=int, default=16)
    p.add_argument("--n-angular", type=int, default=48)
    p.add_argument("--r-max", type=float, default=0.9)
    p.add_argument("--format", choices=("obj", "csv"), default="obj")
    p = sub.add_parser("kpp", help="curvature report for a Weierstrass data file")
    p.add_argument("input")
    common(p, "on")
    p = sub.add_parser("verify", help="run the invariant suite")
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=_tolerance_pair, action="append", default=[],
                   metavar="NAME=VALUE", help="override a tolerance")
    p = sub.add_parser("rkc", help="reports for a correspondence file or a seeded batch")
    common(p, "off")
    p.add_argument("--correspondence", dest="input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=200)
    p.add_argument("--modes", type=int, default=512)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    fields["tolerances"] = dict(getattr(args, "tol", []))
    return run(RunConfig(**fields))


if __name__ == "__main__":
    sys.exit(main())
