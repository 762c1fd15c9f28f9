"""Command line entry point.

    netcons simulate --config run.json --out results/
    netcons preset relaxation-sweep --out results/sweep
    netcons eoc --ref limit.csv --runs a.csv b.csv c.csv

Exit status is 0 on success, 1 for invalid input and 2 when a run fails.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .analysis import ErrorTable
from .config import ConfigError, parse_config
from .coupling import CouplingError
from .flux import DomainError
from .output import read_snapshot
from .presets import PRESETS, run_preset, simulate
from .scheme import SimulationError

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2

log = logging.getLogger("netcons")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netcons", description="Conservation laws on single-junction networks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a JSON experiment configuration")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", type=Path, help="output directory (defaults to output.directory of the config)")

    p = sub.add_parser("preset", help="run a named experiment")
    p.add_argument("name", choices=PRESETS)
    p.add_argument("--alpha", type=float, help="run a single distribution rate")
    p.add_argument("--epsilon", type=float, help="relaxation parameter (single member of a sweep)")
    p.add_argument("--cells", type=int, help="cells per edge")
    p.add_argument("--jobs", type=int, default=1, help="parallel member runs")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("eoc", help="L1 errors and convergence orders of snapshots against a reference")
    p.add_argument("--ref", required=True, type=Path)
    p.add_argument("--runs", required=True, nargs="+", type=Path)
    p.add_argument("--params", nargs="+", type=float, help="parameter value per run (e.g. epsilon)")
    p.add_argument("--out", type=Path, help="CSV destination (stdout if omitted)")
    return parser


def _snapshot_l1(ref: dict, other: dict, path: Path) -> float:
    if sorted(ref) != sorted(other):
        raise ValueError(f"{path}: edge set {sorted(other)} differs from reference {sorted(ref)}")
    total = 0.0
    dx = None
    for k in ref:
        xr, xo = ref[k]["x"], other[k]["x"]
        if xr.shape != xo.shape or not np.allclose(xr, xo, rtol=0, atol=1e-12):
            raise ValueError(f"{path}: grid of edge {k} differs from reference")
        dx = 1.0 / xr.size
        total += float(np.abs(ref[k]["u"] - other[k]["u"]).sum())
    return dx * total


def _cmd_simulate(args) -> int:
    config = parse_config(args.config.read_text())
    out = args.out if args.out is not None else Path(config.output.directory)
    result = simulate(config, out)
    log.info("finished at t=%g after %d steps, mass defect %.2e", result.trajectory.final.t,
             result.audit.steps, result.audit.max_defect)
    for p in result.files:
        print(p)
    return EXIT_OK


def _cmd_preset(args) -> int:
    result = run_preset(args.name, args.out, alpha=args.alpha, epsilon=args.epsilon, cells=args.cells, jobs=args.jobs)
    if result.error_table is not None:
        print(f"{'epsilon':>10} {'L1 error':>12} {'EOC':>6}")
        for r in result.error_table.rows:
            order = "" if math.isnan(r.eoc) else f"{r.eoc:.2f}"
            print(f"{r.parameter:>10.0e} {r.l1_error:>12.4e} {order:>6}")
    for label, member in result.members.items():
        a = member.audit
        print(f"{label or args.name}: {a.steps} steps, mass defect {a.max_defect:.2e} ({'ok' if a.ok else 'FAILED'})")
    print(f"results written to {args.out}")
    return EXIT_OK


def _cmd_eoc(args) -> int:
    if args.params is not None and len(args.params) != len(args.runs):
        raise ValueError("--params needs one value per run")
    ref = read_snapshot(args.ref)
    errors = [_snapshot_l1(ref, read_snapshot(p), p) for p in args.runs]
    params = args.params if args.params is not None else [p.stem for p in args.runs]
    table = ErrorTable.from_errors(params, errors)
    if args.out is not None:
        table.write_csv(args.out)
    else:
        table.write(sys.stdout)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    handler = {"simulate": _cmd_simulate, "preset": _cmd_preset, "eoc": _cmd_eoc}[args.command]
    try:
        return handler(args)
    except (SimulationError, CouplingError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
