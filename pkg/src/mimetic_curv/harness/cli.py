"""Command-line front end.

    mimetic-curv run <config.json> [overrides]   one experiment
    mimetic-curv tables [--out DIR]              regenerate all study tables
    mimetic-curv verify                          run the acceptance suite
"""

from __future__ import annotations

import argparse
import sys

from .acceptance import run_all
from .config import EXPERIMENTS, ExperimentConfig, load_config
from .experiments import run_convergence, run_gauss_check


def _add_override_flags(p: argparse.ArgumentParser):
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--order", type=int)
    p.add_argument("--cells", type=lambda s: [int(c) for c in s.split(",")],
                   help="comma-separated cell counts, e.g. 20,40,80")
    p.add_argument("--radii", type=lambda s: tuple(float(c) for c in s.split(",")),
                   help="semi-annulus radii a,b")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--d1", type=float)
    p.add_argument("--d2", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--bc", choices=["dirichlet_exact", "closed_wall"])
    p.add_argument("--solver", choices=["direct", "bicgstab", "cgnr"])
    p.add_argument("--out", dest="out_dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--emit-fields", dest="emit_fields", action="store_const", const=True)


def _overrides(args) -> dict:
    keys = ("experiment", "order", "cells", "radii", "epsilon", "d1", "d2", "theta",
            "dt", "t_end", "bc", "solver", "out_dir", "seed", "samples", "emit_fields")
    return {k: getattr(args, k, None) for k in keys}


def _cmd_run(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    if cfg.experiment == "gauss_check":
        res = run_gauss_check(cfg)
        for (mapping, order), regime in sorted(res.regimes.items()):
            print(f"{mapping} k={order}: {regime}")
        print(f"wrote {res.csv_path} and {res.summary_path}")
        return 0 if res.ok else 1
    res = run_convergence(cfg)
    print(",".join(res.columns))
    for row in res.rows:
        print(",".join(str(c) for c in row))
    if res.csv_path:
        print(f"wrote {res.csv_path}")
    for m, msg in res.failed:
        print(f"resolution m={m} failed: {msg}", file=sys.stderr)
    return 1 if res.failed else 0


def _cmd_tables(args) -> int:
    status = 0
    for experiment in EXPERIMENTS:
        cfg = ExperimentConfig(experiment=experiment, out_dir=args.out_dir)
        print(f"== {experiment} ==", flush=True)
        if experiment == "gauss_check":
            res = run_gauss_check(cfg)
            status |= 0 if res.ok else 1
            print(f"wrote {res.summary_path}")
            continue
        res = run_convergence(cfg)
        status |= 1 if res.failed else 0
        print(f"wrote {res.csv_path}")
    return status


def _cmd_verify(_args) -> int:
    results = run_all()
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mimetic-curv",
        description="High-order mimetic-operator convergence studies on "
                    "curvilinear staggered grids",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a JSON config")
    p_run.add_argument("config", nargs="?", default=None,
                       help="flat JSON config file (flags override)")
    _add_override_flags(p_run)
    p_run.set_defaults(fn=_cmd_run)

    p_tab = sub.add_parser("tables", help="regenerate every study table CSV")
    p_tab.add_argument("--out", dest="out_dir", default="tables_out")
    p_tab.set_defaults(fn=_cmd_tables)

    p_ver = sub.add_parser("verify", help="run the acceptance suite")
    p_ver.set_defaults(fn=_cmd_verify)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
