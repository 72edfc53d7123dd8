"""Batch front end: run ensembles, verify oracles, summarize, sweep purity.

Exit status: 0 on success, 1 on configuration/validation failure, 2 on
verification failure.  ``CAVITYBEC_OUTPUT_DIR`` overrides the output
location of any subcommand.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config, write_example_config
from .ensemble import ensemble_stats, load_records, run_ensemble
from .errors import ConfigError
from .purity import purity_sweep, write_sweep_csv
from .verify import run_verification

ENV_OUTPUT_DIR = "CAVITYBEC_OUTPUT_DIR"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavitybec",
        description="Photocount-conditioned trajectories of lattice atoms in a cavity",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a seeded trajectory ensemble")
    run_p.add_argument("--config", required=False, help="YAML config file")
    run_p.add_argument("--write-example-config", metavar="PATH",
                       help="write a starter config and exit")
    run_p.add_argument("--engine", choices=("exact", "gaussian", "full"))
    run_p.add_argument("--mode", choices=("minimum", "maximum"))
    run_p.add_argument("--trajectories", type=int)
    run_p.add_argument("--master-seed", type=int, dest="master_seed")
    run_p.add_argument("--tau-max", type=float, dest="tau_max")
    run_p.add_argument("--dtau", type=float)
    run_p.add_argument("--snapshot-every", type=int, dest="snapshot_every")
    run_p.add_argument("--workers", type=int)
    run_p.add_argument("--output-dir", dest="output_dir")

    verify_p = sub.add_parser("verify", help="run the oracle verification suite")
    verify_p.add_argument("--output", help="JSON report path "
                          "(default: verify_report.json in the output dir or cwd)")

    stats_p = sub.add_parser("stats", help="summarize a run directory")
    stats_p.add_argument("--input", required=True, help="run output directory")
    stats_p.add_argument("--grid-points", type=int, default=101)
    stats_p.add_argument("--output-dir", dest="output_dir",
                         help="where to write stats CSVs (default: the input dir)")

    sweep_p = sub.add_parser("purity-sweep",
                             help="emit the (|alpha|, phi, purity) sweep table")
    sweep_p.add_argument("--alpha", type=float, nargs="*",
                         default=[0.25, 0.5, 1.0, 2.0, 4.0])
    sweep_p.add_argument("--phi-points", type=int, default=25)
    sweep_p.add_argument("--output", default="purity_sweep.csv")
    return parser


def _apply_env_output(path_str: str | None) -> str | None:
    env = os.environ.get(ENV_OUTPUT_DIR)
    return env if env else path_str


def _cmd_run(args) -> int:
    if args.write_example_config:
        write_example_config(args.write_example_config)
        print(f"wrote example config to {args.write_example_config}")
        return 0
    overrides = {
        key: getattr(args, key)
        for key in (
            "engine",
            "mode",
            "trajectories",
            "master_seed",
            "tau_max",
            "dtau",
            "snapshot_every",
            "workers",
            "output_dir",
        )
    }
    overrides["output_dir"] = _apply_env_output(overrides["output_dir"])
    try:
        if args.config:
            cfg = load_config(args.config, overrides)
        else:
            kwargs = {k: v for k, v in overrides.items() if v is not None}
            cfg = RunConfig(**kwargs).validate()
        outdir = run_ensemble(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {cfg.trajectories} trajectories to {outdir}")
    return 0


def _cmd_verify(args) -> int:
    report = run_verification()
    print(report.to_text())
    out = args.output
    if out is None:
        base = _apply_env_output(None) or "."
        Path(base).mkdir(parents=True, exist_ok=True)
        out = str(Path(base) / "verify_report.json")
    report.to_json(out)
    print(f"report written to {out}")
    return 0 if report.all_passed else 2


def _cmd_stats(args) -> int:
    records = load_records(args.input)
    if not records:
        print(f"no trajectory records found in {args.input}", file=sys.stderr)
        return 1
    stats = ensemble_stats(records, grid_points=args.grid_points)
    outdir = Path(_apply_env_output(args.output_dir) or args.input)
    outdir.mkdir(parents=True, exist_ok=True)
    stats.to_csv(outdir / "ensemble_m.csv")
    stats.peaks_to_csv(outdir / "doublet_peaks.csv")
    print(
        f"{stats.n_trajectories} trajectories; final <m> = {stats.m_mean[-1]:.3f}, "
        f"var(m) = {stats.m_var[-1]:.3f}, {len(stats.peaks)} snapshot peaks"
    )
    print(f"stats written to {outdir}")
    return 0


def _cmd_purity_sweep(args) -> int:
    phis = list(np.linspace(0.0, math.pi / 2, args.phi_points))
    rows = purity_sweep(args.alpha, phis)
    out = args.output
    env = os.environ.get(ENV_OUTPUT_DIR)
    if env:
        Path(env).mkdir(parents=True, exist_ok=True)
        out = str(Path(env) / Path(out).name)
    write_sweep_csv(rows, out)
    threshold_rows = [r for r in rows if abs(r[0] * math.sin(r[1]) - 0.25) < 1e-12]
    if threshold_rows:
        a, phi, p = threshold_rows[0]
        print(f"threshold row: |alpha|={a}, phi={phi:.6f}, purity={p:.6f}")
    print(f"sweep written to {out}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "stats":
        return _cmd_stats(args)
    if args.command == "purity-sweep":
        return _cmd_purity_sweep(args)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
