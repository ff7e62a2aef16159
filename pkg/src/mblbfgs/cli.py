"""Command-line front end.

`mblbfgs run <config.yaml>` executes the configured experiment and writes
three kinds of machine-readable output into the output directory:

* ``trace_<method>_rep<NNN>.csv``: one row per iteration with columns
  k, train_loss, val_loss, test_loss, test_ccr, m_k, q_k;
* ``aggregate.yaml``: per-method mean/std of CCR and rank over repetitions;
* ``manifest.yaml``: the fully resolved configuration, re-runnable as-is.

Exit codes: 0 success, 1 configuration error, 2 runtime abort,
3 output I/O error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .benchmark import monte_carlo
from .config import ExperimentConfig
from .datasets import load_csv
from .exceptions import ConfigError, DataFormatError, MblbfgsError, MetricError
from .training import IterationRecord

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_IO = 3

TRACE_COLUMNS = ("k", "train_loss", "val_loss", "test_loss", "test_ccr", "m_k", "q_k")


def emit_trace(history: list[IterationRecord], path, *, every: int = 1) -> None:
    """Write one delimited row per iteration with fixed decimal formatting."""
    if not history:
        raise MetricError("refusing to write an empty trace")
    rows = [rec for rec in history if rec.k % every == 0]
    with open(path, "w") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for rec in rows:
            fh.write(
                f"{rec.k},{rec.train_loss:.10f},{rec.val_loss:.10f},"
                f"{rec.test_loss:.10f},{rec.test_ccr:.10f},{rec.m_k},{rec.q_k}\n"
            )


def run_experiment(config_path, *, dry_run: bool = False, seed: int | None = None,
                   out: str | None = None) -> int:
    """Execute the experiment described by a config file; returns an exit code."""
    try:
        cfg = ExperimentConfig.from_file(config_path)
        if seed is not None:
            cfg.seed = seed
        if out is not None:
            cfg.out_dir = out
        cfg.validate()
        dataset_path = cfg.resolved_dataset_path(relative_to=Path(config_path).parent)
        if not dataset_path.exists():
            raise ConfigError(f"dataset not found: {dataset_path}")
        if dry_run:
            resolved = cfg.to_dict()
            resolved["dataset"] = str(dataset_path)
            print(yaml.safe_dump(resolved, sort_keys=True), end="")
            return EXIT_OK
        if cfg.label_column is None:
            raise ConfigError("config field 'label_column': required")
        if cfg.test_count is None:
            raise ConfigError("config field 'test_count': required")
        ds = load_csv(dataset_path, cfg.label_column, delimiter=cfg.delimiter,
                      header=cfg.header)
    except (ConfigError, DataFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        result = monte_carlo(cfg, ds)
    except (ConfigError, DataFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MblbfgsError as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    try:
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for run in result.runs:
            if run.history:
                name = f"trace_{run.method.value}_rep{run.seed:03d}.csv"
                emit_trace(run.history, out_dir / name, every=cfg.trace_every)
        manifest = cfg.to_dict()
        manifest["dataset"] = str(dataset_path)
        (out_dir / "manifest.yaml").write_text(yaml.safe_dump(manifest, sort_keys=True))
        (out_dir / "aggregate.yaml").write_text(
            yaml.safe_dump(result.to_dict(), sort_keys=True))
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO

    for entry in result.excluded:
        print(
            f"warning: {entry['method']} repetition {entry['repetition']} aborted: "
            f"{entry['reason']}", file=sys.stderr)
    if cfg.repetitions == 1 and result.excluded:
        # single-run mode: a divergence means the requested training failed
        return EXIT_RUNTIME
    print(f"wrote {len(result.runs)} traces and aggregate table to {out_dir}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mblbfgs",
                                     description="multi-batch L-BFGS training harness")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the experiment described by a config file")
    run.add_argument("config", help="path to a YAML experiment config")
    run.add_argument("--dry-run", action="store_true",
                     help="validate and print the resolved config without computing")
    run.add_argument("--seed", type=int, default=None, help="override the master seed")
    run.add_argument("--out", default=None, help="override the output directory")
    args = parser.parse_args(argv)
    return run_experiment(args.config, dry_run=args.dry_run, seed=args.seed, out=args.out)


if __name__ == "__main__":
    sys.exit(main())
