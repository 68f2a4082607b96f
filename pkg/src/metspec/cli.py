"""Command line entry point: ``metspec run|list|validate``.

Exit status: 0 when every check passes, 1 when a check fails, 2 for
usage and configuration errors. Output goes to ``--out``, else to
``$METSPEC_OUT``, else to ``./metspec-out``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .config import PARAMS_SCHEMA, ConfigError, load_config, validate_config, with_defaults
from .experiments import CATALOG, run_experiment
from .io import dumps, write_csv, write_json

ENV_OUT = "METSPEC_OUT"
DEFAULT_OUT = "metspec-out"


def _out_dir(arg) -> Path:
    return Path(arg or os.environ.get(ENV_OUT) or DEFAULT_OUT)


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.horizon is not None:
        cfg["horizon"] = args.horizon
    try:
        validate_config(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = _out_dir(args.out)
    prefix = cfg["output"]["prefix"]
    formats = cfg["output"]["formats"]
    start = time.perf_counter()
    rep = run_experiment(cfg)
    elapsed = time.perf_counter() - start
    artifacts = []
    if "csv" in formats:
        for name, (header, rows) in sorted(rep.tables.items()):
            fname = f"{prefix}.{name}.csv"
            write_csv(out / fname, header, rows)
            artifacts.append(fname)
    payload = rep.to_dict()
    payload["artifacts"] = artifacts
    if "json" in formats:
        write_json(out / f"{prefix}.report.json", payload)
    # wall time is kept out of the report so that reports are reproducible byte for byte
    write_json(out / f"{prefix}.timing.json", {"experiment": rep.experiment, "wall_time_s": round(elapsed, 6)})
    for c in rep.checks:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"{status} {c['name']}: value={c['value']} tolerance={c['tolerance']}")
    print(f"{'PASS' if rep.passed else 'FAIL'} {rep.experiment} ({elapsed:.2f} s) -> {out}")
    return 0 if rep.passed else 1


def cmd_list(args) -> int:
    if args.json:
        print(dumps({name: {"topic": e["topic"], "params_schema": PARAMS_SCHEMA[name],
                            "example": e["example"]} for name, e in CATALOG.items()}), end="")
        return 0
    for name, entry in CATALOG.items():
        params = sorted(PARAMS_SCHEMA[name]["properties"])
        print(f"{name}: {entry['topic']}")
        print(f"    params: {', '.join(params) if params else '(none)'}")
        print(f"    example: {json.dumps(entry['example'], sort_keys=True)}")
    return 0


def cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(dumps(with_defaults(cfg)), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="metspec", description="Drift, metric functional and random product experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the experiment described by a config file")
    run.add_argument("config")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--horizon", type=int, help="override the config horizon")
    run.add_argument("--out", help=f"output directory (default: ${ENV_OUT} or ./{DEFAULT_OUT})")
    run.set_defaults(func=cmd_run)
    ls = sub.add_parser("list", help="list experiments with their parameters and an example config")
    ls.add_argument("--json", action="store_true", help="machine-readable catalog")
    ls.set_defaults(func=cmd_list)
    val = sub.add_parser("validate", help="check a config and print it with defaults filled in")
    val.add_argument("config")
    val.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
