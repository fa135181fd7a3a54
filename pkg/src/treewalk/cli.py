"""Command-line entry point: run verification suites, run experiment configs,
and summarize finished runs.

Exit codes are a stable contract: 0 success, 1 tolerance or property failure,
2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import ExperimentError
from .runconfig import (DEFAULT_RUN, ConfigError, RunConfig, canonical_json,
                        load_config, parse_config, read_manifest, verify_checksums,
                        write_run)

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treewalk",
        description="Markov chains on groups acting on trees: verification "
                    "suites and theorem-scale experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run invariant/property suites")
    p_verify.add_argument("suite", choices=["geometry", "projections", "kernels", "all"])
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--samples", type=int, default=200)

    p_exp = sub.add_parser("experiment", help="run an experiment config file")
    p_exp.add_argument("config", help="JSON config path, or 'default'")
    p_exp.add_argument("--out", default="runs/latest", help="output directory")
    p_exp.add_argument("--seed", type=int, default=None,
                       help="override the config master seed")
    p_exp.add_argument("--threads", type=int, default=None)
    p_exp.add_argument("--tolerance-scale", type=float, default=None)

    p_rep = sub.add_parser("report", help="summarize a finished run directory")
    p_rep.add_argument("run_dir")
    return parser


def cmd_verify(args) -> int:
    from .verify import run_suite

    try:
        violations, messages = run_suite(args.suite, args.seed, args.samples)
    except KeyError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for line in messages:
        print(line)
    print(f"total violations: {violations}")
    return EXIT_OK if violations == 0 else EXIT_TOLERANCE


def cmd_experiment(args) -> int:
    try:
        if args.config == "default":
            data = dict(DEFAULT_RUN)
        else:
            data = json.loads(Path(args.config).read_text())
        if args.seed is not None:
            data["master_seed"] = args.seed
            for entry in data.get("experiments", []):
                entry.pop("master_seed", None)
        if args.threads is not None:
            data["threads"] = args.threads
            for entry in data.get("experiments", []):
                entry.pop("threads", None)
        if args.tolerance_scale is not None:
            data["tolerance_scale"] = args.tolerance_scale
        run_cfg = parse_config(data)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    from .experiments import run_experiment

    reports = []
    try:
        for cfg in run_cfg.experiments:
            reports.append(run_experiment(cfg))
    except ExperimentError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - runtime failures get exit 3
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    out = write_run(args.out, run_cfg, reports)
    failed = 0
    for rep in reports:
        verdict = "PASS" if rep.passed else "FAIL"
        failed += not rep.passed
        print(f"{verdict}  {rep.experiment_id} ({rep.kind})")
    print(f"run directory: {out}")
    return EXIT_OK if failed == 0 else EXIT_TOLERANCE


def cmd_report(args) -> int:
    try:
        manifest = read_manifest(args.run_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    bad = verify_checksums(args.run_dir)
    rows = []
    for exp_id, entry in manifest.get("reports", {}).items():
        path = Path(args.run_dir) / entry["file"]
        detail = ""
        if path.exists():
            report = json.loads(path.read_text())
            fits = report.get("fits", {})
            keys = [k for k in fits if isinstance(fits[k], (int, float))][:2]
            detail = ", ".join(f"{k}={fits[k]:.4g}" for k in keys)
        verdict = "PASS" if entry.get("passed") else "FAIL"
        if exp_id in bad:
            verdict = "TAMPERED"
        rows.append((exp_id, verdict, detail))
    width = max((len(r[0]) for r in rows), default=10)
    print(f"run of {manifest.get('timestamp')} (code {manifest.get('code_version')})")
    for exp_id, verdict, detail in rows:
        print(f"  {exp_id:<{width}}  {verdict:<9} {detail}")
    if bad:
        print(f"integrity warning: checksum mismatch for {sorted(bad)}")
        return EXIT_TOLERANCE
    if any(not e.get("passed") for e in manifest.get("reports", {}).values()):
        return EXIT_TOLERANCE
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    handlers = {
        "verify": cmd_verify,
        "experiment": cmd_experiment,
        "report": cmd_report,
    }
    return handlers[args.command](args)


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
