"""Command line entry point.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or
configuration errors.  Flags override the config file, which overrides the
built-in defaults.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, DomainError
from .harness.config import EXPERIMENTS, default_config, load_config
from .harness.report import load_report
from .simulate import default_threads

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

# which parameter --tol sets for each experiment
TOL_KEYS = {"phi": "homogeneity_tol", "density": "tol", "green": "tol"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conekernel",
                                description="Verification experiments for cone-supported stable-like jump processes.")
    sub = p.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", type=Path, help="YAML experiment config")
        sp.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides config)")
        sp.add_argument("--out", type=Path, help="run directory for config snapshot, CSVs and report")
        sp.add_argument("--threads", type=int, help="worker threads (default: $CONEKERNEL_THREADS or 1)")
        sp.add_argument("--tol", type=float, help="numerical tolerance (phi, density, green)")
    rp = sub.add_parser("report", help="summarise report.json files of earlier runs")
    rp.add_argument("paths", nargs="*", type=Path, help="run directories or report files")
    rp.add_argument("--out", type=Path, help="directory searched recursively for report.json")
    return p


def _resolve(args) -> tuple:
    cfg = load_config(args.config) if args.config is not None else default_config(args.command)
    if cfg.experiment != args.command:
        raise ConfigError(f"config is for {cfg.experiment!r}, not {args.command!r}")
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.tol is not None:
        key = TOL_KEYS.get(args.command)
        if key is None:
            raise ConfigError(f"--tol is not used by {args.command!r}")
        if not args.tol > 0:
            raise ConfigError("--tol must be positive")
        cfg = cfg.with_params(**{key: args.tol})
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        threads = args.threads
    else:
        threads = default_threads()
    out = args.out if args.out is not None else (
        Path(cfg.output) if cfg.output is not None else Path("conekernel-runs") / f"{cfg.experiment}-seed{cfg.seed}")
    return cfg, out, threads


def _report(args) -> int:
    paths = list(args.paths)
    if args.out is not None:
        paths.append(args.out)
    if not paths:
        paths = [Path("conekernel-runs")]
    files = []
    for p in paths:
        if p.is_dir():
            files += sorted(p.rglob("report.json"))
        elif p.is_file():
            files.append(p)
        else:
            print(f"conekernel: no such file or directory: {p}", file=sys.stderr)
            return EXIT_USAGE
    if not files:
        print("conekernel: no report.json found", file=sys.stderr)
        return EXIT_USAGE
    ok = True
    for f in files:
        rep = load_report(f)
        for c in rep["checks"]:
            print(f"[{c['status'].upper()}] {rep['experiment']}:{c['name']} measured={c['measured']} "
                  f"threshold={c['threshold']} ({f.parent})")
        ok &= rep["status"] == "pass"
    print(f"overall: {'PASS' if ok else 'FAIL'} ({len(files)} reports)")
    return EXIT_PASS if ok else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    if args.command == "report":
        return _report(args)
    try:
        cfg, out, threads = _resolve(args)
    except (ConfigError, DomainError) as exc:
        print(f"conekernel: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    from .harness.experiments import run_experiment

    report = run_experiment(cfg, out, threads)
    for line in report.summary_lines():
        print(line)
    print(f"report: {out / 'report.json'}")
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
