"""Command line front end.

    tdgl-bcsbec run <config> [--out DIR] [--seed N] [--quiet]
    tdgl-bcsbec suite <directory> [--out DIR] [--quiet]

Exit codes: 0 all certificates passed, 1 at least one certificate failed,
2 configuration or runtime error. TDGL_OUT_DIR is the output-directory
fallback when neither --out nor the config's run.out is given.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, load_config
from .dynamics import BlowUpError
from .experiments import run_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdgl-bcsbec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment configuration")
    run.add_argument("config", type=Path)
    suite = sub.add_parser("suite", help="run every *.cfg in a directory")
    suite.add_argument("directory", type=Path)
    for sp in (run, suite):
        sp.add_argument("--out", default=None, help="output directory (fallback: TDGL_OUT_DIR, then cwd)")
        sp.add_argument("--quiet", action="store_true")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def _run_one(path: Path, out, seed, quiet) -> int:
    try:
        cfg = load_config(path)
        if seed is not None:
            cfg = replace(cfg, seed=seed)
        bundle = run_scenario(cfg, out=out)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BlowUpError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    if not quiet:
        print(f"[{cfg.name}] scenario={cfg.scenario} wallclock={bundle.wallclock_s:.2f}s")
        for cert in bundle.certificates:
            print(f"  {'PASS' if cert.passed else 'FAIL'}  {cert.name}")
        for f in bundle.files:
            print(f"  wrote {f}")
    return 0 if bundle.passed else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _run_one(args.config, args.out, args.seed, args.quiet)
    configs = sorted(args.directory.glob("*.cfg"))
    if not configs:
        print(f"error: no *.cfg files in {args.directory}", file=sys.stderr)
        return 2
    worst = 0
    for path in configs:
        code = _run_one(path, args.out, None, args.quiet)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
