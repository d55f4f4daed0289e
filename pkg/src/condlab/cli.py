"""Command-line entry point.

``condlab run <config.toml> [--seed N] [--out DIR]`` executes one experiment;
``condlab report <manifest.json> ...`` summarizes previous runs.

Exit codes: 0 when all checks pass, 1 on a check failure or a runtime error
inside an experiment, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import load_config
from .errors import CondlabError, ConfigError
from .experiments import report, run


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="condlab",
        description="Seeded numerical experiments on conditioning and reparameterization "
        "in Bayesian inverse problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one experiment from a TOML config")
    run_p.add_argument("config", help="path to the experiment config file")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.add_argument("--out", default=None, help="override the output directory")

    report_p = sub.add_parser("report", help="summarize one or more run manifests")
    report_p.add_argument("manifests", nargs="*", help="paths to manifest.json files")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = load_config(args.config)
            if args.seed is not None:
                if args.seed < 0:
                    raise ConfigError("seed: violates seed >= 0")
                config = replace(config, seed=args.seed)
            if args.out is not None:
                config = replace(config, output_dir=args.out)
            result = run(config)
            status = "pass" if result.passed else "FAIL"
            print(f"{config.experiment}: {status} ({result.manifest_path})")
            for check in result.manifest["checks"]:
                mark = "ok " if check["passed"] else "BAD"
                print(f"  [{mark}] {check['name']}: computed={check['computed']}")
            return 0 if result.passed else 1
        document, any_failed = report(args.manifests)
        print(document, end="")
        return 1 if any_failed else 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CondlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
