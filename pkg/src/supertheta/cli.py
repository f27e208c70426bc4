"""Command line entry point: ``supertheta run <config>``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from .pipeline import PipelineError, ProblemConfig, ValidationError, run_pipeline

EXIT_OK, EXIT_VALIDATION, EXIT_PIPELINE = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="supertheta",
                                 description="Theta nullvalues of supersingular abelian varieties E^g/H.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the pipeline on a JSON problem description")
    run.add_argument("config")
    run.add_argument("--mode", choices=("full", "squares"), default=None,
                     help="override the config's mode")
    run.add_argument("--out", default=None, help="write the result JSON here instead of stdout")
    run.add_argument("--threads", type=int, default=None,
                     help="evaluate theta characteristics on N threads")
    run.add_argument("--dump-intermediates", action="store_true",
                     help="on failure, include partial results in the error output")
    run.add_argument("--no-qtable", action="store_true",
                     help="skip the level 4 q table (full mode only)")
    run.add_argument("--timings", action="store_true", help="include per-stage wall-clock timings")
    run.add_argument("-v", "--verbose", action="store_true")
    return ap


def _emit(payload: dict, out: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def run(args) -> int:
    try:
        cfg = ProblemConfig.load(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    changes = {}
    if args.mode:
        changes["mode"] = args.mode
    if args.threads:
        changes["threads"] = args.threads
    if args.no_qtable:
        changes["qtable"] = False
    cfg = dataclasses.replace(cfg, **changes)
    try:
        result = run_pipeline(cfg)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        if args.dump_intermediates:
            _emit({"error": str(exc), "partial": exc.partial}, args.out)
        return EXIT_PIPELINE
    _emit(result.to_json(cfg, timings=args.timings), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return run(args)
    return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
