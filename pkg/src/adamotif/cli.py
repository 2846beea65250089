"""Command-line entry point.

Exit codes: 0 on success, 1 on usage or configuration errors, 2 when a
pipeline stage fails.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import build_config, read_config
from .errors import AdaMotifError, DomainError, StageError
from .graph import FORMATS
from .pipeline import DUMPS, MODES, OUTPUT_FORMATS, run_pipeline, write_outputs

EXIT_OK, EXIT_USAGE, EXIT_PIPELINE = 0, 1, 2

log = logging.getLogger("adamotif")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="adamotif", description="Simplify a graph into a scene of community motifs.")
    p.add_argument("--input", help="edge list file")
    p.add_argument("--input-format", choices=FORMATS, help="default: guessed from the extension")
    p.add_argument("--output", help="output file (with --format both, the extension is replaced)")
    p.add_argument("--format", choices=OUTPUT_FORMATS, help="output format (default svg)")
    p.add_argument("--mode", choices=MODES, help="adamotif (default) or primitive")
    p.add_argument("--seed", type=int, help="master random seed (default 42)")
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--resolution", type=float, help="modularity resolution (default 1.0)")
    for kind in DUMPS:
        p.add_argument(f"--dump-{kind}", action="store_true", help=f"write the {kind} artifact as JSON")
    p.add_argument("--dump-dir", help="directory for dumps (default: next to the output)")
    p.add_argument("--report", help="write the run report as JSON")
    p.add_argument("--canvas", help="canvas size WIDTHxHEIGHT in px (default 1600x1200)")
    p.add_argument("--label-threshold", type=int, help="label edges carrying at least N edges (default 5)")
    p.add_argument("--workers", type=int, help="worker threads for per-community stages (default 1)")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    return p


def _overrides(args) -> dict:
    dumps = [k for k in DUMPS if getattr(args, f"dump_{k}")]
    return {
        "input": args.input,
        "input_format": args.input_format,
        "output": args.output,
        "format": args.format,
        "mode": args.mode,
        "seed": args.seed,
        "resolution": args.resolution,
        "report": args.report,
        "canvas": args.canvas,
        "label_threshold": args.label_threshold,
        "workers": args.workers,
        "dump": ",".join(dumps) if dumps else None,
        "dump_dir": args.dump_dir,
    }


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"adamotif: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        parser = read_config(args.config) if args.config else None
        cfg = build_config(parser, _overrides(args))
        if cfg.input is None:
            raise DomainError("--input is required (on the command line or in [run])")
        if cfg.output is None:
            raise DomainError("--output is required (on the command line or in [run])")
        cfg.validate_paths()
    except (OSError, DomainError, ValueError) as exc:
        print(f"adamotif: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        scene, report = run_pipeline(cfg)
        written = write_outputs(scene, report, cfg)
    except StageError as exc:
        print(f"adamotif: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except (AdaMotifError, OSError) as exc:
        print(f"adamotif: error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    for w in report.warnings:
        log.warning(w)
    log.info("done in %.2fs: %s", report.total_seconds, ", ".join(written))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
