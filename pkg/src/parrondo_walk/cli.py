"""Command-line entry point: ``parrondo-walk run|optimize|list-presets``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import ConfigError, load_config, validate
from .errors import LatticeTooSmallError
from .presets import PRESETS
from .runner import apply_overrides, run

OUT_DIR_ENV = "PARRONDO_WALK_OUT_DIR"


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parrondo-walk", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("source", help="preset name or path to a YAML/JSON config or run manifest")
    common.add_argument("--seed", type=int, help="override the RNG seed")
    common.add_argument("--out-dir", type=Path, help=f"output directory (default: ${OUT_DIR_ENV} or ./runs/<name>)")
    common.add_argument("--format", choices=("csv", "json"), help="data file format")
    common.add_argument("--steps", type=int, help="override the number of walk steps")
    common.add_argument("--threads", type=int, default=None, help="FFT worker threads")

    sub.add_parser("run", parents=[common], help="run a preset or config file")
    sub.add_parser("optimize", parents=[common], help="run a coin grid search")
    sub.add_parser("list-presets", help="list the built-in figure presets")
    return parser


def _error(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    if args.command == "list-presets":
        for name, preset in PRESETS.items():
            print(f"{name:12s} {preset['kind']:9s} {preset['description']}")
        return 0

    try:
        cfg = apply_overrides(load_config(args.source), args.seed, args.steps, args.format)
        validate(cfg)
        if args.command == "optimize" and cfg.kind != "optimize":
            raise ConfigError(f"config {cfg.name!r} has kind {cfg.kind!r}; optimize needs kind 'optimize'")
        out_dir = args.out_dir or Path(os.environ.get(OUT_DIR_ENV, "runs")) / cfg.name
        manifest = run(cfg, out_dir, workers=args.threads)
    except ConfigError as exc:
        return _error(type(exc).__name__, str(exc), 2)
    except LatticeTooSmallError as exc:
        return _error("LatticeTooSmallError", str(exc), 3)
    except OSError as exc:
        return _error("OSError", str(exc), 4)
    print(f"wrote {len(manifest['files'])} files to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
