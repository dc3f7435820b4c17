"""Command-line entry point: ``run``, ``validate``, ``plot``, ``list-problems``.

Exit codes: 0 success, 2 configuration/input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys

from .config import load_config
from .core import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _load_all(paths):
    out = []
    for p in paths:
        try:
            out.append(load_config(p))
        except OSError as exc:
            raise ConfigError(f"{p}: {exc.strerror}") from None
        except ConfigError as exc:
            raise ConfigError(f"{p}: {exc}") from None
    return out


def cmd_run(args) -> int:
    from .bench import execute_many

    configs = _load_all(args.config)
    for cfg in configs:
        for w in cfg.warnings:
            print(f"warning: {cfg.name}: {w}", file=sys.stderr)
    code = EXIT_OK
    for rc, summary, path in execute_many(configs, args.out_dir, args.jobs):
        print(f"{summary} csv={path}")
        code = max(code, rc)
    return code


def cmd_validate(args) -> int:
    for cfg in _load_all(args.config):
        status = "ok" if not cfg.warnings else "ok with warnings"
        print(f"{cfg.name}: {status}")
        for w in cfg.warnings:
            print(f"  warning: {w}")
    return EXIT_OK


def cmd_plot(args) -> int:
    from .plotting import emit_svg

    metrics = args.metrics.split(",") if args.metrics else None
    try:
        notes = emit_svg(args.inputs, args.out, metrics=metrics, labels=args.labels)
    except OSError as exc:
        raise ConfigError(f"{exc.filename}: {exc.strerror}") from None
    for n in notes:
        print(f"note: {n}", file=sys.stderr)
    return EXIT_OK


def cmd_list_problems(args) -> int:
    from .problems import PROBLEMS

    for kind, cls in PROBLEMS.items():
        doc = (cls.__doc__ or "").strip().splitlines()[0]
        print(f"{kind}\t{doc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hvivr", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute benchmark configs")
    p.add_argument("--config", nargs="+", required=True, metavar="PATH")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="check configs without running")
    p.add_argument("--config", nargs="+", required=True, metavar="PATH")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plot", help="render CSVs to a log-log SVG")
    p.add_argument("--inputs", nargs="+", required=True, metavar="CSV")
    p.add_argument("--out", required=True, metavar="SVG")
    p.add_argument("--metrics", default=None, help="comma list from feas,opt,dist")
    p.add_argument("--labels", nargs="+", default=None)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("list-problems", help="print built-in problem kinds")
    p.set_defaults(func=cmd_list_problems)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
