"""Command line entry point.

    fdrbench run --config cfg.yaml --out results/ [--replicates R] [--alpha A] [--emit volcano,ma,...]
    fdrbench adjust --pvalues p.csv --method bh|by|storey --alpha A [--out adjusted.csv]
    fdrbench defaults [--write cfg.yaml]

Exit codes: 0 success, 2 config or input error, 3 I/O error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .experiment import (
    ConfigError,
    RunOptions,
    config_from_mapping,
    config_to_mapping,
    format_report,
    fmt,
    parse_config,
    parse_emit,
    run_experiment,
)
from .multtest import adjust
from .randgen import ParameterError
from .simcore import SimulationConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

log = logging.getLogger("fdrbench")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdrbench", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress per replicate")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate, test, correct and score replicates")
    run.add_argument("--config", help="YAML/JSON config; omitted keys take the defaults")
    run.add_argument("--out", help="output directory (overrides the config's 'out')")
    run.add_argument("--replicates", type=int)
    run.add_argument("--alpha", type=float)
    run.add_argument("--emit", help="comma-separated subset of volcano,ma,roc,pr,pca,dist,matrix,truth")

    adj = sub.add_parser("adjust", help="correct a column of p-values")
    adj.add_argument("--pvalues", required=True, help="CSV with header 'p', one p-value per line")
    adj.add_argument("--method", required=True, choices=["bh", "by", "storey"])
    adj.add_argument("--alpha", type=float, default=0.05)
    adj.add_argument("--lambda", dest="lam", type=float, default=0.5, help="Storey pi0 lambda")
    adj.add_argument("--out", help="write here instead of stdout")

    dflt = sub.add_parser("defaults", help="print the default config")
    dflt.add_argument("--write", help="write the defaults to this path")
    return parser


def _cmd_run(args) -> int:
    if args.config:
        cfg, opts = parse_config(args.config)
    else:
        cfg, opts = config_from_mapping({})
    if args.out is not None:
        opts.out = args.out
    if args.replicates is not None:
        opts.replicates = args.replicates
    if args.alpha is not None:
        opts.alpha = args.alpha
    if args.emit is not None:
        opts.emit = parse_emit(args.emit)
    opts.validate()
    if opts.out is None:
        raise ConfigError("no output directory: pass --out or set 'out' in the config", "out")
    summary = run_experiment(cfg, opts)
    print(format_report(summary))
    print(f"outputs written to {opts.out}")
    return EXIT_OK


def read_pvalues(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["p"]:
            raise ConfigError(f"{path}: expected a single header column 'p'", "pvalues")
        values = []
        for lineno, row in enumerate(reader, start=2):
            if not row or not row[0].strip():
                continue
            try:
                values.append(float(row[0]))
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: not a number: {row[0]!r}", "pvalues") from exc
    if not values:
        raise ConfigError(f"{path}: no p-values", "pvalues")
    return np.array(values)


def _cmd_adjust(args) -> int:
    p = read_pvalues(args.pvalues)
    try:
        res = adjust(p, args.method, args.alpha, args.lam)
    except ParameterError as exc:
        raise ConfigError(str(exc), exc.field) from exc
    lines = ["p,adjusted,significant"]
    lines += [f"{fmt(pi)},{fmt(ai)},{fmt(si)}" for pi, ai, si in zip(p, res.adjusted, res.significant)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    msg = f"{res.method}: {res.n_significant}/{p.size} significant at alpha={args.alpha}"
    if res.method == "StoreyQ":
        msg += f" (pi0_hat={res.pi0_hat:.4f})"
    print(msg, file=sys.stderr)
    return EXIT_OK


def _cmd_defaults(args) -> int:
    text = yaml.safe_dump(config_to_mapping(SimulationConfig(), RunOptions()), sort_keys=False)
    if args.write:
        Path(args.write).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handlers = {"run": _cmd_run, "adjust": _cmd_adjust, "defaults": _cmd_defaults}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        where = f" [{exc.field}]" if exc.field else ""
        print(f"config error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (RuntimeError, ParameterError, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
