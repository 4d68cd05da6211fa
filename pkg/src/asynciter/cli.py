"""Command line interface.

    asynciter simulate CONFIG.json
    asynciter rate --rho R --gamma G --T T --n N [--deterministic]
    asynciter check-window MATRIX.json MASKS.json

Exit status: 0 on success, 1 on invalid input, 2 on runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import ConfigError, parse_config
from .errors import AsyncIterError
from .rate import RateMode, theoretical_rate
from .scenario import run_scenario
from .spectral_analysis import window_product_radius

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from exc


def load_matrix(obj) -> list[list[float]]:
    """``{"n": int, "entries": [row-major numbers]}`` -> nested rows."""
    if not isinstance(obj, dict) or set(obj) != {"n", "entries"}:
        raise InputError('matrix must be an object with exactly the keys "n" and "entries"')
    n, entries = obj["n"], obj["entries"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError("matrix.n must be a positive integer")
    if not isinstance(entries, list) or len(entries) != n * n:
        raise InputError(f"matrix.entries must hold n*n = {n * n} numbers")
    if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in entries):
        raise InputError("matrix.entries must be numbers")
    return [entries[i * n:(i + 1) * n] for i in range(n)]


def load_masks(obj, n: int) -> list[list[bool]]:
    if not isinstance(obj, list) or not obj:
        raise InputError("masks must be a non-empty array of 0/1 arrays")
    for t, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n or any(v not in (0, 1) or isinstance(v, float) for v in row):
            raise InputError(f"masks[{t}] must be an array of {n} zeros and ones")
    return [[bool(v) for v in row] for row in obj]


def cmd_simulate(args) -> int:
    config = parse_config(_read(args.config))
    result = run_scenario(config)
    agg = result.aggregate
    print(
        f"{config.trials} trials -> {config.output_dir}: "
        f"convergence_fraction={agg['convergence_fraction']:.3f} "
        f"failed={agg['failed_trials']}"
    )
    return EXIT_OK


def cmd_rate(args) -> int:
    mode = RateMode.DETERMINISTIC if args.deterministic else RateMode.PROBABILISTIC
    report = theoretical_rate(args.rho, args.gamma, args.T, args.n, mode)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def cmd_check_window(args) -> int:
    rows = load_matrix(_load_json(args.matrix))
    masks = load_masks(_load_json(args.masks), len(rows))
    report = window_product_radius(rows, masks)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asynciter", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a JSON experiment config")
    p.add_argument("config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rate", help="print theoretical convergence rates as JSON")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("check-window", help="certify one window product")
    p.add_argument("matrix")
    p.add_argument("masks")
    p.set_defaults(func=cmd_check_window)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (AsyncIterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
