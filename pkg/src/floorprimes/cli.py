"""floorprimes command line.

Every option falls back to an environment variable FLOORSET_<OPTION> (dashes
become underscores, e.g. FLOORSET_WORKERS, FLOORSET_ORACLE_CEILING) and then
to a built-in default.  Exit codes: 0 ok (conjecture findings included),
1 usage, 2 counterexample to a proven theorem, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from typing import Iterable

from . import asympt, constants, floorset, identities
from .primal import is_prime

EXIT_OK, EXIT_USAGE, EXIT_THEOREM, EXIT_IO = 0, 1, 2, 3

DEFAULT_ROW_CAP = 1_000_000

# option dest -> (type, default); resolved flag > env > default
OPTION_DEFAULTS = {
    "format": (str, "csv"),
    "oracle_ceiling": (int, floorset.DEFAULT_ORACLE_CEILING),
    "workers": (int, 1),
    "depth": (int, 64),
    "prime_limit": (int, 1_000_000),
    "checkpoint_every": (int, identities.DEFAULT_CHECKPOINT_EVERY),
    "row_cap": (int, DEFAULT_ROW_CAP),
    "from_": (int, 2),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1 or value >= 1 << 64:
        raise argparse.ArgumentTypeError(f"expected 1 <= x < 2**64, got {text}")
    return value


def _fmt(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    return value


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


class RowWriter:
    """CSV (header on first row) or JSON-lines; reals at 12 significant digits."""

    def __init__(self, fmt: str, out=None):
        if fmt not in ("csv", "json"):
            raise UsageError(f"unknown format {fmt!r}")
        self.fmt = fmt
        self.out = out or sys.stdout
        self._csv = None

    def write(self, row: dict) -> None:
        if self.fmt == "json":
            self.out.write(json.dumps({k: _fmt(v) for k, v in row.items()}) + "\n")
        else:
            if self._csv is None:
                self._csv = csv.writer(self.out, lineterminator="\n")
                self._csv.writerow(list(row))
            self._csv.writerow([_csv_cell(v) for v in row.values()])
        self.out.flush()

    def write_all(self, rows: Iterable[dict]) -> None:
        for row in rows:
            self.write(row)


def _resolve(args: argparse.Namespace) -> None:
    for dest, (typ, default) in OPTION_DEFAULTS.items():
        if not hasattr(args, dest) or getattr(args, dest) is not None:
            continue
        env = os.environ.get("FLOORSET_" + dest.rstrip("_").upper())
        if env is not None:
            try:
                setattr(args, dest, typ(env))
            except ValueError:
                raise UsageError(f"bad value for FLOORSET_{dest.rstrip('_').upper()}: {env!r}")
        elif dest == "format" and args.command == "scan":
            args.format = "json"
        else:
            setattr(args, dest, default)


# ---------------------------------------------------------------------------
# commands

_COUNTS = {
    "gx": (floorset.G, floorset.G_bruteforce),
    "fx": (floorset.F, floorset.F_bruteforce),
    "fpp": (floorset.F_primepower, floorset.F_primepower_bruteforce),
}


def cmd_count(args, writer: RowWriter) -> int:
    fast, brute = _COUNTS[args.command]
    t0 = time.perf_counter()
    if args.brute:
        value = brute(args.x, ceiling=args.oracle_ceiling)
    else:
        value = fast(args.x)
    row = {"x": args.x, "value": value, "method": "brute" if args.brute else "fast"}
    if args.timing:
        row["elapsed"] = time.perf_counter() - t0
    writer.write(row)
    return EXIT_OK


def cmd_blocks(args, writer: RowWriter) -> int:
    approx_rows = 2 * math.isqrt(args.x) + 2
    if approx_rows > args.row_cap and not args.force:
        raise UsageError(f"blocks {args.x} would print ~{approx_rows} rows (cap {args.row_cap}); pass --force")
    for b in floorset.iter_blocks(args.x):
        writer.write({"v": b.v, "n_lo": b.n_lo, "n_hi": b.n_hi, "is_prime": is_prime(b.v)})
    return EXIT_OK


def cmd_constants(args, writer: RowWriter) -> int:
    if args.depth < 2 or args.prime_limit < 2:
        raise UsageError("--depth and --prime-limit must be >= 2")
    estimates = [
        constants.constant_P_series(args.depth),
        constants.constant_P_direct(args.prime_limit),
        constants.constant_D(args.depth),
        constants.constant_D_direct(args.prime_limit),
    ]
    for e in estimates:
        writer.write(
            {
                "constant": e.name,
                "method": e.method,
                "value": e.value,
                "error_bound": e.error_bound,
                "depth": e.parameters.get("depth"),
                "prime_limit": e.parameters.get("prime_limit"),
            }
        )
    return EXIT_OK


def cmd_scan(args, writer: RowWriter) -> int:
    if writer.fmt != "json":
        raise UsageError("scan streams JSON-lines only; use --format json")
    if args.from_ < 2:
        raise UsageError("--from must be >= 2")
    if args.resume and not args.checkpoint:
        raise UsageError("--resume needs --checkpoint")

    def on_chunk(window, total, last_x):
        for rec in window.counterexamples:
            writer.write({"type": "finding", **rec.to_dict()})
        if args.progress:
            logging.getLogger("floorprimes").info("scanned through x=%d, %d records", last_x, total.records_checked)

    report = identities.scan(
        args.from_,
        args.to,
        args.target,
        workers=args.workers,
        checkpoint=args.checkpoint,
        resume=args.resume,
        checkpoint_every=args.checkpoint_every,
        on_chunk=None if args.resume else on_chunk,
    )
    if args.resume:
        # findings from before the interruption are only in the checkpoint
        for rec in report.counterexamples:
            writer.write({"type": "finding", **rec.to_dict()})
    summary = report.to_dict()
    summary.pop("counterexamples")
    summary["counterexample_count"] = len(report.counterexamples)
    writer.write({"type": "summary", **summary})
    if args.report:
        tmp = args.report + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(report.to_json() + "\n")
        os.replace(tmp, args.report)
    return EXIT_THEOREM if report.theorem_failures else EXIT_OK


def parse_points(text: str) -> list[int]:
    items = [t.strip() for t in text.split(",")]
    if not text.strip() or any(not t for t in items):
        raise UsageError(f"empty point in --points {text!r}")
    try:
        return [positive_int(t) for t in items]
    except argparse.ArgumentTypeError as exc:
        raise UsageError(str(exc))


def parse_grid(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(float(t)) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"--grid expects LO:HI, got {text!r}")
    if lo < 1 or hi < lo:
        raise UsageError(f"bad grid {text!r}")
    return lo, hi


def cmd_report(args, writer: RowWriter) -> int:
    if args.points is not None and args.grid is not None:
        raise UsageError("give --points or --grid, not both")
    if args.points is not None:
        points = parse_points(args.points)
    elif args.grid is not None:
        points = asympt.geometric_grid(*parse_grid(args.grid), refine=args.refine)
    else:
        points = asympt.geometric_grid(10, 10_000_000, refine=args.refine)
    if args.kind == "gx" and min(points) < 2:
        raise UsageError("gx report needs every x >= 2")
    if args.bounds and args.kind != "fx":
        raise UsageError("--bounds applies to the fx report")
    if args.bounds and min(points) < 2:
        raise UsageError("--bounds needs every x >= 2")

    fn = {"gx": asympt.gx_report, "fx": asympt.fx_report, "fpp": asympt.fx_primepower_report}[args.kind]
    extra = {"a1_emp": None, "a2_emp": None} if args.bounds else {}
    for sample in fn(points):
        writer.write({**sample.as_row(), **extra})
    if args.bounds:
        b = asympt.theorem5_bounds(points)
        writer.write(
            {
                "kind": "theorem5_bounds",
                "x": None,
                "exact": None,
                "main_term": None,
                "residual": None,
                "normalized": None,
                "rule": None,
                "a1_emp": b.a1,
                "a2_emp": b.a2,
            }
        )
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default=None, help="output format (default csv; json for scan)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="floorprimes", description="Prime statistics of floor-function sets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, what in (("gx", "G(x)"), ("fx", "F(x)"), ("fpp", "prime-power F(x)")):
        p = sub.add_parser(name, help=f"compute {what}", parents=[common])
        p.add_argument("x", type=positive_int)
        p.add_argument("--brute", action="store_true", help="use the O(x) oracle")
        p.add_argument("--oracle-ceiling", type=int, default=None)
        p.add_argument("--timing", action="store_true", help="add an elapsed-seconds column")
        p.set_defaults(func=cmd_count)

    p = sub.add_parser("blocks", help="list the floor blocks of x", parents=[common])
    p.add_argument("x", type=positive_int)
    p.add_argument("--force", action="store_true")
    p.add_argument("--row-cap", type=int, default=None)
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("constants", help="evaluate P and D", parents=[common])
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--prime-limit", type=int, default=None)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("scan", help="scan G(x) - G(x-1) identities", parents=[common])
    p.add_argument("target", choices=["theorem2", "theorem3", "conjecture4", "all"])
    p.add_argument("--from", dest="from_", type=int, default=None)
    p.add_argument("--to", type=positive_int, required=True)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--checkpoint-every", type=int, default=None)
    p.add_argument("--report", default=None, help="write the final report JSON here")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("report", help="exact counts vs asymptotic main terms", parents=[common])
    p.add_argument("kind", choices=["gx", "fx", "fpp"])
    p.add_argument("--points", default=None, help="comma-separated x values")
    p.add_argument("--grid", default=None, help="LO:HI, powers of ten in range")
    p.add_argument("--refine", action="store_true", help="add sqrt(10) midpoints to the grid")
    p.add_argument("--bounds", action="store_true", help="append empirical A1/A2 (fx only)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose or getattr(args, "progress", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        _resolve(args)
        if args.format not in ("csv", "json"):
            raise UsageError(f"unknown format {args.format!r}")
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be >= 1")
        return args.func(args, RowWriter(args.format))
    except (UsageError, floorset.OracleCeilingError, identities.CheckpointMismatch) as exc:
        print(f"floorprimes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"floorprimes: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
