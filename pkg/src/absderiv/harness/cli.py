"""``absderiv`` command line: ``run``, ``check`` and ``table``.

Exit codes: 0 success, 1 a check or scenario residual over tolerance,
2 configuration error, 3 numeric or I/O failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time

from ..spacetime import EvaluationDomainError
from . import checks
from .scenario import (RUN_COLUMNS, TABLE_KINDS, ConfigError, emit_table, load_scenario,
                       make_report, run_scenario, write_csv)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("absderiv")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage already; keep messages on stderr
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="absderiv", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="evaluate a scenario and write its data table")
    run.add_argument("--scenario", required=True)
    run.add_argument("--out", required=True)

    chk = sub.add_parser("check", help="run the invariant suite")
    chk.add_argument("--filter", default=None, help="regular expression on check ids")
    chk.add_argument("--json", default=None, help="also write the reports as JSON")
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--tolerance", type=float, default=None,
                     help="override every selected check's tolerance")
    chk.add_argument("--list", action="store_true", help="list check ids and exit")

    tab = sub.add_parser("table", help="write a comparison table for a scenario")
    tab.add_argument("--kind", required=True, choices=TABLE_KINDS)
    tab.add_argument("--scenario", required=True)
    tab.add_argument("--out", required=True)
    return p


def format_reports(reports):
    lines = [f"{'check':<28} {'points':>6} {'max_residual':>12} {'tolerance':>9} "
             f"{'status':>6} {'time_s':>7}"]
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.check_id:<28} {r.points:>6d} {r.max_residual:>12.3e} "
                     f"{r.tolerance:>9.1e} {status:>6} {r.wall_time:>7.2f}")
    return "\n".join(lines)


def _cmd_run(args):
    cfg = load_scenario(args.scenario)
    reports, rows = run_scenario(cfg)
    write_csv(cfg, RUN_COLUMNS, rows, args.out)
    print(format_reports(reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _cmd_table(args):
    cfg = load_scenario(args.scenario)
    columns, rows = emit_table(args.kind, cfg)
    write_csv(cfg, columns, rows, args.out)
    return EXIT_OK


def _cmd_check(args):
    if args.filter is not None:
        try:
            re.compile(args.filter)
        except re.error as exc:
            raise ConfigError(f"bad --filter pattern: {exc}") from None
    if args.tolerance is not None and not args.tolerance >= 0:
        raise ConfigError("--tolerance must be non-negative")
    selected = checks.select(args.filter)
    if args.list:
        for c in selected:
            print(f"{c.check_id:<28} {c.tolerance:8.1e}  {c.doc.splitlines()[0] if c.doc else ''}")
        return EXIT_OK
    if not selected:
        raise ConfigError(f"no check matches {args.filter!r}")
    start = time.perf_counter()
    reports, numeric_failure = [], False
    for c in selected:
        try:
            reports.append(checks.run_check(c, args.seed, args.tolerance))
        except ArithmeticError as exc:
            log.error("%s: %s", c.check_id, exc)
            numeric_failure = True
            tol = c.tolerance if args.tolerance is None else args.tolerance
            reports.append(make_report(c.check_id, [float("nan")], tol, 0.0))
    total = time.perf_counter() - start
    print(format_reports(reports))
    failed = [r.check_id for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} passed in {total:.1f} s")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"seed": args.seed, "wall_time": total,
                       "reports": [r.as_dict() for r in reports]}, fh, indent=2)
            fh.write("\n")
    if numeric_failure:
        return EXIT_NUMERIC
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {"run": _cmd_run, "check": _cmd_check, "table": _cmd_table}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        log.error("configuration: %s", exc)
        return EXIT_CONFIG
    except (ArithmeticError, EvaluationDomainError) as exc:
        log.error("numeric failure: %s", exc)
        return EXIT_NUMERIC
    except (ValueError, TypeError) as exc:
        # library-level validation (bad shapes, variances, parameters)
        log.error("validation: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
