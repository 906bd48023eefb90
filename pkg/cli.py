#!/usr/bin/env python3
"""
cli.py – Controller for the ca-periods toolkit.

Machine output (JSON, CSV, integers) goes to stdout or --out; messages,
spinners and errors go to stderr through the ConsoleView.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, TextIO

from dotenv import load_dotenv

# Load .env before imports
load_dotenv()

from sympy import isprime

from src.additive import additive_period, pi_brute, pi_formula, ub
from src.constructions import (
    construction_bound,
    encoding_sidecar,
    odometer_automata_rule,
    odometer_rule,
    prime_partition_rule,
)
from src.engine import cycle_census, extremal_from_census
from src.errors import CaPeriodsError, UsageError, VerificationFailure
from src.models import AdditiveRule
from src.rings import lambda_formula
from src.search import (
    ADDITIVE_HEADER,
    EXTREMAL_HEADER,
    PI_UB_HEADER,
    additive_rows,
    extremal_table,
    mcl_count,
    pi_ub_cases,
    pi_ub_rows,
)
from src.storage import CheckpointStore, load_rule, save_rule, save_sidecar, table_csv
from src.utils import default_budget, default_threads
from src.verify import SUITES, PeriodsVerifier, failed_checks
from src.view import ConsoleView, setup_logging

EXTREMAL_SIGMAS = range(1, 8)
EXTREMAL_LONG_RUN_SIGMAS = range(1, 11)
ADDITIVE_N = range(2, 21)


class ArgumentParser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting with status 2."""

    def error(self, message: str):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonnegative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return value


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive, default=None, help="Worker processes (default CA_PERIODS_THREADS or 1).")
    common.add_argument("--out", type=Path, default=None, help="Write output to this file instead of stdout.")

    long_run = ArgumentParser(add_help=False)
    long_run.add_argument("--long-run", action="store_true", help="Use the long-run node-visit budget.")

    p = ArgumentParser(prog="ca-periods", description="Extremal temporal periods of two-neighbour cellular automata.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    period = sub.add_parser("period", parents=[common, long_run], help="Cycle census and X / Y of a rule file.")
    period.add_argument("--rule", type=Path, required=True, help="Rule JSON file.")
    period.add_argument("--sigma", type=_positive, required=True)

    additive = sub.add_parser("additive", parents=[common], help="Eventual period of an additive rule.")
    additive.add_argument("--n", type=_positive, required=True)
    additive.add_argument("--sigma", type=_positive, required=True)
    additive.add_argument("--a", type=_nonnegative, required=True)
    additive.add_argument("--b", type=_nonnegative, required=True)

    pi = sub.add_parser("pi", parents=[common], help="Maximal additive period pi_sigma(n).")
    pi.add_argument("--sigma", type=_positive, required=True)
    pi.add_argument("--n", type=_positive, required=True)
    pi.add_argument("--method", choices=["formula", "brute", "both"], default="both")

    lam = sub.add_parser("lambda", parents=[common], help="Unit group exponent lambda_sigma(n).")
    lam.add_argument("--sigma", type=int, choices=[2, 3, 4], required=True)
    lam.add_argument("--n", type=_positive, required=True)

    upper = sub.add_parser("ub", parents=[common], help="Divisibility bound ub_sigma(p^m).")
    upper.add_argument("--sigma", type=_positive, required=True)
    upper.add_argument("--p", type=_positive, required=True)
    upper.add_argument("--m", type=_positive, required=True)

    table = sub.add_parser("table", parents=[common, long_run], help="Reproduce a results table as CSV.")
    table.add_argument("--which", type=int, choices=[2, 3, 4], required=True)

    mcl = sub.add_parser("mcl", parents=[common, long_run], help="Count rules whose longest cycle visits every aperiodic word.")
    mcl.add_argument("--sigma", type=_positive, required=True)
    mcl.add_argument("--n", type=_positive, required=True)

    construct = sub.add_parser("construct", parents=[common], help="Write a constructed rule and its encoding sidecar.")
    construct.add_argument("--kind", choices=["odometer", "odometer-automata", "prime-partition"], required=True)
    construct.add_argument("--sigma", type=_positive, required=True)
    construct.add_argument("--k", type=_positive, default=None)
    construct.add_argument("--n", type=_positive, default=None)

    verify = sub.add_parser("verify", parents=[common], help="Run the reproduction and property checks.")
    verify.add_argument("--suite", choices=list(SUITES), default="quick")
    return p


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


class CaPeriodsController:
    def __init__(self, view: Optional[ConsoleView] = None, stdout: Optional[TextIO] = None):
        self.view = view or ConsoleView()
        self.stdout = stdout or sys.stdout

    def _emit(self, text: str, out: Optional[Path]) -> None:
        if out is None:
            self.stdout.write(text)
            self.stdout.flush()
            return
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        self.view.display_written(out)

    def _threads(self, args) -> int:
        return args.threads or default_threads()

    def _handle_period(self, args) -> None:
        rule = load_rule(args.rule)
        with self.view.show_status(f"Census of {rule.n}^{args.sigma} configurations…"):
            census = cycle_census(rule, args.sigma, budget=default_budget(args.long_run), threads=self._threads(args))
        ext = extremal_from_census(census)
        self._emit(_dump({
            "X": ext.X,
            "Y": ext.Y,
            "cycles": [{"length": c.length, "spatial_period": c.spatial_period, "count": c.count}
                       for c in census.cycles],
        }), args.out)

    def _handle_additive(self, args) -> None:
        try:
            rule = AdditiveRule(n=args.n, sigma=args.sigma, a=args.a, b=args.b)
        except ValueError as e:
            raise UsageError(str(e))
        result = additive_period(rule)
        self._emit(_dump({"period": result.period, "preperiod": result.preperiod}), args.out)

    def _handle_pi(self, args) -> None:
        if args.n < 2:
            raise UsageError("pi needs n >= 2")
        if args.method == "formula":
            self._emit(f"{pi_formula(args.sigma, args.n)}\n", args.out)
            return
        with self.view.show_status(f"Scanning {args.n * args.n} additive rules…"):
            brute, (a, b) = pi_brute(args.sigma, args.n, self._threads(args))
        if args.method == "brute":
            self._emit(f"{brute}\n", args.out)
            return
        formula = pi_formula(args.sigma, args.n)
        self._emit(_dump({"formula": formula, "brute": brute, "argmax": [a, b]}), args.out)
        if formula != brute:
            raise VerificationFailure(f"pi_{args.sigma}({args.n}): formula {formula} != brute force {brute}")

    def _handle_lambda(self, args) -> None:
        if args.n < 2:
            raise UsageError("lambda needs n >= 2")
        self._emit(f"{lambda_formula(args.sigma, args.n)}\n", args.out)

    def _handle_ub(self, args) -> None:
        if not isprime(args.p):
            raise UsageError(f"--p must be prime, got {args.p}")
        self._emit(f"{ub(args.sigma, args.p, args.m)}\n", args.out)

    def _handle_table(self, args) -> None:
        threads = self._threads(args)
        if args.which == 2:
            sigmas = EXTREMAL_LONG_RUN_SIGMAS if args.long_run else EXTREMAL_SIGMAS
            rows = extremal_table(3, sigmas, threads=threads, budget=default_budget(args.long_run),
                                  checkpoints=CheckpointStore())
            for row in rows:
                if not row.computed:
                    self.view.display_skipped(f"sigma={row.parameters['sigma']}", row.reason)
            header = EXTREMAL_HEADER
        elif args.which == 3:
            with self.view.show_status("Computing additive extremes…"):
                rows = additive_rows(ADDITIVE_N, threads)
            header = ADDITIVE_HEADER
        else:
            with self.view.show_status("Scanning pi against ub…"):
                rows = pi_ub_rows(pi_ub_cases(), threads)
            header = PI_UB_HEADER
        self._emit(table_csv(header, rows), args.out)

    def _handle_mcl(self, args) -> None:
        if args.n < 2:
            raise UsageError("mcl needs n >= 2")
        with self.view.show_status(f"Counting maximal-cycle rules for sigma={args.sigma} n={args.n}…"):
            count, _ = mcl_count(args.sigma, args.n, long_run=args.long_run)
        self._emit(f"{count}\n", args.out)

    def _handle_construct(self, args) -> None:
        if args.out is None:
            raise UsageError("construct needs --out <file>")
        if args.kind == "prime-partition":
            if args.n is None:
                raise UsageError("prime-partition needs --n")
            rule, spec = prime_partition_rule(args.sigma, args.n)
            sidecar = encoding_sidecar(args.kind, args.sigma, n=args.n, spec=spec)
        else:
            if args.k is None:
                raise UsageError(f"{args.kind} needs --k")
            if args.kind == "odometer":
                rule = odometer_rule(args.sigma, args.k)
            else:
                rule = odometer_automata_rule(args.sigma, args.k, args.n)
            sidecar = encoding_sidecar(args.kind, args.sigma, k=args.k, n=rule.n)
        save_rule(rule, args.out)
        side = save_sidecar(sidecar, args.out)
        bound = construction_bound(args.kind, args.sigma, rule.n, k=args.k)
        self.view.display_construction(args.kind, rule.n, args.out, side, bound)

    def _handle_verify(self, args) -> None:
        results = PeriodsVerifier(view=self.view, threads=self._threads(args)).run(args.suite)
        self.view.display_checks(results)
        failed = failed_checks(results)
        if failed:
            raise VerificationFailure(f"failed checks: {', '.join(failed)}")

    def run(self, argv: Optional[List[str]] = None) -> int:
        try:
            args = build_parser().parse_args(argv)
            handler = getattr(self, f"_handle_{args.command}")
            handler(args)
        except CaPeriodsError as e:
            self.view.display_failure(e)
            return e.exit_code
        except ValueError as e:
            error = UsageError(str(e))
            self.view.display_failure(error)
            return error.exit_code
        return 0


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging()
    return CaPeriodsController().run(argv)


if __name__ == "__main__":
    sys.exit(main())
