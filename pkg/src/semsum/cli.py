"""Command-line entry point: ``semsum <command> [--config FILE] [options]``.

Exit codes: 0 ok, 1 verification failure, 2 bad configuration, 3 enumeration cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from .demo import format_weather_demo, weather_demo
from .harness import convergence_experiment, mc_uniform_avg_loss
from .loss import semantic_loss
from .model import DomainError, consistent_summaries
from .scenario import Scenario, ScenarioError
from .summarizers import (
    EnumerationCapError,
    known_p_score,
    min_uniform_avg_loss,
    mu,
    optimal_policy,
    universal_summarize,
)
from .verify import verify_all

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3


def _cell(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return " ".join(str(_cell(v)) for v in value)
    return value


def _render(rows: list[dict], fmt: str, meta: dict) -> str:
    if fmt == "json":
        doc = dict(meta, rows=[{k: _cell(v) if not isinstance(v, (list, tuple)) else [_cell(x) for x in v]
                                for k, v in r.items()} for r in rows])
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ScenarioError(f"expected a list of integers, got {text!r}") from exc


def _scenario(args) -> Scenario:
    sc = Scenario.load(args.config) if getattr(args, "config", None) else Scenario()
    overrides = {k: getattr(args, k) for k in ("v", "j", "n", "samples", "seed") if hasattr(args, k)}
    if overrides:
        try:
            sc = replace(sc, **overrides)
        except TypeError as exc:
            raise ScenarioError(str(exc)) from exc
    return sc


def cmd_loss(sc: Scenario, args):
    p, u = sc.report_distribution(), sc.semantic_weights()
    policy = optimal_policy(p, sc.j, u)
    rows = [{"x": x, "probability": p[x], "summary_events": y.event_list(), "summary_values": y.values,
             "score": known_p_score(p, x, y, u)} for x, y in policy.items()]
    rows.append({"x": "total", "probability": 1, "summary_events": "", "summary_values": "",
                 "score": semantic_loss(p, policy, u)})
    return rows


def cmd_summarize(sc: Scenario, args):
    p, u = sc.report_distribution(), sc.semantic_weights()
    reports = _parse_ints(args.report) if args.report else range(1 << sc.v)
    rows = []
    for x in reports:
        for y in consistent_summaries(x, sc.j, sc.v):
            rows.append({"x": x, "summary_events": y.event_list(), "summary_values": y.values,
                         "score": known_p_score(p, x, y, u)})
    return rows


def cmd_universal(sc: Scenario, args):
    u = sc.semantic_weights()
    xn = tuple(_parse_ints(args.history))
    if not xn:
        raise ScenarioError("--history needs at least the current report")
    y = universal_summarize(xn, sc.j, u)
    return [{"n": len(xn), "x1": xn[0], "summary_events": y.event_list(), "summary_values": y.values,
             "mu": mu(xn, sc.j, u)}]


def cmd_avg_loss(sc: Scenario, args):
    rep = min_uniform_avg_loss(sc.n, sc.v, sc.j, sc.semantic_weights(), tol=sc.tolerance)
    return [{"v": sc.v, "j": sc.j, "n": sc.n, "exact": rep.exact_value, "exact_float": float(rep.exact_value),
             "mu_sum": rep.mu_sum, "implied_lambda": rep.implied_lambda, "lambda_bound": rep.lambda_bound,
             "in_bracket": rep.in_bracket}]


def cmd_mc(sc: Scenario, args):
    est = mc_uniform_avg_loss(sc.v, sc.j, sc.n, sc.semantic_weights(), sc.samples, sc.seed, workers=args.workers)
    return [{"v": sc.v, "j": sc.j, "n": sc.n, "samples": est.samples, "seed": est.seed,
             "estimate": est.estimate, "std_error": est.std_error}]


def cmd_converge(sc: Scenario, args):
    table = convergence_experiment(sc.v, sc.j, sc.report_distribution(), sc.semantic_weights(),
                                   _parse_ints(args.n_grid), args.trials, sc.seed)
    return [{"n": r.n, "universal_loss": r.universal_loss, "known_p_loss": r.known_p_loss,
             "gap": r.gap, "std_error": r.std_error, "seed": sc.seed} for r in table]


COMMANDS = {
    "loss": (cmd_loss, "optimal known-law policy and its semantic loss"),
    "summarize": (cmd_summarize, "score every summary of the given reports under the known law"),
    "universal": (cmd_universal, "universal summary of a report history"),
    "avg-loss": (cmd_avg_loss, "exact minimum uniform average loss with its bracket"),
    "mc": (cmd_mc, "Monte Carlo estimate of the uniform average loss"),
    "converge": (cmd_converge, "universal loss under a fixed law as n grows"),
    "verify": (None, "run the verification suite"),
    "demo": (None, "seven-event weather demo"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--config", default=S, help="JSON scenario file")
    common.add_argument("--seed", type=int, default=S, help="unsigned 64-bit seed")
    common.add_argument("--out", default=S, help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default=S)
    for name in ("v", "j", "n", "samples"):
        common.add_argument(f"--{name}", type=int, default=S, help=f"override scenario {name}")

    parser = argparse.ArgumentParser(prog="semsum", description="Semantic summarization of event reports.", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {name: sub.add_parser(name, parents=[common], help=text) for name, (_, text) in COMMANDS.items()}
    subs["summarize"].add_argument("--report", help="comma-separated report masks (default: all)")
    subs["universal"].add_argument("--history", required=True, help="x(1),x(2),...,x(n) as report masks")
    subs["mc"].add_argument("--workers", type=int, default=1)
    subs["converge"].add_argument("--n-grid", default="1,10,100,1000")
    subs["converge"].add_argument("--trials", type=int, default=200)
    subs["verify"].add_argument("--level", choices=("quick", "full"), default="quick")
    return parser


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = getattr(args, "format", "csv")
    out = getattr(args, "out", None)
    try:
        if args.command == "demo":
            result = weather_demo()
            _emit(json.dumps(result, indent=2) + "\n" if fmt == "json" else format_weather_demo(result) + "\n", out)
            return EXIT_OK
        sc = _scenario(args)
        if args.command == "verify":
            report = verify_all(args.level, seed=sc.seed)
            if fmt == "json":
                _emit(json.dumps(report.to_dict(), indent=2) + "\n", out)
            else:
                rows = [{"name": r.name, "checks": r.checks, "value": r.value, "bound": r.bound,
                         "passed": r.passed, "seed": "" if r.seed is None else r.seed, "note": r.note}
                        for r in report.rows]
                _emit(_render(rows, "csv", {}), out)
            print(f"{'PASS' if report.passed else 'FAIL'}: {sum(r.passed for r in report.rows)}/"
                  f"{len(report.rows)} rows, {report.wall_time:.1f} s, seed {report.seed}", file=sys.stderr)
            return EXIT_OK if report.passed else EXIT_FAILED
        rows = COMMANDS[args.command][0](sc, args)
        _emit(_render(rows, fmt, {"command": args.command, "scenario": sc.to_dict()}), out)
        return EXIT_OK
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ScenarioError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
