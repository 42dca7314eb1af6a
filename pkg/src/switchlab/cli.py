"""``switchlab`` command line.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from importlib import resources
from typing import Sequence

from . import acceptance
from .causal import (
    MAX_SUPPORT,
    ProofCertificate,
    SupportTooLarge,
    candidate_count,
    check_forced_determinism,
    enumerate_single_switch_extensions,
    replay_possibilistic_contradiction,
)
from .inequalities import ChainReport, closed_form_bc, eval_causal_mermin, eval_chain_causal, first_violating_n
from .linalg import PHYSICAL_TOL
from .scenarios import (
    SCHEDULES,
    SWITCHES,
    WING_LETTERS,
    ChainedScenarioConfig,
    GhzScenarioConfig,
    build_chained_switch,
    build_ghz_three_switch,
)
from .tables import DEFAULT_EPS

ENUMERATE_SUPPORT_LIMIT = 10


class UsageError(Exception):
    pass


def load_schema(name: str) -> dict:
    """One of the JSON schemas shipped with the package, e.g. ``"mermin_report"``."""
    return json.loads((resources.files("switchlab") / "schemas" / f"{name}.json").read_text())


def _sweep(text: str) -> range:
    try:
        lo, hi = (int(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty sweep {text!r}")
    return range(lo, hi + 1)


def _nonneg(text: str) -> float:
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _strength(text: str) -> float:
    v = float(text)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _write_json(path: str | None, obj) -> None:
    if path is None:
        return
    text = json.dumps(obj, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _echo(args, text: str) -> None:
    # keep stdout clean when the JSON report goes there
    print(text, file=sys.stderr if getattr(args, "json", None) == "-" else sys.stdout)


def _ghz(args):
    d = build_ghz_three_switch(GhzScenarioConfig(args.noise))
    return dataclasses.replace(d, eps=args.eps)


def cmd_ghz_mermin(args) -> int:
    report = eval_causal_mermin(_ghz(args))
    _echo(args, f"causal Mermin total {report.total:.9f} (classical bound 3, algebraic max 4): {report.verdict}")
    _write_json(args.json, report.to_json())
    return 0 if report.violated else 1


def cmd_possibilistic(args) -> int:
    cert = replay_possibilistic_contradiction(_ghz(args))
    _echo(args, f"verdict: {cert.verdict}")
    for msg in cert.failures:
        _echo(args, f"  failed: {msg}")
    _write_json(args.json, cert.to_json())
    return 0 if cert.verdict == ProofCertificate.INFEASIBLE else 1


def cmd_chained(args) -> int:
    ns = args.sweep if args.sweep is not None else [3 if args.n is None else args.n]
    if min(ns) < 2:
        raise UsageError("N must be at least 2")
    reports: list[ChainReport] = []
    for N in ns:
        reports.append(eval_chain_causal(build_chained_switch(ChainedScenarioConfig(N, args.schedule, args.noise)), N))
    for r in reports:
        _echo(args, f"N={r.N:3d}  BC={r.bc_value:.9f}  alpha={r.alpha:.3g}  constrained={r.constrained_value:.9f}  "
              f"bound={r.classical_bound:g}  {r.verdict}")
    first = first_violating_n(reports)
    _echo(args, f"first violating N: {first}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(ChainReport.CSV_COLUMNS)
            w.writerows(r.csv_row() for r in reports)
    _write_json(args.json, {
        "schedule": args.schedule,
        "noise": args.noise,
        "reports": [r.to_json() for r in reports],
        "firstViolatingN": first,
    })
    ok = all(abs(r.bc_value - closed_form_bc(r.N)) < PHYSICAL_TOL for r in reports)
    return 0 if ok else 1


def cmd_enumerate_hco(args) -> int:
    d = _ghz(args)
    o, i = WING_LETTERS[args.switch]
    names = [f"{o}1", f"{o}2", f"{i}1", f"{i}2"]
    base = d.possible.marginalize(names)
    try:
        exts = enumerate_single_switch_extensions(base, names[:2], names[2:], lam=f"lam{args.switch}",
                                                  max_support=args.max_support)
    except SupportTooLarge as err:
        raise UsageError(f"{err} (raise --max-support to force, at most {MAX_SUPPORT})") from None
    forced = check_forced_determinism(exts, names[0], names[2:])
    n_cand = candidate_count(base, names)
    _echo(args, f"switch {args.switch}: {len(exts)} of {n_cand} candidates valid; forced determinism: {forced}")
    _write_json(args.json, {
        "switch": args.switch,
        "candidates": n_cand,
        "valid": len(exts),
        "forcedDeterminism": forced,
        "extensions": [
            [{"cell": dict(zip(names, cell)), "lam": sorted(subset)} for cell, subset in e.provenance] for e in exts
        ],
    })
    return 0 if exts and forced else 1


def cmd_random_models(args) -> int:
    check = acceptance.check_property_suites(args.seeds, args.seeds, args.seeds)
    _echo(args, check.line())
    _write_json(args.json, check.to_json())
    return 0 if check.passed else 1


def cmd_selfcheck(args) -> int:
    seeds = {} if args.seeds is None else {"mermin_seeds": args.seeds, "chained_seeds": args.seeds,
                                           "table_seeds": args.seeds}
    result = acceptance.selfcheck(noise=args.noise, schedule=args.schedule, **seeds)
    for c in result.checks:
        _echo(args, c.line())
    _echo(args, f"{sum(c.passed for c in result.checks)}/{len(result.checks)} criteria passed")
    if args.timing:
        print(f"wall clock {result.wall_clock:.2f} s", file=sys.stderr)
    _write_json(args.json, result.to_json(include_timing=args.timing))
    return result.exit_code


def build_parser() -> argparse.ArgumentParser:
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--json", metavar="PATH", help="write the report as JSON ('-' for stdout)")

    common = argparse.ArgumentParser(add_help=False, parents=[out])
    common.add_argument("--noise", type=_strength, default=0.0, help="depolarizing strength on the control state")

    eps = argparse.ArgumentParser(add_help=False)
    eps.add_argument("--eps", type=_nonneg, default=DEFAULT_EPS, help="possibility threshold")

    parser = argparse.ArgumentParser(prog="switchlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ghz-mermin", parents=[common, eps], help="causal Mermin expression on the three-switch data")
    p.set_defaults(func=cmd_ghz_mermin)

    p = sub.add_parser("possibilistic", parents=[common, eps], help="replay the possibilistic contradiction")
    p.set_defaults(func=cmd_possibilistic)

    p = sub.add_parser("chained", parents=[common], help="chained Braunstein-Caves sweep")
    g = p.add_mutually_exclusive_group()
    # default None: argparse skips the exclusivity check when a value is the default object
    g.add_argument("--n", type=int, help="single N (default 3)")
    g.add_argument("--sweep", type=_sweep, metavar="LO:HI")
    p.add_argument("--schedule", choices=SCHEDULES, default="spherical")
    p.add_argument("--csv", metavar="PATH")
    p.set_defaults(func=cmd_chained)

    p = sub.add_parser("enumerate-hco", parents=[common, eps], help="hidden causal order models of one switch")
    p.add_argument("--switch", choices=SWITCHES, default="A")
    p.add_argument("--max-support", type=_positive, default=ENUMERATE_SUPPORT_LIMIT)
    p.set_defaults(func=cmd_enumerate_hco)

    p = sub.add_parser("random-models", parents=[out], help="property suites on random hidden-order models")
    p.add_argument("--seeds", type=_positive, default=200)
    p.set_defaults(func=cmd_random_models)

    p = sub.add_parser("selfcheck", parents=[common], help="run every acceptance criterion")
    p.add_argument("--seeds", type=_positive, help="seed count for each property suite")
    p.add_argument("--schedule", choices=SCHEDULES, default="spherical")
    p.add_argument("--timing", action="store_true", help="report wall clock (makes JSON run-dependent)")
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as err:
        parser.print_usage(sys.stderr)
        print(f"switchlab: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
