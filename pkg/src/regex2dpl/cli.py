"""Batch command line for conversion, validation, and corpus work.

Exit codes are uniform across subcommands: 0 for a clean result, 1 when
a best-effort conversion is involved (output usable, semantics possibly
wider), 2 for an impossible conversion or a failed validation, 3 for
usage errors.  ``--json`` switches every subcommand from human tables to
machine output on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .convert import BEST_EFFORT, IMPOSSIBLE, SAFE, UnsupportedFeature, convert
from .dpl.parser import DplSyntaxError, parse_dpl
from .optimize import LlmClient, LlmConfig, SchemaError, TransportError, suggest
from .rx.census import census_corpus
from .rx.matcher import DEFAULT_STEP_BUDGET
from .rx.parser import RegexSyntaxError, parse_regex
from .validate import evaluate_corpus, generate_suite, run_differential

OK, BEST_EFFORT_EXIT, FAILED, USAGE = 0, 1, 2, 3


def _read_corpus(path: str) -> list[str]:
    return Path(path).read_text().splitlines()


def _print_json(data) -> None:
    print(json.dumps(data, indent=2))


def cmd_convert(args: argparse.Namespace) -> int:
    if args.file:
        regex = Path(args.file).read_text().rstrip("\n")
    else:
        regex = args.regex
    try:
        ast = parse_regex(regex)
    except RegexSyntaxError as exc:
        print("syntax error %s" % exc, file=sys.stderr)
        return FAILED
    try:
        result = convert(ast, anchor_skip=args.anchor_skip)
    except UnsupportedFeature as exc:
        print("impossible: unsupported feature: %s" % exc, file=sys.stderr)
        return FAILED
    if args.json:
        _print_json(result.to_json())
    elif result.classification == IMPOSSIBLE:
        print("impossible: %s" % result.impossible_reason, file=sys.stderr)
    else:
        print(result.dpl_text())
        if result.classification == BEST_EFFORT:
            for note in result.fragment_notes:
                if note.unsafe_reason:
                    print("note: %s" % note.unsafe_reason, file=sys.stderr)
    if result.classification == IMPOSSIBLE:
        return FAILED
    return OK if result.classification == SAFE else BEST_EFFORT_EXIT


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        ast = parse_regex(args.regex)
        result = convert(ast)
    except (RegexSyntaxError, UnsupportedFeature) as exc:
        print("cannot validate: %s" % exc, file=sys.stderr)
        return FAILED
    if result.classification == IMPOSSIBLE:
        print("cannot validate: %s" % result.impossible_reason, file=sys.stderr)
        return FAILED
    suite = generate_suite(ast, args.samples, args.negatives, args.seed)
    report = run_differential(ast, result, suite)
    if args.json:
        _print_json({"classification": result.classification, **report.to_json()})
    else:
        print(report.to_text())
    if not report.passed:
        return FAILED
    return OK if result.classification == SAFE else BEST_EFFORT_EXIT


def cmd_census(args: argparse.Namespace) -> int:
    table = census_corpus(_read_corpus(args.corpus))
    print(table.to_json() if args.json else table.to_text())
    return OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    report = evaluate_corpus(
        _read_corpus(args.corpus), n_pos=args.samples, n_neg=args.negatives, seed=args.seed
    )
    if args.json:
        _print_json(report.to_json())
    else:
        print(report.to_text())
    if report.safe_passed < report.safe_total:
        return FAILED
    best_effort_present = report.classification.get(BEST_EFFORT, 0) > 0
    return BEST_EFFORT_EXIT if best_effort_present else OK


def cmd_optimize(args: argparse.Namespace) -> int:
    try:
        pattern = parse_dpl(args.dpl)
    except DplSyntaxError as exc:
        print("pattern error: %s" % exc, file=sys.stderr)
        return FAILED
    config = LlmConfig.from_env()
    client = LlmClient(config) if config is not None else None
    try:
        suggestions, diagnostics = suggest(pattern, client)
    except (TransportError, SchemaError) as exc:
        print("suggestion backend failed: %s" % exc, file=sys.stderr)
        return FAILED
    if args.json:
        _print_json(
            {"suggestions": [s.to_json() for s in suggestions], "diagnostics": diagnostics}
        )
    else:
        if not suggestions:
            print("no suggestions")
        for s in suggestions:
            print("fragment %d -> %s  (%s; %s)" % (s.fragment_index, s.proposed, s.rationale, s.source))
        for d in diagnostics:
            print("note: %s" % d, file=sys.stderr)
    return OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    serve(
        port=args.port,
        data_dir=args.data_dir,
        alphabet=args.alphabet,
        step_budget=args.step_budget,
        host=args.host,
    )
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regex2dpl",
        description="Convert log-parsing regexes to a non-backtracking pattern language.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert one regex and print the pattern")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("regex", nargs="?", help="regex to convert")
    source.add_argument("--file", help="read the regex from a file")
    p.add_argument("--anchor-skip", action="store_true",
                   help="prefix unanchored patterns with a line-data skip")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("validate", help="differential-test one conversion")
    p.add_argument("--regex", required=True)
    p.add_argument("--samples", type=int, default=50, help="positive cases")
    p.add_argument("--negatives", type=int, default=50, help="negative cases")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("census", help="feature census over a regex corpus")
    p.add_argument("--corpus", required=True, help="file with one regex per line")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("evaluate", help="convert and test a whole corpus")
    p.add_argument("--corpus", required=True, help="file with one regex per line")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--negatives", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="suggest typed matchers for a pattern")
    p.add_argument("--dpl", required=True, help="pattern to analyze")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("serve", help="run the review HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", help="directory for session persistence")
    p.add_argument("--alphabet", help="character universe for negative sampling")
    p.add_argument("--step-budget", type=int, default=DEFAULT_STEP_BUDGET,
                   help="reference matcher step limit per test case")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; the contract reserves 3 for that
        return USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print("cannot read %s" % exc.filename, file=sys.stderr)
        return USAGE
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
