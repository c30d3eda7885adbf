"""
Command-line interface for cpcause.
"""

import argparse
import json
import logging
import os
import sys
import warnings
from collections.abc import Callable
from dataclasses import replace
from pathlib import Path
from typing import Any

from .api import load_model, load_story, load_theory
from .bridge import story_for_context, translate
from .causation import judge, rank_causes
from .checks import SWEEPS, run_sweep
from .config import DEFINITIONS, ORDER_POLICIES, OUTPUT_FORMATS, Config, get_config
from .engine import (
    build_tree,
    cond_prob,
    exact_distribution,
    policy_from_name,
    prob,
    sample_leaves,
    total_variation,
)
from .errors import CPCauseError, ExitCode, UnknownAtomError
from .models import CauseVerdict, CPTheory
from .parser import parse_formula, serialize_story, serialize_theory
from .transform import intervene
from .utils import format_decimal

logger = logging.getLogger(__name__)


def _config(args: argparse.Namespace) -> Config:
    if getattr(args, "config", None):
        return get_config(Path(args.config), reload=True)
    return get_config()


def _output_format(args: argparse.Namespace, config: Config) -> str:
    return args.format if getattr(args, "format", None) else config.output.format


def _print_json(data: Any) -> None:
    print(json.dumps(data, indent=2))


def _report_error(error: CPCauseError, as_json: bool) -> int:
    if as_json:
        _print_json({"error": type(error).__name__, "message": str(error)})
    else:
        print(f"❌ {type(error).__name__}: {error}")
    return int(error.exit_code)


def _print_warnings(caught: list[warnings.WarningMessage], as_json: bool) -> list[str]:
    messages = [f"{w.category.__name__}: {w.message}" for w in caught]
    if not as_json:
        for message in messages:
            print(f"⚠️  {message}")
    return messages


def _handles_errors(command: Callable[[argparse.Namespace, Config, bool], int]) -> Callable:
    """Run a command, mapping cpcause errors to their exit codes."""

    def run(args: argparse.Namespace) -> int:
        config = _config(args)
        as_json = _output_format(args, config) == "json"
        try:
            return command(args, config, as_json)
        except CPCauseError as e:
            return _report_error(e, as_json)

    run.__doc__ = command.__doc__
    return run


@_handles_errors
def cmd_validate(args: argparse.Namespace, config: Config, as_json: bool) -> int:
    """Parse a theory (and optionally a story) and check every invariant."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        theory = load_theory(args.theory)
        build_tree(theory)
        story = load_story(args.story, theory) if args.story else None
    messages = _print_warnings(caught, as_json)

    if as_json:
        _print_json(
            {
                "theory": args.theory,
                "laws": len(theory),
                "atoms": sorted(theory.atoms),
                "story": args.story,
                "leaf": sorted(story.leaf_true) if story else None,
                "warnings": messages,
            }
        )
        return 0

    print(f"✅ {args.theory}: {len(theory)} laws over {len(theory.atoms)} atoms")
    if story is not None:
        print(f"✅ {args.story}: {len(story)} steps, leaf {story.leaf}")
    return 0


def _interventions(theory: CPTheory, literals: list[str]) -> CPTheory:
    for literal in literals:
        positive = not literal.startswith("~")
        atom = literal.lstrip("~+")
        if atom not in theory.atoms:
            raise UnknownAtomError(f"cannot intervene on unknown atom {atom}")
        theory = intervene(theory, atom, positive)
    return theory


@_handles_errors
def cmd_query(args: argparse.Namespace, config: Config, as_json: bool) -> int:
    """Exact probability queries, optionally after interventions."""
    digits = config.output.decimal_digits
    theory = _interventions(load_theory(args.theory), args.do or [])
    policy = policy_from_name(args.policy or config.engine.order_policy, config.engine.policy_seed)
    do_text = "".join(f" | do({lit})" for lit in args.do or [])

    if args.dist:
        distribution = exact_distribution(theory, policy)
        distance = None
        if args.sample:
            n = config.engine.sample_count
            counts = sample_leaves(theory, n, config.engine.policy_seed)
            distance = total_variation(distribution, counts)
        if as_json:
            data: Any = distribution.to_dict(digits)
            if distance is not None:
                data = {"leaves": data, "samples": n, "total_variation": distance}
            _print_json(data)
            return 0
        print("=" * 70)
        print(f"Distribution of {args.theory}{do_text}: {len(distribution)} leaves")
        print("=" * 70)
        for state, p in distribution.items():
            print(f"  {str(p):>24}  {format_decimal(p, digits):>12}  {state}")
        if distance is not None:
            print(f"\nTotal-variation distance to {n} samples: {distance:.4f}")
        return 0

    if args.cond:
        formula, condition = (parse_formula(text, source="<query>") for text in args.cond)
        value = cond_prob(theory, formula, condition, policy)
        label = f"P({formula} | {condition}{do_text})"
    else:
        formula = parse_formula(args.prob, source="<query>")
        value = prob(theory, formula, policy)
        label = f"P({formula}{do_text})"

    if as_json:
        _print_json(
            {
                "query": label,
                "probability_rational": str(value),
                "probability_decimal": format_decimal(value, digits),
            }
        )
    else:
        print(f"{label} = {value} ({format_decimal(value, digits)})")
    return 0


def _print_verdict(verdict: CauseVerdict, digits: int) -> None:
    marker = "✅" if verdict.is_cause else "❌"
    print("=" * 70)
    print(f"{verdict.cause} -> {verdict.effect} ({verdict.definition.value} definition)")
    print("=" * 70)
    print(f"  strength:       {verdict.strength} ({format_decimal(verdict.strength, digits)})")
    if verdict.factors is not None:
        counterfactual, abnormality = verdict.factors
        print(f"  counterfactual: {counterfactual} ({format_decimal(counterfactual, digits)})")
        print(f"  abnormality:    {abnormality} ({format_decimal(abnormality, digits)})")
    print(f"  {marker} {verdict.cause} is {'' if verdict.is_cause else 'not '}an actual cause")
    for note in verdict.diagnostics:
        print(f"  ⚠️  {note}")


@_handles_errors
def cmd_cause(args: argparse.Namespace, config: Config, as_json: bool) -> int:
    """Judge one candidate cause under one definition."""
    definition = args.definition or config.causation.default_definition
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        theory = load_theory(args.theory)
        story = load_story(args.story, theory)
        verdict = judge(theory, story, args.cause, args.effect, definition)
    messages = [f"{w.category.__name__}: {w.message}" for w in caught]
    if messages:
        verdict = replace(verdict, diagnostics=verdict.diagnostics + tuple(messages))
    if as_json:
        _print_json(verdict.to_dict(config.output.decimal_digits))
    else:
        _print_verdict(verdict, config.output.decimal_digits)
    return 0


@_handles_errors
def cmd_rank(args: argparse.Namespace, config: Config, as_json: bool) -> int:
    """Rank every atom of the story's leaf as a cause of the effect."""
    definition = args.definition or config.causation.default_definition
    digits = config.output.decimal_digits
    theory = load_theory(args.theory)
    story = load_story(args.story, theory)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ranking = rank_causes(theory, story, args.effect, definition)

    if as_json:
        _print_json([v.to_dict(digits) for v in ranking])
        return 0

    print("=" * 70)
    print(f"Causes of {args.effect} ({definition} definition)")
    print("=" * 70)
    if not ranking:
        print("No candidate causes.")
        return 0
    for position, verdict in enumerate(ranking, 1):
        marker = "✅" if verdict.is_cause else "❌"
        line = (
            f"[{position}] {marker} {verdict.cause:<20} {str(verdict.strength):>24} "
            f"({format_decimal(verdict.strength, digits)})"
        )
        print(line)
        if verdict.error is not None:
            print(f"      ⚠️  {verdict.error}")
    return 0


@_handles_errors
def cmd_translate(args: argparse.Namespace, config: Config, as_json: bool) -> int:
    """Translate a structural model into a theory and one story per declared context."""
    model = load_model(args.model)
    theory_text = serialize_theory(translate(model))
    stories = [serialize_story(story_for_context(model, context)) for context in model.contexts]

    if args.output_dir:
        output_dir = Path(args.output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        stem = Path(args.model).stem
        written = [output_dir / f"{stem}.cp"]
        written[0].write_text(theory_text, encoding="utf-8")
        for index, story_text in enumerate(stories):
            suffix = "" if len(stories) == 1 else f".{index}"
            path = output_dir / f"{stem}{suffix}.story"
            path.write_text(story_text, encoding="utf-8")
            written.append(path)
        if as_json:
            _print_json({"written": [str(p) for p in written]})
        else:
            for path in written:
                print(f"✅ Wrote {path}")
        return 0

    if as_json:
        _print_json({"theory": theory_text, "stories": stories})
        return 0
    print(theory_text, end="")
    for index, story_text in enumerate(stories):
        print(f"% story for context {index}")
        print(story_text, end="")
    return 0


def _seed(args: argparse.Namespace, config: Config) -> int:
    env_seed = os.environ.get("CPCAUSE_SEED")
    if env_seed is not None:
        try:
            return int(env_seed)
        except ValueError:
            logger.warning("Ignoring non-integer CPCAUSE_SEED=%r", env_seed)
    return args.seed if args.seed is not None else config.check.seed


@_handles_errors
def cmd_check(args: argparse.Namespace, config: Config, as_json: bool) -> int:
    """Run a generated-instance sweep; exit 6 when a counterexample is found."""
    seed = _seed(args, config)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = run_sweep(args.theorem, seed, args.count, config.check)

    if as_json:
        _print_json(report.to_dict())
    else:
        print("=" * 70)
        print(f"Sweep {report.name}: seed {report.seed}, {report.checked} instances checked")
        print("=" * 70)
        for note in report.notes:
            print(f"  {note}")
        if report.ok:
            print("✅ No counterexamples")
        else:
            print(f"❌ {len(report.counterexamples)} counterexample(s)")
            first = report.counterexamples[0]
            print(f"\n{first.description}\nMinimized reproducer:\n")
            print(first.reproducer, end="")
    return 0 if report.ok else int(ExitCode.COUNTEREXAMPLE)


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=OUTPUT_FORMATS, help="Output format (default: table)")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="Log to stderr (-v info, -vv debug)"
    )
    common.add_argument("--config", help="Configuration file (default: ./cpcause.config.json)")

    parser = argparse.ArgumentParser(
        description="Exact inference and graded actual causation for CP-logic theories"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Validate command
    validate_parser = subparsers.add_parser(
        "validate", parents=[common], help="Check a theory and optionally a story"
    )
    validate_parser.add_argument("theory", help="Theory file (.cp)")
    validate_parser.add_argument("story", nargs="?", help="Story file (.story)")

    # Query command
    query_parser = subparsers.add_parser(
        "query", parents=[common], help="Exact probability queries"
    )
    query_parser.add_argument("theory", help="Theory file (.cp)")
    what = query_parser.add_mutually_exclusive_group(required=True)
    what.add_argument("--prob", metavar="FORMULA", help="P(FORMULA)")
    what.add_argument(
        "--cond", nargs=2, metavar=("FORMULA", "CONDITION"), help="P(FORMULA | CONDITION)"
    )
    what.add_argument("--dist", action="store_true", help="Full leaf distribution")
    query_parser.add_argument(
        "--do",
        action="extend",
        nargs="+",
        metavar="LITERAL",
        help="Interventions applied first: ~atom for do(~atom), atom or +atom for do(atom)",
    )
    query_parser.add_argument("--policy", choices=ORDER_POLICIES, help="Tree order policy")
    query_parser.add_argument(
        "--sample",
        action="store_true",
        help="With --dist: compare against sampled stories (engine.sample_count)",
    )

    # Cause command
    cause_parser = subparsers.add_parser(
        "cause", parents=[common], help="Judge one candidate cause"
    )
    cause_parser.add_argument("theory", help="Theory file (.cp)")
    cause_parser.add_argument("story", help="Story file (.story)")
    cause_parser.add_argument("--cause", required=True, help="Candidate cause atom")
    cause_parser.add_argument("--effect", required=True, help="Effect atom")
    cause_parser.add_argument(
        "--definition", choices=DEFINITIONS, help="Definition of causation (default: final)"
    )

    # Rank command
    rank_parser = subparsers.add_parser(
        "rank", parents=[common], help="Rank all candidate causes of an effect"
    )
    rank_parser.add_argument("theory", help="Theory file (.cp)")
    rank_parser.add_argument("story", help="Story file (.story)")
    rank_parser.add_argument("--effect", required=True, help="Effect atom")
    rank_parser.add_argument(
        "--definition", choices=DEFINITIONS, help="Definition of causation (default: final)"
    )

    # Translate command
    translate_parser = subparsers.add_parser(
        "translate", parents=[common], help="Translate a structural model into a theory"
    )
    translate_parser.add_argument("model", help="Structural-model file (.sm)")
    translate_parser.add_argument(
        "--output-dir", help="Write <model>.cp and story files here instead of printing"
    )

    # Check command
    check_parser = subparsers.add_parser(
        "check", parents=[common], help="Run a generated-instance property sweep"
    )
    check_parser.add_argument("--theorem", required=True, choices=sorted(SWEEPS))
    check_parser.add_argument(
        "--seed", type=int, help="Sweep seed (default from config; CPCAUSE_SEED overrides)"
    )
    check_parser.add_argument("--count", type=int, help="Number of instances")

    return parser


def _configure_logging(verbosity: int) -> None:
    if verbosity <= 0:
        return
    logging.basicConfig(
        level=logging.DEBUG if verbosity > 1 else logging.INFO,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: list[str] | None = None) -> None:
    """Main entry point for CLI"""
    parser = create_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    if args.command == "validate":
        sys.exit(cmd_validate(args))
    elif args.command == "query":
        sys.exit(cmd_query(args))
    elif args.command == "cause":
        sys.exit(cmd_cause(args))
    elif args.command == "rank":
        sys.exit(cmd_rank(args))
    elif args.command == "translate":
        sys.exit(cmd_translate(args))
    elif args.command == "check":
        sys.exit(cmd_check(args))
