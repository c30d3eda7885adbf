"""
Parsing and serialization of theory, story, structural-model and formula files.

The grammar lives in ``grammar.lark``; lark builds one LALR parser with a start
symbol per input language. The transformer below turns parse trees into plain
tuples that carry their source spans, and the ``parse_*`` functions build the
validated models from them so that every error can point at its line.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Any

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from .bridge import DerivedVariable, InnateVariable, StructuralModel
from .engine import advance, check_complete, enumerate_branches
from .errors import (
    AmbiguousBranch,
    CPCauseError,
    CyclicModelError,
    ModelError,
    NoSuchBranch,
    SourceSpan,
    TheorySyntaxError,
)
from .models import (
    EMPTY,
    And,
    Atom,
    Body,
    Branch,
    Choice,
    CPLaw,
    CPTheory,
    Disjunct,
    Formula,
    Literal,
    Not,
    Or,
    State,
    Var,
)

logger = logging.getLogger(__name__)


@lru_cache(maxsize=1)
def get_parser() -> Lark:
    """The shared LALR parser (built once)."""
    return Lark.open(
        "grammar.lark",
        rel_to=__file__,
        parser="lalr",
        start=["theory", "story", "model", "query"],
        propagate_positions=True,
        maybe_placeholders=True,
    )


def _span(source: str, meta: Any) -> SourceSpan:
    if getattr(meta, "empty", True):
        return SourceSpan(source, 1, 1)
    return SourceSpan(source, meta.line, meta.column)


def _atom_text(token: Token) -> Atom:
    # Arguments of parameterized atoms are normalized without spaces
    return "".join(str(token).split())


def _flatten(kind: type, children: list[Formula]) -> tuple[Formula, ...]:
    parts: list[Formula] = []
    for child in children:
        if isinstance(child, kind):
            parts.extend(child.operands)  # type: ignore[attr-defined]
        else:
            parts.append(child)
    return tuple(parts)


class _CPTransformer(Transformer):
    """Parse tree -> span-annotated tuples and formulas."""

    def __init__(self, source: str):
        super().__init__()
        self.source = source

    # theories

    def theory(self, children: list) -> list:
        return children

    @v_args(meta=True)
    def law(self, meta: Any, children: list) -> tuple:
        head = children[0]
        body = children[1] if len(children) > 1 else Body()
        return head, body, _span(self.source, meta)

    def disjuncts(self, children: list) -> list:
        return children

    @v_args(meta=True)
    def disjunct(self, meta: Any, children: list) -> tuple:
        atom, prob, norm = children
        return _atom_text(atom), prob, norm, _span(self.source, meta)

    def norm(self, children: list) -> Fraction:
        return children[0]

    def body(self, children: list) -> Body:
        return Body(tuple(children))

    def clause(self, children: list) -> tuple[Literal, ...]:
        return tuple(children)

    def pos_literal(self, children: list) -> Literal:
        return Literal(_atom_text(children[0]))

    def neg_literal(self, children: list) -> Literal:
        return Literal(_atom_text(children[0]), positive=False)

    def decimal(self, children: list) -> Fraction:
        return Fraction(str(children[0]))

    def fraction(self, children: list) -> Fraction:
        numerator, denominator = (int(str(c)) for c in children)
        if denominator == 0:
            raise TheorySyntaxError("zero denominator in probability")
        return Fraction(numerator, denominator)

    # stories

    def story(self, children: list) -> list:
        return children

    @v_args(meta=True)
    def step(self, meta: Any, children: list) -> tuple[Choice, SourceSpan]:
        span = _span(self.source, meta)
        number, outcome = children
        if not str(number).isdigit():
            raise TheorySyntaxError(f"law id must be an integer, got {number}", span)
        return Choice(int(str(number)), outcome), span

    def outcome(self, children: list) -> Atom:
        token = children[0]
        return EMPTY if token.type == "EMPTY_MARK" else _atom_text(token)

    # structural models

    def model(self, children: list) -> list:
        return children

    @v_args(meta=True)
    def innate(self, meta: Any, children: list) -> tuple:
        name, prob, norm = children
        return "innate", (_atom_text(name), prob, norm), _span(self.source, meta)

    @v_args(meta=True)
    def derived(self, meta: Any, children: list) -> tuple:
        name, formula = children
        return "derived", (_atom_text(name), formula), _span(self.source, meta)

    @v_args(meta=True)
    def context(self, meta: Any, children: list) -> tuple:
        return "context", tuple(children), _span(self.source, meta)

    @v_args(meta=True)
    def assignment(self, meta: Any, children: list) -> tuple[Atom, bool]:
        name, value = children
        if str(value) not in ("0", "1"):
            raise ModelError(
                f"context value of {name} must be 0 or 1, got {value}", _span(self.source, meta)
            )
        return _atom_text(name), str(value) == "1"

    # formulas

    def query(self, children: list) -> Formula:
        return children[0]

    def var(self, children: list) -> Formula:
        return Var(_atom_text(children[0]))

    def not_formula(self, children: list) -> Formula:
        return Not(children[0])

    def and_formula(self, children: list) -> Formula:
        return And(_flatten(And, children))

    def or_formula(self, children: list) -> Formula:
        return Or(_flatten(Or, children))


def _parse(text: str, start: str, source: str) -> Any:
    """Parse ``text`` from ``start`` and transform it, mapping lark errors to ours."""
    try:
        tree = get_parser().parse(text, start=start)
    except UnexpectedInput as e:
        line = e.line if isinstance(e.line, int) and e.line > 0 else 1
        column = e.column if isinstance(e.column, int) and e.column > 0 else 1
        raise TheorySyntaxError(_describe(e), SourceSpan(source, line, column)) from None
    try:
        return _CPTransformer(source).transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, CPCauseError):
            raise e.orig_exc from None
        raise


def _describe(error: UnexpectedInput) -> str:
    if isinstance(error, UnexpectedCharacters):
        return f"unexpected character {error.char!r}"
    if isinstance(error, UnexpectedEOF):
        return "unexpected end of input"
    token = getattr(error, "token", None)
    if token is not None and token.type == "$END":
        return "unexpected end of input"
    expected = sorted(getattr(error, "expected", ()) or ())
    if token is not None:
        return f"unexpected {str(token)!r}" + (f", expected one of {expected}" if expected else "")
    return "syntax error"


def parse_theory(text: str, source: str = "<theory>") -> CPTheory:
    """
    Parse a CP-theory. Laws are numbered ``0..n-1`` in file order.

    Raises:
        TheorySyntaxError: the text does not follow the grammar
        ProbabilitySumError: a head's statistical or normative mass exceeds 1
        DuplicateHeadAtom: an atom occurs twice in one head
    """
    laws = []
    for law_id, (head, body, span) in enumerate(_parse(text, "theory", source)):
        disjuncts = []
        for atom, prob, norm, disjunct_span in head:
            try:
                disjuncts.append(Disjunct(atom, prob if prob is not None else Fraction(1), norm))
            except CPCauseError as e:
                raise e.with_span(disjunct_span) from None
        try:
            laws.append(CPLaw(law_id, tuple(disjuncts), body))
        except CPCauseError as e:
            raise e.with_span(span) from None
    theory = CPTheory(tuple(laws))
    logger.debug("Parsed %d laws over %d atoms from %s", len(theory), len(theory.atoms), source)
    return theory


def parse_story(text: str, theory: CPTheory, source: str = "<story>") -> Branch:
    """
    Parse a story and replay it against ``theory``.

    Raises:
        TheorySyntaxError: the text does not follow the grammar
        IllegalStep: a step cannot be executed where it occurs
        IncompleteStory: some law is still applicable after the last step
    """
    parsed: list[tuple[Choice, SourceSpan]] = _parse(text, "story", source)
    state = State()
    applied: frozenset[int] = frozenset()
    for index, (choice, span) in enumerate(parsed):
        try:
            state, applied = advance(theory, state, applied, choice, index)
        except CPCauseError as e:
            raise e.with_span(span) from None
    end_span = parsed[-1][1] if parsed else SourceSpan(source, 1, 1)
    try:
        check_complete(theory, state, applied)
    except CPCauseError as e:
        raise e.with_span(end_span) from None
    return Branch(tuple(choice for choice, _ in parsed), state)


def parse_formula(text: str, source: str = "<formula>") -> Formula:
    """Parse a propositional formula over ``~ & | ( )``."""
    formula: Formula = _parse(text, "query", source)
    return formula


def parse_model(text: str, source: str = "<model>") -> StructuralModel:
    """
    Parse a structural model.

    Raises:
        TheorySyntaxError: the text does not follow the grammar
        ModelError: duplicate or unknown variables, bad context values, cyclic equations
    """
    innate: list[InnateVariable] = []
    derived: list[DerivedVariable] = []
    contexts: list[tuple[tuple[tuple[Atom, bool], ...], SourceSpan]] = []
    spans: dict[Atom, SourceSpan] = {}
    first_span = SourceSpan(source, 1, 1)

    for kind, payload, span in _parse(text, "model", source):
        if kind == "context":
            contexts.append((payload, span))
            continue
        name = payload[0]
        if name in spans:
            raise ModelError(f"variable {name} is declared twice", span)
        spans[name] = span
        try:
            if kind == "innate":
                _, prob, norm = payload
                innate.append(InnateVariable(name, prob, norm))
            else:
                derived.append(DerivedVariable(name, payload[1]))
        except CPCauseError as e:
            raise e.with_span(span) from None

    innate_names = {v.name for v in innate}
    for variable in derived:
        unknown = variable.formula.atoms() - set(spans)
        if unknown:
            raise ModelError(
                f"equation of {variable.name} uses undeclared variable(s) {sorted(unknown)}",
                spans[variable.name],
            )

    parsed_contexts = []
    for assignments, span in contexts:
        names = [name for name, _ in assignments]
        if set(names) - innate_names or len(set(names)) != len(names):
            raise ModelError("context must assign each innate variable once", span)
        if set(names) != innate_names:
            missing = sorted(innate_names - set(names))
            raise ModelError(f"context does not assign {missing}", span)
        parsed_contexts.append(frozenset(name for name, value in assignments if value))

    try:
        model = StructuralModel(tuple(innate), tuple(derived), tuple(parsed_contexts))
    except CyclicModelError as e:
        raise e.with_span(spans[e.cycle[0]] if e.cycle else first_span) from None
    except CPCauseError as e:
        raise e.with_span(first_span) from None
    logger.debug(
        "Parsed model with %d innate and %d derived variables from %s",
        len(innate),
        len(derived),
        source,
    )
    return model


def serialize_theory(theory: CPTheory) -> str:
    """Theory text accepted by ``parse_theory``; one law per line."""
    return "".join(f"{law}\n" for law in theory.laws)


def serialize_story(branch: Branch) -> str:
    return branch.to_story_text()


def serialize_model(model: StructuralModel) -> str:
    return str(model)


def branch_from_leaf(theory: CPTheory, leaf_atoms: frozenset[Atom] | set[Atom]) -> Branch:
    """
    The unique canonical-order branch whose leaf is exactly ``leaf_atoms``.

    Raises:
        NoSuchBranch: no positive-probability branch ends in that leaf
        AmbiguousBranch: choice-distinct branches share the leaf
    """
    target = frozenset(leaf_atoms)
    matches = [branch for branch, _ in enumerate_branches(theory) if branch.leaf_true == target]
    if not matches:
        raise NoSuchBranch(f"no branch of the theory ends in {State(target)}")
    if len(matches) > 1:
        stories = "; ".join(
            ", ".join(str(step) for step in branch.steps) for branch in matches[:3]
        )
        raise AmbiguousBranch(
            f"{len(matches)} branches end in {State(target)} ({stories}); give the steps explicitly"
        )
    return matches[0]
