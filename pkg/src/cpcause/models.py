"""
Data models for CP-theories, stories, distributions and causal verdicts.

All models are immutable. Probabilities are exact ``Fraction`` values.
"""

import itertools
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any

from .errors import DuplicateHeadAtom, ProbabilitySumError
from .utils import format_decimal, format_probability

Atom = str

# Outcome marker for the implicit empty disjunct ("nothing happens").
EMPTY: Atom = "_"

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class Literal:
    """A possibly negated atom in a law body."""

    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return self.atom if self.positive else f"~{self.atom}"

    def holds_in(self, true_atoms: frozenset[Atom]) -> bool:
        return (self.atom in true_atoms) == self.positive


Clause = tuple[Literal, ...]


@dataclass(frozen=True)
class Body:
    """A CNF body; no clauses means the body is trivially true."""

    clauses: tuple[Clause, ...] = ()

    def __post_init__(self) -> None:
        if any(len(clause) == 0 for clause in self.clauses):
            raise ValueError("body clauses must be non-empty")

    @property
    def atoms(self) -> frozenset[Atom]:
        return frozenset(lit.atom for clause in self.clauses for lit in clause)

    @property
    def has_negation(self) -> bool:
        return any(not lit.positive for clause in self.clauses for lit in clause)

    def holds_in(self, true_atoms: frozenset[Atom]) -> bool:
        """Classical truth of the body in a total assignment."""
        return all(any(lit.holds_in(true_atoms) for lit in clause) for clause in self.clauses)

    def __str__(self) -> str:
        parts = []
        for clause in self.clauses:
            if len(clause) == 1:
                parts.append(str(clause[0]))
            else:
                parts.append("(" + " | ".join(str(lit) for lit in clause) + ")")
        return ", ".join(parts)


@dataclass(frozen=True)
class Disjunct:
    """One head alternative: an atom with its statistical and optional normative probability."""

    atom: Atom
    stat_prob: Fraction = ONE
    norm_prob: Fraction | None = None

    def __post_init__(self) -> None:
        if not ZERO < self.stat_prob <= ONE:
            raise ProbabilitySumError(
                f"probability of {self.atom} must be in (0, 1], got {self.stat_prob}"
            )
        if self.norm_prob is not None and not ZERO <= self.norm_prob <= ONE:
            raise ProbabilitySumError(
                f"norm of {self.atom} must be in [0, 1], got {self.norm_prob}"
            )

    @property
    def normative_mass(self) -> Fraction:
        """The norm when present, the statistical probability otherwise."""
        return self.norm_prob if self.norm_prob is not None else self.stat_prob

    def __str__(self) -> str:
        text = self.atom
        if self.stat_prob != ONE:
            text += f":{format_probability(self.stat_prob)}"
        if self.norm_prob is not None:
            text += f" {{{format_probability(self.norm_prob)}}}"
        return text


@dataclass(frozen=True)
class CPLaw:
    """
    A CP-law ``Head <- Body``.

    The head's statistical mass may be below 1; the rest belongs to the implicit
    empty disjunct, which ``outcomes`` materializes under the ``EMPTY`` marker.
    """

    id: int
    head: tuple[Disjunct, ...]
    body: Body = field(default_factory=Body)

    def __post_init__(self) -> None:
        seen: set[Atom] = set()
        for disjunct in self.head:
            if disjunct.atom in seen:
                raise DuplicateHeadAtom(
                    f"atom {disjunct.atom} occurs twice in the head of law {self.id}"
                )
            seen.add(disjunct.atom)
        if self.stat_mass > ONE:
            raise ProbabilitySumError(
                f"head of law {self.id} has probability mass {self.stat_mass} > 1"
            )
        if self.has_norms and self.norm_mass > ONE:
            raise ProbabilitySumError(
                f"head of law {self.id} has normative mass {self.norm_mass} > 1"
            )

    @property
    def head_atoms(self) -> frozenset[Atom]:
        return frozenset(d.atom for d in self.head)

    @property
    def atoms(self) -> frozenset[Atom]:
        return self.head_atoms | self.body.atoms

    @property
    def stat_mass(self) -> Fraction:
        return sum((d.stat_prob for d in self.head), ZERO)

    @property
    def norm_mass(self) -> Fraction:
        return sum((d.normative_mass for d in self.head), ZERO)

    @property
    def empty_mass(self) -> Fraction:
        return ONE - self.stat_mass

    @property
    def has_norms(self) -> bool:
        return any(d.norm_prob is not None for d in self.head)

    @property
    def is_deterministic(self) -> bool:
        """A single outcome with probability 1."""
        return len(self.head) == 1 and self.head[0].stat_prob == ONE

    @property
    def is_vacuous(self) -> bool:
        return not self.body.clauses

    def outcomes(self) -> tuple[tuple[Atom, Fraction], ...]:
        """Every outcome with positive mass, the empty disjunct last."""
        result = tuple((d.atom, d.stat_prob) for d in self.head)
        if self.empty_mass > 0:
            result += ((EMPTY, self.empty_mass),)
        return result

    def mass_of(self, outcome: Atom) -> Fraction:
        """Statistical mass of an outcome (0 when the law cannot produce it)."""
        if outcome == EMPTY:
            return self.empty_mass
        for disjunct in self.head:
            if disjunct.atom == outcome:
                return disjunct.stat_prob
        return ZERO

    def with_outcomes(self, outcomes: Iterable[tuple[Atom, Fraction]]) -> "CPLaw":
        """The same law with a new head built from (atom, probability) pairs, norms dropped."""
        head = tuple(Disjunct(atom, prob) for atom, prob in outcomes if atom != EMPTY and prob > 0)
        return replace(self, head=head)

    def without_norms(self) -> "CPLaw":
        return replace(self, head=tuple(replace(d, norm_prob=None) for d in self.head))

    def __str__(self) -> str:
        head = "; ".join(str(d) for d in self.head)
        body = str(self.body)
        return f"{head} <- {body}." if body else f"{head} <- ."


@dataclass(frozen=True)
class CPTheory:
    """
    An ordered set of CP-laws over a ground atom universe.

    Law ids are strictly increasing. Parsed theories number their laws ``0..n-1``;
    transformations keep the ids of the laws they came from so that stories stay
    addressable, and ``renumbered`` compacts them again. ``atoms`` always contains
    every atom of every law and may contain more (transformations keep the universe
    of the theory they started from).
    """

    laws: tuple[CPLaw, ...] = ()
    atoms: frozenset[Atom] = frozenset()

    def __post_init__(self) -> None:
        ids = [law.id for law in self.laws]
        if any(a >= b for a, b in itertools.pairwise(ids)):
            raise ValueError(f"law ids must be strictly increasing, got {ids}")
        universe = frozenset(self.atoms).union(*(law.atoms for law in self.laws))
        object.__setattr__(self, "atoms", universe)

    @cached_property
    def _by_id(self) -> dict[int, CPLaw]:
        return {law.id: law for law in self.laws}

    def law(self, law_id: int) -> CPLaw:
        return self._by_id[law_id]

    def has_law(self, law_id: int) -> bool:
        return law_id in self._by_id

    @property
    def law_ids(self) -> tuple[int, ...]:
        return tuple(law.id for law in self.laws)

    @property
    def next_law_id(self) -> int:
        return self.laws[-1].id + 1 if self.laws else 0

    @property
    def has_norms(self) -> bool:
        return any(law.has_norms for law in self.laws)

    @property
    def has_negation(self) -> bool:
        return any(law.body.has_negation for law in self.laws)

    def laws_with_head(self, atom: Atom) -> tuple[CPLaw, ...]:
        return tuple(law for law in self.laws if atom in law.head_atoms)

    def with_laws(self, laws: Iterable[CPLaw]) -> "CPTheory":
        """A theory over the same universe with the given laws (empty heads dropped)."""
        return CPTheory(tuple(law for law in laws if law.head), self.atoms)

    def replace_law(self, law: CPLaw) -> "CPTheory":
        return self.with_laws(law if existing.id == law.id else existing for existing in self.laws)

    def renumbered(self) -> "CPTheory":
        """The same laws with ids ``0..n-1``."""
        return CPTheory(
            tuple(replace(law, id=index) for index, law in enumerate(self.laws)), self.atoms
        )

    def __len__(self) -> int:
        return len(self.laws)

    def __str__(self) -> str:
        return "\n".join(str(law) for law in self.laws)


@dataclass(frozen=True)
class State:
    """A total assignment, represented by the set of atoms that are true."""

    true_atoms: frozenset[Atom] = frozenset()

    def value(self, atom: Atom) -> bool:
        return atom in self.true_atoms

    def with_atom(self, atom: Atom) -> "State":
        if atom == EMPTY or atom in self.true_atoms:
            return self
        return State(self.true_atoms | {atom})

    def __str__(self) -> str:
        return "{" + ", ".join(sorted(self.true_atoms)) + "}"


@dataclass(frozen=True)
class Choice:
    """The application of a law together with the outcome chosen from its head."""

    law_id: int
    outcome: Atom

    @property
    def is_empty(self) -> bool:
        return self.outcome == EMPTY

    def __str__(self) -> str:
        return f"apply {self.law_id} -> {self.outcome}"


@dataclass(frozen=True)
class Branch:
    """A story: law applications in order, and the leaf they produce."""

    steps: tuple[Choice, ...]
    leaf: State

    @property
    def leaf_true(self) -> frozenset[Atom]:
        return self.leaf.true_atoms

    @property
    def applied_laws(self) -> tuple[int, ...]:
        return tuple(step.law_id for step in self.steps)

    def choice_for(self, law_id: int) -> Choice | None:
        for step in self.steps:
            if step.law_id == law_id:
                return step
        return None

    def to_story_text(self) -> str:
        return "".join(f"{step}\n" for step in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


@dataclass
class Distribution:
    """Exact probabilities of leaf states."""

    entries: dict[State, Fraction]

    @property
    def total(self) -> Fraction:
        return sum(self.entries.values(), ZERO)

    def probability(self, formula: "Formula") -> Fraction:
        return sum(
            (p for state, p in self.entries.items() if formula.evaluate(state.true_atoms)), ZERO
        )

    def get(self, state: State) -> Fraction:
        return self.entries.get(state, ZERO)

    def items(self) -> list[tuple[State, Fraction]]:
        """Entries by decreasing probability, then by leaf text."""
        return sorted(self.entries.items(), key=lambda item: (-item[1], str(item[0])))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[State]:
        return iter(self.entries)

    def to_dict(self, digits: int = 6) -> list[dict[str, Any]]:
        return [
            {
                "leaf": sorted(state.true_atoms),
                "probability_rational": str(p),
                "probability_decimal": format_decimal(p, digits),
            }
            for state, p in self.items()
        ]


# Formulas


class Formula:
    """Propositional formula over atoms."""

    def evaluate(self, true_atoms: frozenset[Atom]) -> bool:
        raise NotImplementedError

    def atoms(self) -> frozenset[Atom]:
        raise NotImplementedError

    def to_cnf(self) -> tuple[Clause, ...]:
        """Equivalent CNF clauses (negation normal form, then distribution)."""
        return _cnf(_nnf(self, positive=True))


@dataclass(frozen=True)
class Var(Formula):
    atom: Atom

    def evaluate(self, true_atoms: frozenset[Atom]) -> bool:
        return self.atom in true_atoms

    def atoms(self) -> frozenset[Atom]:
        return frozenset({self.atom})

    def __str__(self) -> str:
        return self.atom


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula

    def evaluate(self, true_atoms: frozenset[Atom]) -> bool:
        return not self.operand.evaluate(true_atoms)

    def atoms(self) -> frozenset[Atom]:
        return self.operand.atoms()

    def __str__(self) -> str:
        if isinstance(self.operand, Var | Not):
            return f"~{self.operand}"
        return f"~({self.operand})"


@dataclass(frozen=True)
class And(Formula):
    operands: tuple[Formula, ...]

    def evaluate(self, true_atoms: frozenset[Atom]) -> bool:
        return all(op.evaluate(true_atoms) for op in self.operands)

    def atoms(self) -> frozenset[Atom]:
        return frozenset().union(*(op.atoms() for op in self.operands))

    def __str__(self) -> str:
        return " & ".join(f"({op})" if isinstance(op, Or) else str(op) for op in self.operands)


@dataclass(frozen=True)
class Or(Formula):
    operands: tuple[Formula, ...]

    def evaluate(self, true_atoms: frozenset[Atom]) -> bool:
        return any(op.evaluate(true_atoms) for op in self.operands)

    def atoms(self) -> frozenset[Atom]:
        return frozenset().union(*(op.atoms() for op in self.operands))

    def __str__(self) -> str:
        return " | ".join(f"({op})" if isinstance(op, And) else str(op) for op in self.operands)


def negated(atom: Atom) -> Formula:
    return Not(Var(atom))


def conjunction(*formulas: Formula) -> Formula:
    return formulas[0] if len(formulas) == 1 else And(tuple(formulas))


def _nnf(formula: Formula, positive: bool) -> Formula:
    if isinstance(formula, Var):
        return formula if positive else Not(formula)
    if isinstance(formula, Not):
        return _nnf(formula.operand, not positive)
    if isinstance(formula, And | Or):
        parts = tuple(_nnf(op, positive) for op in formula.operands)
        keep_kind = isinstance(formula, And) == positive
        return And(parts) if keep_kind else Or(parts)
    raise TypeError(f"not a formula: {formula!r}")


def _dedupe(literals: Iterable[Literal]) -> Clause:
    return tuple(dict.fromkeys(literals))


def _cnf(formula: Formula) -> tuple[Clause, ...]:
    if isinstance(formula, Var):
        return ((Literal(formula.atom),),)
    if isinstance(formula, Not):
        assert isinstance(formula.operand, Var)
        return ((Literal(formula.operand.atom, positive=False),),)
    if isinstance(formula, And):
        clauses = [clause for op in formula.operands for clause in _cnf(op)]
        return tuple(dict.fromkeys(clauses))
    if isinstance(formula, Or):
        products = itertools.product(*(_cnf(op) for op in formula.operands))
        clauses = [_dedupe(lit for clause in combo for lit in clause) for combo in products]
        return tuple(dict.fromkeys(clauses))
    raise TypeError(f"not a formula: {formula!r}")


# Causal verdicts


class DefinitionKind(str, Enum):
    """The graded definitions of actual causation."""

    WORKING = "working"
    HH = "hh"
    INTERMEDIATE = "intermediate"
    FINAL = "final"


@dataclass(frozen=True)
class CauseVerdict:
    """The strength with which ``cause`` actually caused ``effect`` under one definition."""

    cause: Atom
    effect: Atom
    definition: DefinitionKind
    strength: Fraction
    factors: tuple[Fraction, Fraction] | None = None
    diagnostics: tuple[str, ...] = ()
    error: str | None = None

    def __post_init__(self) -> None:
        if not ZERO <= self.strength <= ONE:
            raise ValueError(f"strength must be in [0, 1], got {self.strength}")

    @property
    def is_cause(self) -> bool:
        return self.error is None and self.strength > 0

    def to_dict(self, digits: int = 6) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization"""
        factors = None
        if self.factors is not None:
            factors = {
                "counterfactual": str(self.factors[0]),
                "abnormality": str(self.factors[1]),
            }
        diagnostics = list(self.diagnostics)
        if self.error is not None:
            diagnostics.append(self.error)
        return {
            "cause": self.cause,
            "effect": self.effect,
            "definition": self.definition.value,
            "strength_rational": str(self.strength),
            "strength_decimal": format_decimal(self.strength, digits),
            "is_cause": self.is_cause,
            "factors": factors,
            "diagnostics": diagnostics,
        }


def state_from(atoms: Iterable[Atom]) -> State:
    return State(frozenset(atoms))


def distribution_from(mapping: Mapping[frozenset[Atom], Fraction]) -> Distribution:
    return Distribution({State(atoms): p for atoms, p in mapping.items()})
