"""
Extended structural models and their translation into CP-logic.

A model has innate variables, each set directly by its context with a
statistical probability and an optional norm, and derived variables defined
by Boolean equations over other variables. Worlds and contexts are represented
by the set of variables that are true.

Normality compares worlds variable by variable: an innate variable is typical
when it takes its likely value (the norm decides when present, unless the
comparator runs in statistical mode), a derived variable when it agrees with
its equation.
"""

import itertools
import logging
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any

import networkx as nx

from .causation import cause_hh
from .engine import applicable_laws, branch_probability, exact_distribution, replay
from .errors import (
    AmbiguousTypicality,
    CEnotInWorld,
    CyclicModelError,
    ModelError,
    UnknownVariableError,
)
from .models import (
    EMPTY,
    ONE,
    ZERO,
    Atom,
    Body,
    Branch,
    Choice,
    CPLaw,
    CPTheory,
    Disjunct,
    Formula,
    State,
    Var,
    conjunction,
    negated,
)
from .transform import intervene_neg, normal_refine, t_star
from .utils import format_probability

logger = logging.getLogger(__name__)

World = frozenset[Atom]
Context = frozenset[Atom]

HALF = Fraction(1, 2)


class TypicalityMode(str, Enum):
    NORMATIVE = "normative"
    STATISTICAL = "statistical"


class NormalityVerdict(str, Enum):
    MORE = "more"
    LESS = "less"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class InnateVariable:
    name: Atom
    stat_prob: Fraction
    norm_prob: Fraction | None = None

    def __post_init__(self) -> None:
        if not ZERO < self.stat_prob < ONE:
            raise ModelError(f"probability of {self.name} must be in (0, 1), got {self.stat_prob}")
        if self.norm_prob is not None and not ZERO < self.norm_prob < ONE:
            raise ModelError(f"norm of {self.name} must be in (0, 1), got {self.norm_prob}")

    def governing_prob(self, mode: TypicalityMode) -> Fraction:
        if mode == TypicalityMode.NORMATIVE and self.norm_prob is not None:
            return self.norm_prob
        return self.stat_prob

    def __str__(self) -> str:
        text = f"innate {self.name} : {format_probability(self.stat_prob)}"
        if self.norm_prob is not None:
            text += f" {{{format_probability(self.norm_prob)}}}"
        return text


@dataclass(frozen=True)
class DerivedVariable:
    name: Atom
    formula: Formula

    def __str__(self) -> str:
        return f"derived {self.name} = {self.formula}"


@dataclass(frozen=True)
class StructuralModel:
    """
    Innate and derived Boolean variables plus the contexts declared with the model.

    Raises:
        ModelError: duplicate names or contexts over unknown variables
        UnknownVariableError: an equation uses an undeclared variable
        CyclicModelError: derived variables depend on each other cyclically
    """

    innate: tuple[InnateVariable, ...]
    derived: tuple[DerivedVariable, ...] = ()
    contexts: tuple[Context, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        names = [v.name for v in self.innate] + [v.name for v in self.derived]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ModelError(f"variables declared twice: {duplicates}")
        if EMPTY in names:
            raise ModelError(f"{EMPTY} cannot name a variable")
        for variable in self.derived:
            unknown = variable.formula.atoms() - set(names)
            if unknown:
                raise UnknownVariableError(
                    f"equation of {variable.name} uses undeclared variable(s) {sorted(unknown)}"
                )
        for context in self.contexts:
            self.check_context(context)
        graph = self.dependency_graph
        if not nx.is_directed_acyclic_graph(graph):
            cycle = [edge[0] for edge in nx.find_cycle(graph)]
            raise CyclicModelError(
                f"cyclic equations: {' -> '.join(cycle + cycle[:1])}", tuple(cycle)
            )

    @property
    def variables(self) -> tuple[Atom, ...]:
        """Declared order: innate, then derived."""
        return tuple(v.name for v in self.innate) + tuple(v.name for v in self.derived)

    @property
    def innate_names(self) -> frozenset[Atom]:
        return frozenset(v.name for v in self.innate)

    @cached_property
    def dependency_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.variables)
        for variable in self.derived:
            for dependency in variable.formula.atoms():
                graph.add_edge(dependency, variable.name)
        return graph

    @cached_property
    def evaluation_order(self) -> tuple[DerivedVariable, ...]:
        """Derived variables in dependency order, ties in declaration order."""
        position = {name: index for index, name in enumerate(self.variables)}
        by_name = {v.name: v for v in self.derived}
        order = nx.lexicographical_topological_sort(
            self.dependency_graph, key=lambda name: position[name]
        )
        return tuple(by_name[name] for name in order if name in by_name)

    def innate_variable(self, name: Atom) -> InnateVariable | None:
        for variable in self.innate:
            if variable.name == name:
                return variable
        return None

    def derived_variable(self, name: Atom) -> DerivedVariable | None:
        for variable in self.derived:
            if variable.name == name:
                return variable
        return None

    def check_context(self, context: Context) -> None:
        unknown = context - self.innate_names
        if unknown:
            raise UnknownVariableError(f"context sets non-innate variable(s) {sorted(unknown)}")

    def all_contexts(self) -> Iterator[Context]:
        """Every assignment to the innate variables."""
        names = [v.name for v in self.innate]
        for values in itertools.product((False, True), repeat=len(names)):
            yield frozenset(name for name, value in zip(names, values, strict=True) if value)

    def __str__(self) -> str:
        lines = [str(v) for v in self.innate] + [str(v) for v in self.derived]
        for context in self.contexts:
            assignments = ", ".join(
                f"{v.name}={int(v.name in context)}" for v in self.innate
            )
            lines.append(f"context {assignments}")
        return "".join(f"{line}\n" for line in lines)


def format_world(model: StructuralModel, world: World) -> str:
    return "{" + ", ".join(v if v in world else f"~{v}" for v in model.variables) + "}"


def world_for_context(model: StructuralModel, context: Context) -> World:
    """s_u: innate values from the context, derived values from the equations."""
    model.check_context(context)
    true = set(context)
    for variable in model.evaluation_order:
        if variable.formula.evaluate(frozenset(true)):
            true.add(variable.name)
    return frozenset(true)


def lawful_worlds(model: StructuralModel) -> list[World]:
    """The worlds satisfying all equations, one per context."""
    return [world_for_context(model, context) for context in model.all_contexts()]


# Normality


def typical_value(
    model: StructuralModel,
    name: Atom,
    world: World,
    mode: TypicalityMode = TypicalityMode.NORMATIVE,
) -> bool:
    """
    Raises:
        AmbiguousTypicality: an innate variable's governing probability is exactly 1/2
    """
    innate = model.innate_variable(name)
    if innate is not None:
        p = innate.governing_prob(TypicalityMode(mode))
        if p == HALF:
            raise AmbiguousTypicality(f"{name} has probability 1/2 and no typical value")
        return p > HALF
    derived = model.derived_variable(name)
    if derived is None:
        raise UnknownVariableError(f"unknown variable {name}")
    return derived.formula.evaluate(world)


def is_typical(
    model: StructuralModel,
    name: Atom,
    world: World,
    mode: TypicalityMode = TypicalityMode.NORMATIVE,
) -> bool:
    return (name in world) == typical_value(model, name, world, mode)


def normality_compare(
    model: StructuralModel,
    first: World,
    second: World,
    mode: TypicalityMode = TypicalityMode.NORMATIVE,
) -> NormalityVerdict:
    """How ``first`` compares to ``second`` in the normality preorder."""
    more = less = False
    for name in model.variables:
        typical_first = is_typical(model, name, first, mode)
        typical_second = is_typical(model, name, second, mode)
        more |= typical_first and not typical_second
        less |= typical_second and not typical_first
    if more and less:
        return NormalityVerdict.INCOMPARABLE
    if more:
        return NormalityVerdict.MORE
    if less:
        return NormalityVerdict.LESS
    return NormalityVerdict.EQUAL


def at_least_as_normal(
    model: StructuralModel,
    first: World,
    second: World,
    mode: TypicalityMode = TypicalityMode.NORMATIVE,
) -> bool:
    verdict = normality_compare(model, first, second, mode)
    return verdict in (NormalityVerdict.MORE, NormalityVerdict.EQUAL)


# Translation


def translate(model: StructuralModel) -> CPTheory:
    """
    Innate variables become vacuous non-deterministic laws ``v:p {q} <- .``,
    derived variables deterministic laws ``v <- cnf(equation).`` in dependency order.
    """
    laws = [
        CPLaw(index, (Disjunct(v.name, v.stat_prob, v.norm_prob),))
        for index, v in enumerate(model.innate)
    ]
    for variable in model.evaluation_order:
        body = Body(variable.formula.to_cnf())
        laws.append(CPLaw(len(laws), (Disjunct(variable.name),), body))
    return CPTheory(tuple(laws), frozenset(model.variables))


def story_for_context(model: StructuralModel, context: Context) -> Branch:
    """Innate laws choose per the context, then derived laws fire in id order."""
    model.check_context(context)
    theory = translate(model)
    steps = [
        Choice(index, v.name if v.name in context else EMPTY)
        for index, v in enumerate(model.innate)
    ]
    state = State(frozenset(context))
    applied = frozenset(range(len(model.innate)))
    while remaining := applicable_laws(theory, state, applied):
        law = remaining[0]
        steps.append(Choice(law.id, law.head[0].atom))
        state = state.with_atom(law.head[0].atom)
        applied = applied | {law.id}
    return replay(theory, steps)


# Actual causation


@dataclass(frozen=True)
class Witness:
    """A counterfactual world together with how it relates to the actual one."""

    world: World
    admissible: bool
    verdict: NormalityVerdict
    probability: Fraction

    def to_dict(self, model: StructuralModel) -> dict[str, Any]:
        return {
            "world": format_world(model, self.world),
            "admissible": self.admissible,
            "normality": self.verdict.value,
            "probability": str(self.probability),
        }


def _require_in_world(world: World, *names: Atom) -> None:
    missing = [name for name in names if name not in world]
    if missing:
        raise CEnotInWorld(f"{', '.join(missing)} not true in the actual world")


def witnesses(
    model: StructuralModel,
    context: Context,
    cause: Atom,
    effect: Atom,
    mode: TypicalityMode = TypicalityMode.NORMATIVE,
) -> list[Witness]:
    """Leaves of T* after do(~C), each marked admissible when ~C & ~E and at least as normal as s_u."""
    actual = world_for_context(model, context)
    _require_in_world(actual, cause, effect)
    theory = translate(model)
    story = story_for_context(model, context)
    counterfactual = intervene_neg(t_star(theory, story, cause, effect), cause)
    result = []
    for state, probability in exact_distribution(counterfactual).items():
        world = state.true_atoms
        verdict = normality_compare(model, world, actual, mode)
        admissible = (
            cause not in world
            and effect not in world
            and verdict in (NormalityVerdict.MORE, NormalityVerdict.EQUAL)
        )
        result.append(Witness(world, admissible, verdict, probability))
    return result


def hh_actual_cause(
    model: StructuralModel,
    context: Context,
    cause: Atom,
    effect: Atom,
    mode: TypicalityMode = TypicalityMode.NORMATIVE,
) -> bool:
    """Whether some witness with ~C & ~E is at least as normal as the actual world."""
    return any(w.admissible for w in witnesses(model, context, cause, effect, mode))


@dataclass(frozen=True)
class BestWitness:
    """
    A most normal witness.

    ``probability`` is the probability, in the translated theory, that every
    variable on which the witness differs from the actual world takes the
    witness's value; ``story_probability`` is that of the witness's whole story.
    """

    world: World
    probability: Fraction
    story_probability: Fraction

    def to_dict(self, model: StructuralModel) -> dict[str, Any]:
        return {
            "world": format_world(model, self.world),
            "probability": str(self.probability),
            "story_probability": str(self.story_probability),
        }


def _lexicographic_key(model: StructuralModel, world: World) -> tuple[bool, ...]:
    return tuple(name not in world for name in model.variables)


def _maximal(
    model: StructuralModel, candidates: list[World], mode: TypicalityMode
) -> list[World]:
    return [
        w
        for w in candidates
        if not any(
            normality_compare(model, other, w, mode) == NormalityVerdict.MORE
            for other in candidates
        )
    ]


def _context_of(model: StructuralModel, world: World) -> Context:
    return world & model.innate_names


def best_witness(
    model: StructuralModel,
    context: Context,
    cause: Atom,
    effect: Atom,
    relaxed: bool = False,
    mode: TypicalityMode = TypicalityMode.NORMATIVE,
) -> BestWitness | None:
    """
    A maximally normal admissible witness, ties broken by lexicographic world order.

    With ``relaxed`` every lawful world with ~C & ~E competes, whether or not it
    is a witness of T* or at least as normal as the actual world.
    """
    actual = world_for_context(model, context)
    _require_in_world(actual, cause, effect)
    if relaxed:
        candidates = [
            w for w in lawful_worlds(model) if cause not in w and effect not in w
        ]
    else:
        candidates = [w.world for w in witnesses(model, context, cause, effect, mode) if w.admissible]
    if not candidates:
        return None
    best = min(_maximal(model, candidates, mode), key=lambda w: _lexicographic_key(model, w))

    theory = translate(model)
    deviations = [
        Var(name) if name in best else negated(name)
        for name in model.variables
        if (name in best) != (name in actual)
    ]
    distribution = exact_distribution(theory)
    probability = distribution.probability(conjunction(*deviations)) if deviations else ONE
    story_probability = ZERO
    if best in lawful_worlds(model):
        story = story_for_context(model, _context_of(model, best))
        story_probability = branch_probability(theory, story.steps)
    return BestWitness(best, probability, story_probability)


# Executable checks


@dataclass(frozen=True)
class Lemma2Row:
    world: World
    at_least_as_normal: bool
    executable: bool

    @property
    def agrees(self) -> bool:
        return self.at_least_as_normal == self.executable


@dataclass
class Lemma2Report:
    """For every lawful world: is it at least as normal as s_u, and can its story run in T^Normal(b)?"""

    context: Context
    rows: list[Lemma2Row]

    @property
    def counterexamples(self) -> list[Lemma2Row]:
        return [row for row in self.rows if not row.agrees]

    @property
    def holds(self) -> bool:
        return not self.counterexamples


def check_lemma2(
    model: StructuralModel,
    context: Context,
    mode: TypicalityMode = TypicalityMode.NORMATIVE,
) -> Lemma2Report:
    theory = translate(model)
    actual = world_for_context(model, context)
    refined = normal_refine(theory, story_for_context(model, context))
    rows = []
    for other in model.all_contexts():
        world = world_for_context(model, other)
        story = story_for_context(model, other)
        rows.append(
            Lemma2Row(
                world,
                at_least_as_normal(model, world, actual, mode),
                branch_probability(refined, story.steps) > 0,
            )
        )
    return Lemma2Report(context, rows)


@dataclass(frozen=True)
class Theorem1Report:
    """hh-actual causation judged in the model and in its CP translation."""

    cause: Atom
    effect: Atom
    in_model: bool
    in_theory: bool

    @property
    def agrees(self) -> bool:
        return self.in_model == self.in_theory


def check_theorem1(
    model: StructuralModel,
    context: Context,
    cause: Atom,
    effect: Atom,
    mode: TypicalityMode = TypicalityMode.NORMATIVE,
) -> Theorem1Report:
    in_model = hh_actual_cause(model, context, cause, effect, mode)
    verdict = cause_hh(translate(model), story_for_context(model, context), cause, effect)
    return Theorem1Report(cause, effect, in_model, verdict.is_cause)
