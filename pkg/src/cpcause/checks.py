"""
Generated-instance sweeps.

Each sweep draws seeded random instances, checks one property on each and
collects counterexamples, shrunk greedily and rendered as input-file text so
they can be replayed with the CLI.

Instance ``i`` of a sweep with seed ``s`` is drawn from ``default_rng([s, i])``,
so any single instance can be regenerated on its own.
"""

import itertools
import logging
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any

import numpy as np

from .bridge import (
    Context,
    DerivedVariable,
    InnateVariable,
    StructuralModel,
    TypicalityMode,
    check_lemma2,
    check_theorem1,
    story_for_context,
    translate,
    world_for_context,
)
from .causation import check_theorem2
from .config import CheckConfig
from .engine import CanonicalOrder, RandomOrder, ReverseOrder, exact_distribution
from .models import (
    And,
    Body,
    CPLaw,
    CPTheory,
    Disjunct,
    Formula,
    Literal,
    Not,
    Or,
    Var,
)
from .parser import serialize_story, serialize_theory

logger = logging.getLogger(__name__)

# Innate probabilities never equal 1/2, so every variable has a typical value
MODEL_GRID = tuple(Fraction(n, 10) for n in (1, 2, 3, 4, 6, 7, 8, 9))


# Generators


def _split_tenths(rng: np.random.Generator, parts: int) -> list[Fraction]:
    """``parts`` positive multiples of 1/10 summing to at most 1."""
    total = int(rng.integers(parts, 11))
    cuts = sorted(rng.choice(np.arange(1, total), size=parts - 1, replace=False).tolist())
    bounds = [0, *cuts, total]
    return [Fraction(b - a, 10) for a, b in itertools.pairwise(bounds)]


def random_theory(
    rng: np.random.Generator,
    max_laws: int = 6,
    max_atoms: int = 6,
    norms: bool = False,
) -> CPTheory:
    """
    A random theory over atoms ``a0..a{n-1}``.

    Body atoms always have a lower index than every head atom of their law, so
    theories are acyclic and negation is stratified.
    """
    n_atoms = int(rng.integers(2, max_atoms + 1))
    atoms = [f"a{i}" for i in range(n_atoms)]
    laws = []
    for law_id in range(int(rng.integers(1, max_laws + 1))):
        lowest = int(rng.integers(0, n_atoms))
        width = min(int(rng.integers(1, 3)), n_atoms - lowest)
        others = rng.choice(np.arange(lowest + 1, n_atoms), size=width - 1, replace=False)
        indices = [lowest, *others.tolist()]
        if width == 1 and rng.random() < 0.3:
            probs = [Fraction(1)]
        else:
            probs = _split_tenths(rng, width)
        head = []
        for index, p in zip(indices, probs, strict=True):
            norm = None
            if norms and rng.random() < 0.3:
                norm = Fraction(int(rng.integers(0, int(p * 10) + 1)), 10)
            head.append(Disjunct(atoms[index], p, norm))
        clauses = []
        if lowest > 0:
            for _ in range(int(rng.integers(0, 3))):
                size = int(rng.integers(1, 3))
                picks = rng.choice(lowest, size=min(size, lowest), replace=False).tolist()
                clauses.append(tuple(Literal(atoms[i], bool(rng.random() < 0.6)) for i in picks))
        laws.append(CPLaw(law_id, tuple(head), Body(tuple(clauses))))
    return CPTheory(tuple(laws))


def _random_formula(rng: np.random.Generator, names: list[str], depth: int = 2) -> Formula:
    if depth == 0 or len(names) == 1 or rng.random() < 0.3:
        leaf: Formula = Var(names[int(rng.integers(0, len(names)))])
        return Not(leaf) if rng.random() < 0.35 else leaf
    operands = (_random_formula(rng, names, depth - 1), _random_formula(rng, names, depth - 1))
    return And(operands) if rng.random() < 0.5 else Or(operands)


def random_model(
    rng: np.random.Generator, max_innate: int = 4, max_derived: int = 3
) -> StructuralModel:
    """A random acyclic model; derived equations only use earlier variables."""
    innate = []
    for i in range(int(rng.integers(1, max_innate + 1))):
        stat = MODEL_GRID[int(rng.integers(0, len(MODEL_GRID)))]
        norm = MODEL_GRID[int(rng.integers(0, len(MODEL_GRID)))] if rng.random() < 0.4 else None
        innate.append(InnateVariable(f"u{i}", stat, norm))
    names = [v.name for v in innate]
    derived = []
    for i in range(int(rng.integers(0, max_derived + 1))):
        derived.append(DerivedVariable(f"v{i}", _random_formula(rng, names)))
        names.append(f"v{i}")
    return StructuralModel(tuple(innate), tuple(derived))


def random_context(rng: np.random.Generator, model: StructuralModel) -> Context:
    return frozenset(v.name for v in model.innate if rng.random() < 0.5)


# Shrinking


def shrink_theory(theory: CPTheory, fails: Callable[[CPTheory], bool]) -> CPTheory:
    """Drop laws one at a time while the failure persists; returns a renumbered theory."""
    current = theory
    progress = True
    while progress:
        progress = False
        for law in current.laws:
            others = tuple(other for other in current.laws if other.id != law.id)
            candidate = CPTheory(others).renumbered()
            if fails(candidate):
                current = candidate
                progress = True
                break
    return current


def _without_variable(model: StructuralModel, name: str) -> StructuralModel | None:
    if any(name in v.formula.atoms() for v in model.derived):
        return None
    return StructuralModel(
        tuple(v for v in model.innate if v.name != name),
        tuple(v for v in model.derived if v.name != name),
        tuple(context - {name} for context in model.contexts),
    )


def shrink_model(
    model: StructuralModel,
    context: Context,
    keep: frozenset[str],
    fails: Callable[[StructuralModel, Context], bool],
) -> tuple[StructuralModel, Context]:
    """Drop variables nothing depends on (except ``keep``) while the failure persists."""
    progress = True
    while progress:
        progress = False
        for name in model.variables:
            if name in keep or (len(model.innate) == 1 and name == model.innate[0].name):
                continue
            candidate = _without_variable(model, name)
            if candidate is not None and fails(candidate, context - {name}):
                model, context = candidate, context - {name}
                progress = True
                break
    return model, context


def _model_text(model: StructuralModel, context: Context) -> str:
    return str(replace(model, contexts=(context,)))


# Reports


@dataclass
class Counterexample:
    description: str
    reproducer: str

    def to_dict(self) -> dict[str, Any]:
        return {"description": self.description, "reproducer": self.reproducer}


@dataclass
class SweepReport:
    """Outcome of one sweep."""

    name: str
    seed: int
    requested: int
    checked: int = 0
    notes: list[str] = field(default_factory=list)
    counterexamples: list[Counterexample] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict[str, Any]:
        return {
            "sweep": self.name,
            "seed": self.seed,
            "requested": self.requested,
            "checked": self.checked,
            "ok": self.ok,
            "notes": self.notes,
            "counterexamples": [c.to_dict() for c in self.counterexamples],
        }


# Sweeps


def _instance_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def sweep_order_invariance(seed: int, count: int, config: CheckConfig) -> SweepReport:
    """Exact distributions agree under canonical, reverse and seeded random orders."""
    report = SweepReport("order-invariance", seed, count)
    policies = [CanonicalOrder(), ReverseOrder()] + [
        RandomOrder(seed * 1000 + k) for k in range(config.random_policies)
    ]

    def fails(theory: CPTheory) -> bool:
        reference = exact_distribution(theory, policies[0]).entries
        return any(exact_distribution(theory, p).entries != reference for p in policies[1:])

    for index in range(count):
        theory = random_theory(_instance_rng(seed, index), config.max_laws, config.max_atoms)
        report.checked += 1
        if fails(theory):
            small = shrink_theory(theory, fails)
            report.counterexamples.append(
                Counterexample(f"instance {index}: distributions differ", serialize_theory(small))
            )
        if (index + 1) % 100 == 0:
            logger.info("order-invariance: %d/%d instances", index + 1, count)
    return report


def sweep_theorem2(seed: int, count: int, config: CheckConfig) -> SweepReport:
    """
    Both sides of the hh / intermediate equivalence agree whenever its hypothesis holds.

    Instances are translated structural models (at most five laws), drawn until
    ``count`` of them satisfy the hypothesis.
    """
    report = SweepReport("theorem2", seed, count)
    outside = unequal_outside = 0
    index = 0
    while report.checked < count and index < count * 50:
        rng = _instance_rng(seed, index)
        index += 1
        model = random_model(rng, max_innate=3, max_derived=2)
        context = random_context(rng, model)
        world = world_for_context(model, context)
        if len(world) < 2:
            continue
        names = sorted(world)
        cause, effect = (str(x) for x in rng.choice(names, size=2, replace=False))

        def fails(
            m: StructuralModel, u: Context, cause: str = cause, effect: str = effect
        ) -> bool:
            try:
                result = check_theorem2(translate(m), story_for_context(m, u), cause, effect)
            except ValueError:
                return False
            return result.violated

        result = check_theorem2(translate(model), story_for_context(model, context), cause, effect)
        if not result.hypothesis:
            outside += 1
            unequal_outside += not result.equal
            continue
        report.checked += 1
        if result.violated:
            small, small_context = shrink_model(model, context, frozenset({cause, effect}), fails)
            theory = translate(small)
            report.counterexamples.append(
                Counterexample(
                    f"instance {index - 1}: C={cause}, E={effect}: {result.lhs} != {result.rhs}",
                    serialize_theory(theory)
                    + "---\n"
                    + serialize_story(story_for_context(small, small_context)),
                )
            )
    report.notes.append(
        f"{outside} drawn instances fell outside the hypothesis, {unequal_outside} of them unequal"
    )
    if report.checked < count:
        report.notes.append(f"only {report.checked} instances satisfied the hypothesis")
    return report


def sweep_lemma2(seed: int, count: int, config: CheckConfig) -> SweepReport:
    """At-least-as-normal worlds are exactly those whose stories run in T^Normal(b)."""
    report = SweepReport("lemma2", seed, count)

    mode = TypicalityMode(config.typicality_mode)

    def fails(m: StructuralModel, u: Context) -> bool:
        return not check_lemma2(m, u, mode).holds

    for index in range(count):
        rng = _instance_rng(seed, index)
        model = random_model(rng)
        context = random_context(rng, model)
        report.checked += 1
        if fails(model, context):
            small, small_context = shrink_model(model, context, frozenset(), fails)
            report.counterexamples.append(
                Counterexample(f"instance {index}", _model_text(small, small_context))
            )
    return report


def sweep_theorem1(seed: int, count: int, config: CheckConfig) -> SweepReport:
    """hh-actual causation in the model agrees with the hh definition on its translation."""
    report = SweepReport("theorem1", seed, count)
    mode = TypicalityMode(config.typicality_mode)
    index = 0
    while report.checked < count and index < count * 20:
        rng = _instance_rng(seed, index)
        index += 1
        model = random_model(rng)
        context = random_context(rng, model)
        world = world_for_context(model, context)
        if len(world) < 2:
            continue
        cause, effect = (str(x) for x in rng.choice(sorted(world), size=2, replace=False))

        def fails(
            m: StructuralModel, u: Context, cause: str = cause, effect: str = effect
        ) -> bool:
            try:
                return not check_theorem1(m, u, cause, effect, mode).agrees
            except ValueError:
                return False

        report.checked += 1
        result = check_theorem1(model, context, cause, effect, mode)
        if not result.agrees:
            small, small_context = shrink_model(model, context, frozenset({cause, effect}), fails)
            report.counterexamples.append(
                Counterexample(
                    f"instance {index - 1}: C={cause}, E={effect}: model says "
                    f"{result.in_model}, theory says {result.in_theory}",
                    _model_text(small, small_context),
                )
            )
    return report


SWEEPS: dict[str, Callable[[int, int, CheckConfig], SweepReport]] = {
    "order-invariance": sweep_order_invariance,
    "2": sweep_theorem2,
    "lemma2": sweep_lemma2,
    "1": sweep_theorem1,
}


def default_count(name: str, config: CheckConfig) -> int:
    return {
        "order-invariance": config.order_invariance_count,
        "2": config.theorem2_count,
        "lemma2": config.lemma2_count,
        "1": config.theorem1_count,
    }[name]


def run_sweep(
    name: str, seed: int | None = None, count: int | None = None, config: CheckConfig | None = None
) -> SweepReport:
    """Run the sweep called ``name`` (``1``, ``2``, ``lemma2`` or ``order-invariance``)."""
    config = config if config is not None else CheckConfig()
    seed = seed if seed is not None else config.seed
    count = count if count is not None else default_count(name, config)
    logger.info("Running %s sweep: seed=%d count=%d", name, seed, count)
    report = SWEEPS[name](seed, count, config)
    logger.info(
        "%s sweep: %d checked, %d counterexamples",
        name,
        report.checked,
        len(report.counterexamples),
    )
    return report
