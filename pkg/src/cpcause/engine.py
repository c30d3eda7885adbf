"""
Probability-tree semantics of CP-theories.

Laws fire under the well-founded reading of negation: a negative body literal
only counts as satisfied once its atom can no longer become true. Trees start in
the all-false state, expand one applicable law per node (chosen by an
``OrderPolicy``) and end in leaves where no law is applicable. Distributions,
queries, branch enumeration and sampling are all read off these trees.
"""

import logging
import warnings
import zlib
from abc import ABC, abstractmethod
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    ConditionImpossible,
    IllegalStep,
    IncompleteStory,
    NonStratifiedWarning,
    UnknownAtomError,
)
from .models import (
    ONE,
    ZERO,
    Atom,
    Branch,
    Choice,
    CPLaw,
    CPTheory,
    Distribution,
    Formula,
    State,
)

logger = logging.getLogger(__name__)

ChoicePath = tuple[Choice, ...]


# Applicability


def possible_atoms(
    theory: CPTheory, state: State, applied: frozenset[int] = frozenset()
) -> frozenset[Atom]:
    """
    Atoms that are true or may still become true.

    Least fixpoint from the true atoms: an unapplied law whose every clause has a
    positive literal already in the set, or a negative literal whose atom is
    currently false, contributes its head atoms. Atoms outside the result are
    impossible.
    """
    possible = set(state.true_atoms)
    pending = [law for law in theory.laws if law.id not in applied]
    changed = True
    while changed:
        changed = False
        remaining = []
        for law in pending:
            if law.head_atoms <= possible:
                continue
            if all(
                any(
                    (lit.atom in possible) if lit.positive else (lit.atom not in state.true_atoms)
                    for lit in clause
                )
                for clause in law.body.clauses
            ):
                possible |= law.head_atoms
                changed = True
            else:
                remaining.append(law)
        pending = remaining
    return frozenset(possible)


def _definitely_satisfied(law: CPLaw, state: State, possible: frozenset[Atom]) -> bool:
    return all(
        any(
            (lit.atom in state.true_atoms) if lit.positive else (lit.atom not in possible)
            for lit in clause
        )
        for clause in law.body.clauses
    )


def _definitely_falsified(law: CPLaw, state: State, possible: frozenset[Atom]) -> bool:
    return any(
        all(
            (lit.atom not in possible) if lit.positive else (lit.atom in state.true_atoms)
            for lit in clause
        )
        for clause in law.body.clauses
    )


def applicable(
    theory: CPTheory, law: CPLaw, state: State, applied: frozenset[int] = frozenset()
) -> bool:
    """A law fires when it is unapplied and its body is definitely, permanently satisfied."""
    if law.id in applied:
        return False
    return _definitely_satisfied(law, state, possible_atoms(theory, state, applied))


def applicable_laws(
    theory: CPTheory, state: State, applied: frozenset[int] = frozenset()
) -> list[CPLaw]:
    """All applicable laws, by increasing id."""
    possible = possible_atoms(theory, state, applied)
    return [
        law
        for law in theory.laws
        if law.id not in applied and _definitely_satisfied(law, state, possible)
    ]


def undecided_laws(
    theory: CPTheory, state: State, applied: frozenset[int] = frozenset()
) -> list[CPLaw]:
    """Unapplied laws whose body is neither definitely satisfied nor definitely falsified."""
    possible = possible_atoms(theory, state, applied)
    return [
        law
        for law in theory.laws
        if law.id not in applied
        and not _definitely_satisfied(law, state, possible)
        and not _definitely_falsified(law, state, possible)
    ]


def _warn_if_undecided(theory: CPTheory, state: State, applied: frozenset[int]) -> None:
    undecided = undecided_laws(theory, state, applied)
    if undecided:
        laws = ", ".join(f"{law.id}: {law}" for law in undecided)
        warnings.warn(
            NonStratifiedWarning(f"laws neither applicable nor impossible in leaf {state}: {laws}"),
            stacklevel=3,
        )


# Stories


def advance(
    theory: CPTheory,
    state: State,
    applied: frozenset[int],
    choice: Choice,
    index: int = 0,
) -> tuple[State, frozenset[int]]:
    """
    Execute one story step.

    Raises:
        IllegalStep: unknown law, law already applied, law not applicable, or an
            outcome the law's head cannot produce
    """
    where = f"step {index + 1} ({choice})"
    if not theory.has_law(choice.law_id):
        raise IllegalStep(f"{where}: theory has no law {choice.law_id}")
    law = theory.law(choice.law_id)
    if choice.law_id in applied:
        raise IllegalStep(f"{where}: law {law.id} ({law}) was already applied")
    if law.mass_of(choice.outcome) == 0:
        raise IllegalStep(f"{where}: {choice.outcome} is not an outcome of law {law.id} ({law})")
    if not applicable(theory, law, state, applied):
        raise IllegalStep(f"{where}: law {law.id} ({law}) is not applicable in state {state}")
    return state.with_atom(choice.outcome), applied | {law.id}


def check_complete(theory: CPTheory, state: State, applied: frozenset[int]) -> None:
    """
    Raises:
        IncompleteStory: some law is still applicable
    """
    remaining = applicable_laws(theory, state, applied)
    if remaining:
        ids = ", ".join(str(law.id) for law in remaining)
        raise IncompleteStory(f"story ends in {state} while law(s) {ids} are still applicable")


def replay(theory: CPTheory, steps: Sequence[Choice]) -> Branch:
    """Replay ``steps`` from the all-false root; returns the branch with its leaf."""
    state = State()
    applied: frozenset[int] = frozenset()
    for index, choice in enumerate(steps):
        state, applied = advance(theory, state, applied, choice, index)
    check_complete(theory, state, applied)
    return Branch(tuple(steps), state)


def branch_probability(theory: CPTheory, steps: Sequence[Choice]) -> Fraction:
    """
    Probability of executing exactly ``steps`` in ``theory``, 0 if they cannot be executed.

    A step on a law the theory does not have counts as nothing happening when its
    outcome is EMPTY (transformations drop laws whose only outcome is EMPTY).
    """
    state = State()
    applied: frozenset[int] = frozenset()
    probability = ONE
    for choice in steps:
        if not theory.has_law(choice.law_id):
            if choice.is_empty:
                continue
            return ZERO
        law = theory.law(choice.law_id)
        mass = law.mass_of(choice.outcome)
        if mass == 0 or not applicable(theory, law, state, applied):
            return ZERO
        probability *= mass
        state, applied = state.with_atom(choice.outcome), applied | {law.id}
    if applicable_laws(theory, state, applied):
        return ZERO
    return probability


# Order policies


class OrderPolicy(ABC):
    """Selects which applicable law a tree node expands."""

    name: str = "policy"

    @abstractmethod
    def select(self, candidates: Sequence[CPLaw], path: ChoicePath) -> CPLaw:
        """Pick one of ``candidates`` (non-empty, by increasing id) at the node reached by ``path``."""


@dataclass(frozen=True)
class CanonicalOrder(OrderPolicy):
    name: str = "canonical"

    def select(self, candidates: Sequence[CPLaw], path: ChoicePath) -> CPLaw:
        return candidates[0]


@dataclass(frozen=True)
class ReverseOrder(OrderPolicy):
    name: str = "reverse"

    def select(self, candidates: Sequence[CPLaw], path: ChoicePath) -> CPLaw:
        return candidates[-1]


@dataclass(frozen=True)
class RandomOrder(OrderPolicy):
    """Pseudo-random selection, a fixed function of the seed and the node's path."""

    seed: int = 0
    name: str = "random"

    def select(self, candidates: Sequence[CPLaw], path: ChoicePath) -> CPLaw:
        key = zlib.crc32(";".join(f"{c.law_id}>{c.outcome}" for c in path).encode())
        rng = np.random.default_rng([self.seed, key])
        return candidates[int(rng.integers(len(candidates)))]


@dataclass(frozen=True)
class StoryOrder(OrderPolicy):
    """Follows a branch's order on the branch and ``off_branch`` everywhere else."""

    branch: Branch
    off_branch: OrderPolicy = field(default_factory=CanonicalOrder)
    name: str = "story"

    def select(self, candidates: Sequence[CPLaw], path: ChoicePath) -> CPLaw:
        steps = self.branch.steps
        if len(path) < len(steps) and path == steps[: len(path)]:
            wanted = steps[len(path)].law_id
            for law in candidates:
                if law.id == wanted:
                    return law
        return self.off_branch.select(candidates, path)


def policy_from_name(name: str, seed: int = 0) -> OrderPolicy:
    if name == "canonical":
        return CanonicalOrder()
    if name == "reverse":
        return ReverseOrder()
    if name == "random":
        return RandomOrder(seed)
    raise ValueError(f"unknown order policy {name!r}")


# Trees


@dataclass
class TreeNode:
    """A node of a probability tree; ``children`` are (choice, edge probability, child)."""

    state: State
    applied: frozenset[int]
    applied_law: int | None = None
    children: list[tuple[Choice, Fraction, "TreeNode"]] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list["TreeNode"]:
        if self.is_leaf:
            return [self]
        return [leaf for _, _, child in self.children for leaf in child.leaves()]

    def size(self) -> int:
        return 1 + sum(child.size() for _, _, child in self.children)


def build_tree(theory: CPTheory, policy: OrderPolicy | None = None) -> TreeNode:
    """The probability tree of ``theory`` under ``policy`` (canonical by default)."""
    policy = policy if policy is not None else CanonicalOrder()
    root = _expand(theory, policy, State(), frozenset(), ())
    logger.debug("Built %s tree with %d nodes for %d laws", policy.name, root.size(), len(theory))
    return root


def _expand(
    theory: CPTheory, policy: OrderPolicy, state: State, applied: frozenset[int], path: ChoicePath
) -> TreeNode:
    node = TreeNode(state, applied)
    candidates = applicable_laws(theory, state, applied)
    if not candidates:
        _warn_if_undecided(theory, state, applied)
        return node
    law = policy.select(candidates, path)
    node.applied_law = law.id
    for outcome, mass in law.outcomes():
        choice = Choice(law.id, outcome)
        child = _expand(
            theory, policy, state.with_atom(outcome), applied | {law.id}, path + (choice,)
        )
        node.children.append((choice, mass, child))
    return node


def enumerate_branches(
    theory: CPTheory, policy: OrderPolicy | None = None
) -> list[tuple[Branch, Fraction]]:
    """Every branch of the tree with its probability, in tree order."""
    result: list[tuple[Branch, Fraction]] = []

    def walk(node: TreeNode, path: ChoicePath, probability: Fraction) -> None:
        if node.is_leaf:
            result.append((Branch(path, node.state), probability))
            return
        for choice, mass, child in node.children:
            walk(child, path + (choice,), probability * mass)

    walk(build_tree(theory, policy), (), ONE)
    return result


@lru_cache(maxsize=256)
def _leaf_masses(
    theory: CPTheory, policy: OrderPolicy
) -> tuple[tuple[frozenset[Atom], Fraction], ...]:
    masses: dict[frozenset[Atom], Fraction] = {}
    for branch, probability in enumerate_branches(theory, policy):
        masses[branch.leaf_true] = masses.get(branch.leaf_true, ZERO) + probability
    return tuple(masses.items())


def exact_distribution(theory: CPTheory, policy: OrderPolicy | None = None) -> Distribution:
    """Leaf-state probabilities, equal leaves merged."""
    policy = policy if policy is not None else CanonicalOrder()
    return Distribution({State(atoms): p for atoms, p in _leaf_masses(theory, policy)})


# Queries


def _check_atoms(theory: CPTheory, formula: Formula) -> None:
    unknown = formula.atoms() - theory.atoms
    if unknown:
        raise UnknownAtomError(f"unknown atom(s) {sorted(unknown)} in query {formula}")


def prob(theory: CPTheory, formula: Formula, policy: OrderPolicy | None = None) -> Fraction:
    """P_T(formula)."""
    _check_atoms(theory, formula)
    return exact_distribution(theory, policy).probability(formula)


def cond_prob(
    theory: CPTheory, formula: Formula, condition: Formula, policy: OrderPolicy | None = None
) -> Fraction:
    """
    P_T(formula | condition).

    Raises:
        ConditionImpossible: the condition has probability 0
    """
    _check_atoms(theory, formula)
    _check_atoms(theory, condition)
    distribution = exact_distribution(theory, policy)
    denominator = distribution.probability(condition)
    if denominator == 0:
        raise ConditionImpossible(f"condition {condition} has probability 0")
    both = sum(
        (
            p
            for state, p in distribution.entries.items()
            if formula.evaluate(state.true_atoms) and condition.evaluate(state.true_atoms)
        ),
        ZERO,
    )
    return both / denominator


# Sampling


def _walk(node: TreeNode, rng: np.random.Generator) -> tuple[ChoicePath, TreeNode]:
    path: list[Choice] = []
    while not node.is_leaf:
        weights = np.array([float(mass) for _, mass, _ in node.children])
        index = int(rng.choice(len(node.children), p=weights / weights.sum()))
        choice, _, node = node.children[index]
        path.append(choice)
    return tuple(path), node


def sample_story(theory: CPTheory, seed: int = 0) -> Branch:
    """One canonical-order story drawn with the law probabilities; fixed by ``seed``."""
    rng = np.random.default_rng(seed)
    path, leaf = _walk(build_tree(theory), rng)
    return Branch(path, leaf.state)


def sample_leaves(theory: CPTheory, n: int, seed: int = 0) -> Counter[State]:
    """Leaf counts of ``n`` sampled stories (the tree is built once)."""
    rng = np.random.default_rng(seed)
    root = build_tree(theory)
    counts: Counter[State] = Counter()
    for _ in range(n):
        _, leaf = _walk(root, rng)
        counts[leaf.state] += 1
    logger.debug("Sampled %d stories over %d distinct leaves", n, len(counts))
    return counts


def total_variation(distribution: Distribution, counts: Counter[State]) -> float:
    """Total-variation distance between an exact distribution and empirical counts."""
    states = sorted(set(distribution.entries) | set(counts), key=str)
    total = sum(counts.values())
    exact = np.array([float(distribution.get(state)) for state in states])
    empirical = np.array([counts.get(state, 0) / total for state in states])
    return float(0.5 * np.abs(exact - empirical).sum())
