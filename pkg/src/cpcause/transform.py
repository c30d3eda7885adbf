"""
Syntactic transformations of CP-theories.

All transformations keep the ids of the laws they start from, so a story of the
input theory still names the right laws in the output. Laws whose head becomes
empty are dropped.
"""

import logging
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .engine import (
    CanonicalOrder,
    OrderPolicy,
    ReverseOrder,
    StoryOrder,
    TreeNode,
    build_tree,
    replay,
)
from .errors import (
    BranchExcludedByNorms,
    CEnotInLeaf,
    InvalidBranch,
    MultipleLawsForC,
    NoLawForC,
    NormExclusionWarning,
    StoryError,
)
from .models import EMPTY, ONE, Atom, Branch, CPLaw, CPTheory, Disjunct

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def validate_branch(theory: CPTheory, b: Branch, allow_dropped: bool = False) -> None:
    """
    With ``allow_dropped``, a step on a law ``theory`` no longer has counts as
    nothing happening when its outcome is EMPTY, so a story of T still checks
    against T* and T**.

    Raises:
        InvalidBranch: ``b`` cannot be replayed in ``theory`` or ends in another leaf
    """
    steps = b.steps
    if allow_dropped:
        steps = tuple(s for s in steps if theory.has_law(s.law_id) or not s.is_empty)
    try:
        replayed = replay(theory, steps)
    except StoryError as e:
        raise InvalidBranch(f"not a branch of this theory: {e.message}") from None
    if replayed.leaf != b.leaf:
        raise InvalidBranch(f"branch leaf {b.leaf} differs from its replay {replayed.leaf}")


def require_in_leaf(b: Branch, *atoms: Atom) -> None:
    missing = [atom for atom in atoms if atom not in b.leaf_true]
    if missing:
        raise CEnotInLeaf(f"{', '.join(missing)} not true in the leaf {b.leaf} of the story")


# Determinization and interventions


def _determinized(law: CPLaw, outcome: Atom) -> CPLaw | None:
    if outcome == EMPTY:
        return None
    return law.with_outcomes([(outcome, ONE)])


def _determinize(theory: CPTheory, b: Branch, only: frozenset[int] | None = None) -> CPTheory:
    laws = []
    for law in theory.laws:
        choice = b.choice_for(law.id)
        if choice is None or (only is not None and law.id not in only):
            laws.append(law)
            continue
        replacement = _determinized(law, choice.outcome)
        if replacement is not None:
            laws.append(replacement)
    return theory.with_laws(laws)


def determinize(theory: CPTheory, b: Branch) -> CPTheory:
    """T^b: every law applied in ``b`` keeps only the outcome it chose, with probability 1."""
    validate_branch(theory, b)
    return _determinize(theory, b)


def intervene_neg(theory: CPTheory, atom: Atom) -> CPTheory:
    """do(~C): C leaves every head; its mass goes to the empty disjunct."""
    laws = []
    for law in theory.laws:
        if atom in law.head_atoms:
            law = CPLaw(law.id, tuple(d for d in law.head if d.atom != atom), law.body)
        laws.append(law)
    return theory.with_laws(laws)


def intervene_pos(theory: CPTheory, atom: Atom) -> CPTheory:
    """do(C): adds the deterministic law ``C <- .`` after all others."""
    law = CPLaw(theory.next_law_id, (Disjunct(atom),))
    return CPTheory(theory.laws + (law,), theory.atoms | {atom})


def intervene(theory: CPTheory, atom: Atom, positive: bool) -> CPTheory:
    return intervene_pos(theory, atom) if positive else intervene_neg(theory, atom)


# Refinements


def nn_refine(theory: CPTheory) -> CPTheory:
    """T^NN: norms replace statistical probabilities; zero-mass disjuncts disappear."""
    laws = []
    for law in theory.laws:
        if law.has_norms:
            law = law.with_outcomes((d.atom, d.normative_mass) for d in law.head)
        laws.append(law)
    return theory.with_laws(laws)


def _keep_applied(law: CPLaw, outcome: Atom) -> CPLaw | None:
    """PN on an applied law: drop outcomes strictly less likely than the chosen one."""
    threshold = law.mass_of(outcome)
    outcomes = law.outcomes()
    kept = [(atom, mass) for atom, mass in outcomes if mass >= threshold]
    if len(kept) == len(outcomes):
        return law
    total = sum(mass for _, mass in kept)
    logger.debug(
        "PN removed %s from law %d",
        [atom for atom, mass in outcomes if mass < threshold],
        law.id,
    )
    if all(atom == EMPTY for atom, _ in kept):
        return None
    return law.with_outcomes((atom, mass / total) for atom, mass in kept)


def _keep_unapplied(law: CPLaw, leaf_true: frozenset[Atom]) -> CPLaw | None:
    """PN on an unapplied law: drop unlikely outcomes that contradict the leaf."""
    removed = [d for d in law.head if d.stat_prob < HALF and d.atom not in leaf_true]
    if not removed:
        return law
    removed_mass = sum(d.stat_prob for d in removed)
    logger.debug("PN removed %s from unapplied law %d", [d.atom for d in removed], law.id)
    if removed_mass == ONE or len(removed) == len(law.head):
        return None
    survivors = [d for d in law.head if d not in removed]
    return law.with_outcomes((d.atom, d.stat_prob / (ONE - removed_mass)) for d in survivors)


def _pn_refine(theory: CPTheory, b: Branch, strict: bool = False) -> CPTheory:
    laws = []
    for law in theory.laws:
        choice = b.choice_for(law.id)
        if choice is None:
            refined = _keep_unapplied(law, b.leaf_true)
        elif law.mass_of(choice.outcome) == 0:
            message = (
                f"law {law.id} ({law}) gives the story's choice {choice.outcome} probability 0"
            )
            if strict:
                raise BranchExcludedByNorms(message)
            warnings.warn(NormExclusionWarning(message), stacklevel=3)
            refined = law
        else:
            refined = _keep_applied(law, choice.outcome)
        if refined is not None:
            laws.append(refined)
        else:
            logger.debug("PN dropped law %d", law.id)
    for choice in b.steps:
        if not choice.is_empty and not theory.has_law(choice.law_id):
            message = f"the story's choice {choice} has no law left after refinement"
            if strict:
                raise BranchExcludedByNorms(message)
            warnings.warn(NormExclusionWarning(message), stacklevel=3)
    return theory.with_laws(laws)


def pn_refine(theory: CPTheory, b: Branch) -> CPTheory:
    """
    T^PN(b).

    Applied laws lose every outcome (the empty one included) strictly less likely
    than the outcome the story chose; unapplied laws lose outcomes below 1/2 whose
    atom is false in the story's leaf. Survivors are renormalized.
    """
    validate_branch(theory, b, allow_dropped=True)
    return _pn_refine(theory, b)


def normal_refine(theory: CPTheory, b: Branch, strict: bool = False) -> CPTheory:
    """
    T^Normal(b) = (T^NN)^PN(b), comparing post-NN probabilities.

    ``b`` may be a story of the theory ``theory`` was derived from: steps on laws
    dropped with an EMPTY outcome are skipped. A choice of ``b`` that the norms
    make impossible raises ``BranchExcludedByNorms`` when ``strict``, otherwise it
    warns and leaves that law unrefined.
    """
    validate_branch(theory, b, allow_dropped=True)
    return _pn_refine(nn_refine(theory), b, strict)


# Actual-causation theories


def _on_branch_siblings(root: TreeNode, b: Branch) -> list[tuple[int, list[TreeNode]]]:
    """For each step of ``b``: the applied law and the sibling subtrees of the on-branch child."""
    result = []
    node = root
    for step in b.steps:
        if node.applied_law != step.law_id:
            raise InvalidBranch(f"tree does not apply law {step.law_id} where the story does")
        siblings = [child for choice, _, child in node.children if choice != step]
        on_branch = [child for choice, _, child in node.children if choice == step]
        result.append((step.law_id, siblings))
        node = on_branch[0]
    return result


def _intrinsic(
    theory: CPTheory, b: Branch, cause: Atom, effect: Atom, off_branch: OrderPolicy
) -> frozenset[int]:
    root = build_tree(theory, StoryOrder(b, off_branch))
    target = frozenset({cause, effect})
    intrinsic = set()
    for law_id, siblings in _on_branch_siblings(root, b):
        if len(theory.law(law_id).outcomes()) < 2:
            continue
        witnessed = any(
            target <= leaf.state.true_atoms <= b.leaf_true
            for sibling in siblings
            for leaf in sibling.leaves()
        )
        if not witnessed:
            intrinsic.add(law_id)
        logger.debug("Law %d intrinsic: %s", law_id, not witnessed)
    return frozenset(intrinsic)


def intrinsic_laws(theory: CPTheory, b: Branch, cause: Atom, effect: Atom) -> frozenset[int]:
    """
    Int: non-deterministic laws applied in ``b`` such that no branch through a
    sibling of their on-branch child ends in a leaf d with {C, E} <= Leaf_d <= Leaf_b.

    The tree follows the story on the branch and canonical order elsewhere.
    """
    require_in_leaf(b, cause, effect)
    validate_branch(theory, b)
    return _intrinsic(theory, b, cause, effect, CanonicalOrder())


@dataclass(frozen=True)
class IntrinsicDiagnostic:
    """Int computed with two off-branch expansion orders."""

    canonical: frozenset[int]
    reversed: frozenset[int]

    @property
    def agrees(self) -> bool:
        return self.canonical == self.reversed


def intrinsic_order_diagnostic(
    theory: CPTheory, b: Branch, cause: Atom, effect: Atom
) -> IntrinsicDiagnostic:
    """Recompute Int with reversed off-branch order and report both results."""
    canonical = intrinsic_laws(theory, b, cause, effect)
    return IntrinsicDiagnostic(canonical, _intrinsic(theory, b, cause, effect, ReverseOrder()))


def t_star(theory: CPTheory, b: Branch, cause: Atom, effect: Atom) -> CPTheory:
    """T*: the intrinsic laws determinized to the story's choices, all else unchanged."""
    intrinsic = intrinsic_laws(theory, b, cause, effect)
    return _determinize(theory, b, only=intrinsic)


def law_for(theory: CPTheory, atom: Atom) -> CPLaw:
    """
    r(C): the unique law with ``atom`` in its head.

    Raises:
        NoLawForC, MultipleLawsForC
    """
    laws = theory.laws_with_head(atom)
    if not laws:
        raise NoLawForC(f"no law has {atom} in its head")
    if len(laws) > 1:
        ids = ", ".join(str(law.id) for law in laws)
        raise MultipleLawsForC(f"{atom} occurs in the heads of laws {ids}")
    return laws[0]


def t_star_star(theory: CPTheory, b: Branch, cause: Atom, effect: Atom) -> CPTheory:
    """T**: T* with r(C) replaced by its normal refinement."""
    rule = law_for(theory, cause)
    star = t_star(theory, b, cause, effect)
    normal = normal_refine(theory, b)
    if normal.has_law(rule.id):
        return star.replace_law(normal.law(rule.id))
    return star.with_laws(law for law in star.laws if law.id != rule.id)
