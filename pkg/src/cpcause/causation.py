"""
Graded actual causation over CP-theories and stories.

Four definitions are available (see ``DefinitionKind``). Each returns a
``CauseVerdict`` whose strength is an exact probability; C counts as a cause of
E exactly when the strength is positive.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .engine import exact_distribution
from .errors import CPCauseError, StrictNormForbidden
from .models import (
    ONE,
    ZERO,
    Atom,
    Branch,
    CauseVerdict,
    CPTheory,
    DefinitionKind,
    conjunction,
    negated,
)
from .transform import (
    intervene_neg,
    law_for,
    nn_refine,
    normal_refine,
    require_in_leaf,
    t_star,
    t_star_star,
    validate_branch,
)

logger = logging.getLogger(__name__)


def _counterfactual(theory: CPTheory, cause: Atom, effect: Atom) -> Fraction:
    """P_theory(~E | do(~C))."""
    return exact_distribution(intervene_neg(theory, cause)).probability(negated(effect))


def _prepare(theory: CPTheory, b: Branch, cause: Atom, effect: Atom) -> None:
    require_in_leaf(b, cause, effect)
    validate_branch(theory, b)


def cause_working(theory: CPTheory, b: Branch, cause: Atom, effect: Atom) -> CauseVerdict:
    """Strength P_{T*}(~E | do(~C))."""
    _prepare(theory, b, cause, effect)
    strength = _counterfactual(t_star(theory, b, cause, effect), cause, effect)
    return CauseVerdict(cause, effect, DefinitionKind.WORKING, strength)


def _check_open_norms(theory: CPTheory) -> None:
    for law in theory.laws:
        for disjunct in law.head:
            if disjunct.norm_prob is not None and not ZERO < disjunct.norm_prob < ONE:
                raise StrictNormForbidden(
                    f"norm {disjunct.norm_prob} on {disjunct.atom} in law {law.id} ({law}) "
                    "must lie strictly between 0 and 1 for the hh definition"
                )


def _hh_strength(theory: CPTheory, b: Branch, cause: Atom, effect: Atom) -> Fraction:
    """P(~E & ~C) in the normal refinement of T**, r(C) kept as T** has it."""
    rule = law_for(theory, cause)
    star_star = t_star_star(theory, b, cause, effect)
    refined = normal_refine(star_star, b)
    if star_star.has_law(rule.id):
        refined = refined.replace_law(star_star.law(rule.id))
    event = conjunction(negated(effect), negated(cause))
    return exact_distribution(refined).probability(event)


def cause_hh(theory: CPTheory, b: Branch, cause: Atom, effect: Atom) -> CauseVerdict:
    """
    Strength P(~E & ~C) in the normal refinement of T**.

    Raises:
        StrictNormForbidden: a norm is 0 or 1
        NoLawForC, MultipleLawsForC: C is not in exactly one head
    """
    _check_open_norms(theory)
    _prepare(theory, b, cause, effect)
    strength = _hh_strength(theory, b, cause, effect)
    return CauseVerdict(cause, effect, DefinitionKind.HH, strength)


def _intermediate_factors(
    theory: CPTheory, b: Branch, cause: Atom, effect: Atom
) -> tuple[Fraction, Fraction]:
    star = t_star(theory, b, cause, effect)
    counterfactual = _counterfactual(normal_refine(star, b), cause, effect)
    abnormality = exact_distribution(normal_refine(theory, b)).probability(negated(cause))
    return counterfactual, abnormality


def cause_intermediate(theory: CPTheory, b: Branch, cause: Atom, effect: Atom) -> CauseVerdict:
    """Strength P_{Normal(T*)}(~E | do(~C)) * P_{Normal(T)}(~C)."""
    _prepare(theory, b, cause, effect)
    factors = _intermediate_factors(theory, b, cause, effect)
    return CauseVerdict(
        cause, effect, DefinitionKind.INTERMEDIATE, factors[0] * factors[1], factors
    )


def cause_final(theory: CPTheory, b: Branch, cause: Atom, effect: Atom) -> CauseVerdict:
    """Strength P_{NN(T*)}(~E | do(~C)) * P_{NN(T)}(~C); strict norms are allowed."""
    _prepare(theory, b, cause, effect)
    star = t_star(theory, b, cause, effect)
    counterfactual = _counterfactual(nn_refine(star), cause, effect)
    abnormality = exact_distribution(nn_refine(theory)).probability(negated(cause))
    return CauseVerdict(
        cause,
        effect,
        DefinitionKind.FINAL,
        counterfactual * abnormality,
        (counterfactual, abnormality),
    )


DEFINITIONS: dict[DefinitionKind, Callable[[CPTheory, Branch, Atom, Atom], CauseVerdict]] = {
    DefinitionKind.WORKING: cause_working,
    DefinitionKind.HH: cause_hh,
    DefinitionKind.INTERMEDIATE: cause_intermediate,
    DefinitionKind.FINAL: cause_final,
}


def judge(
    theory: CPTheory, b: Branch, cause: Atom, effect: Atom, kind: DefinitionKind | str
) -> CauseVerdict:
    """Dispatch to the definition named by ``kind``."""
    return DEFINITIONS[DefinitionKind(kind)](theory, b, cause, effect)


def rank_causes(
    theory: CPTheory, b: Branch, effect: Atom, kind: DefinitionKind | str
) -> list[CauseVerdict]:
    """
    Verdicts for every atom true in the leaf other than ``effect``, strongest first.

    A candidate whose judgement fails is reported with strength 0 and the error,
    after all candidates that could be judged.
    """
    kind = DefinitionKind(kind)
    require_in_leaf(b, effect)
    verdicts = []
    for cause in sorted(b.leaf_true - {effect}):
        try:
            verdicts.append(judge(theory, b, cause, effect, kind))
        except CPCauseError as e:
            logger.debug("Cannot judge %s as cause of %s: %s", cause, effect, e)
            verdicts.append(
                CauseVerdict(cause, effect, kind, ZERO, error=f"{type(e).__name__}: {e}")
            )
    return sorted(verdicts, key=lambda v: (v.error is not None, -v.strength, v.cause))


@dataclass(frozen=True)
class Theorem2Report:
    """Both sides of the hh / intermediate equivalence on one instance."""

    cause: Atom
    effect: Atom
    hypothesis: bool
    lhs: Fraction
    rhs: Fraction

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    @property
    def violated(self) -> bool:
        return self.hypothesis and not self.equal

    def to_dict(self) -> dict[str, Any]:
        return {
            "cause": self.cause,
            "effect": self.effect,
            "hypothesis": self.hypothesis,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "equal": self.equal,
        }


def check_theorem2(theory: CPTheory, b: Branch, cause: Atom, effect: Atom) -> Theorem2Report:
    """
    Compare P(~E & ~C) over the normal refinement of T** with the intermediate product.

    The hypothesis: r(C) is non-deterministic, or P_{Normal(T)}(~C) = 0.
    """
    _prepare(theory, b, cause, effect)
    rule = law_for(theory, cause)
    lhs = _hh_strength(theory, b, cause, effect)
    counterfactual, abnormality = _intermediate_factors(theory, b, cause, effect)
    hypothesis = not rule.is_deterministic or abnormality == 0
    return Theorem2Report(cause, effect, hypothesis, lhs, counterfactual * abnormality)

