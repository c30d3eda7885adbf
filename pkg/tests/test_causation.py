"""
Tests for the graded definitions of actual causation.

Tests the working, hh, intermediate and final definitions on the bundled
vignettes, cause ranking, and the hh / intermediate equivalence check.
"""

from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cpcause.bridge import StructuralModel, story_for_context, translate, world_for_context
from cpcause.causation import (
    cause_final,
    cause_hh,
    cause_intermediate,
    cause_working,
    check_theorem2,
    judge,
    rank_causes,
)
from cpcause.checks import random_context, random_model, random_theory
from cpcause.engine import sample_story
from cpcause.errors import CEnotInLeaf, MultipleLawsForC, StrictNormForbidden
from cpcause.models import DefinitionKind, Disjunct
from cpcause.parser import parse_story, parse_theory

NINE_TENTHS = Fraction(9, 10)
HALF = Fraction(1, 2)


class TestPens:
    """Test the professor and the assistant taking the last pens"""

    def test_final(self, pens):
        theory, story = pens
        verdict = cause_final(theory, story, "prof", "nopens")
        assert verdict.strength == Fraction(99, 100)
        assert verdict.factors == (Fraction(1), Fraction(99, 100))
        assert cause_final(theory, story, "assistant", "nopens").strength == Fraction(1, 5)

    def test_hh(self, pens):
        theory, story = pens
        assert cause_hh(theory, story, "prof", "nopens").strength == Fraction(99, 100)
        assert not cause_hh(theory, story, "assistant", "nopens").is_cause

    def test_working_ignores_norms(self, pens):
        theory, story = pens
        assert cause_working(theory, story, "prof", "nopens").strength == 1
        assert cause_working(theory, story, "assistant", "nopens").strength == 1

    def test_intermediate(self, pens):
        theory, story = pens
        assert cause_intermediate(theory, story, "prof", "nopens").strength == Fraction(99, 100)
        assert cause_intermediate(theory, story, "assistant", "nopens").strength == 0

    def test_effect_must_hold(self, pens):
        theory, story = pens
        with pytest.raises(CEnotInLeaf):
            judge(theory, story, "coffee", "nopens", "final")


class TestExample5:
    """Test c as a cause of e when ~a would have produced e anyway"""

    def test_hh_rejects(self, ex5):
        theory, story = ex5
        assert cause_hh(theory, story, "c", "e").strength == 0

    def test_graded_definitions_accept(self, ex5):
        theory, story = ex5
        assert cause_intermediate(theory, story, "c", "e").strength == NINE_TENTHS
        assert cause_final(theory, story, "c", "e").strength == NINE_TENTHS

    def test_theorem2_hypothesis_fails(self, ex5):
        theory, story = ex5
        report = check_theorem2(theory, story, "c", "e")
        assert not report.hypothesis
        assert report.lhs == 0
        assert report.rhs == NINE_TENTHS
        assert not report.violated


class TestDice:
    """Test the dice contest"""

    def test_final(self, dice):
        theory, story = dice
        verdict = cause_final(theory, story, "throw(1,1)", "wincar")
        assert verdict.strength == NINE_TENTHS * (1 - NINE_TENTHS**99)

    def test_intermediate_counterfactual_vanishes(self, dice):
        """Test unapplied throws are normalized away, so ~throw(1,1) still wins"""
        theory, story = dice
        verdict = cause_intermediate(theory, story, "throw(1,1)", "wincar")
        assert verdict.factors[0] == 0
        assert not verdict.is_cause

    def test_likely_first_throw(self, dice6):
        theory, story = dice6
        verdict = cause_final(theory, story, "throw(1,6)", "wincar")
        assert verdict.strength == Fraction(2, 5) * (1 - NINE_TENTHS**99)
        intermediate = cause_intermediate(theory, story, "throw(1,6)", "wincar")
        assert intermediate.factors[1] == 0


class TestEmptyIntrinsicChoice:
    """Test a story whose first law is intrinsic and chose nothing"""

    @pytest.fixture
    def empty_first(self):
        theory = parse_theory("a:0.5 <- .\nc:0.5 <- .\ne <- c.")
        return theory, parse_story("apply 0 -> _\napply 1 -> c\napply 2 -> e\n", theory)

    def test_working_and_final(self, empty_first):
        theory, story = empty_first
        assert cause_working(theory, story, "c", "e").strength == 1
        assert cause_final(theory, story, "c", "e").strength == HALF

    def test_hh(self, empty_first):
        theory, story = empty_first
        assert cause_hh(theory, story, "c", "e").strength == HALF

    def test_intermediate(self, empty_first):
        theory, story = empty_first
        verdict = cause_intermediate(theory, story, "c", "e")
        assert verdict.factors == (1, HALF)
        assert verdict.strength == HALF

    def test_theorem2(self, empty_first):
        theory, story = empty_first
        report = check_theorem2(theory, story, "c", "e")
        assert report.hypothesis
        assert report.equal
        assert report.lhs == HALF


def do_not(model, world_context, cause):
    """The world of a context with ``cause`` forced false"""
    true = set(world_context) - {cause}
    for variable in model.evaluation_order:
        if variable.name != cause and variable.formula.evaluate(frozenset(true)):
            true.add(variable.name)
    return frozenset(true)


def working_by_worlds(model, context, cause, effect):
    """Counterfactual dependence after fixing the intrinsic innate variables, by enumeration"""
    actual = world_for_context(model, context)
    contexts = list(model.all_contexts())
    names = [v.name for v in model.innate]
    fixed = set()
    for index, name in enumerate(names):
        prefix = frozenset(names[:index])
        siblings = [
            u
            for u in contexts
            if u & prefix == context & prefix and (name in u) != (name in context)
        ]
        if not any({cause, effect} <= world_for_context(model, u) <= actual for u in siblings):
            fixed.add(name)
    return any(
        effect not in do_not(model, u, cause) for u in contexts if u & fixed == context & fixed
    )


class TestAgainstWorldEnumeration:
    """Test the working definition on translated models against brute-force enumeration"""

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_working_definition(self, seed):
        rng = np.random.default_rng(seed)
        model = random_model(rng)
        model = StructuralModel(
            tuple(replace(v, norm_prob=None) for v in model.innate), model.derived
        )
        context = random_context(rng, model)
        world = sorted(world_for_context(model, context))
        assume(len(world) >= 2)
        first, second = rng.choice(len(world), size=2, replace=False).tolist()
        cause, effect = world[first], world[second]
        verdict = cause_working(translate(model), story_for_context(model, context), cause, effect)
        assert verdict.is_cause == working_by_worlds(model, context, cause, effect)


def lower_norm(law, atom):
    head = tuple(
        replace(d, norm_prob=d.normative_mass / 2) if d.atom == atom else d for d in law.head
    )
    return replace(law, head=head)


class TestFinalMonotonicity:
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_lowering_the_norm_of_the_cause(self, seed):
        """Test a less normal C is never a weaker cause"""
        rng = np.random.default_rng(seed)
        theory = random_theory(rng, norms=True)
        story = sample_story(theory, seed)
        true = sorted(story.leaf_true)
        assume(len(true) >= 2)
        first, second = rng.choice(len(true), size=2, replace=False).tolist()
        cause, effect = true[first], true[second]
        lowered = theory.with_laws(lower_norm(law, cause) for law in theory.laws)
        before = cause_final(theory, story, cause, effect)
        after = cause_final(lowered, story, cause, effect)
        assert after.factors[0] == before.factors[0]
        assert after.strength >= before.strength

    def test_pens(self, pens):
        theory, story = pens
        strengths = []
        for norm in ("0.9", "0.5", "0.2", "0.01", "0"):
            prof = Disjunct("prof", Fraction(7, 10), Fraction(norm))
            normed = theory.replace_law(replace(theory.law(0), head=(prof,)))
            strengths.append(cause_final(normed, story, "prof", "nopens").strength)
        assert strengths == sorted(strengths)
        assert strengths[-1] == 1


class TestNorms:
    def test_strict_norm_forbidden_for_hh(self):
        theory = parse_theory("a:0.5 {1} <- .\nb <- a.")
        story = parse_story("apply 0 -> a\napply 1 -> b\n", theory)
        with pytest.raises(StrictNormForbidden):
            cause_hh(theory, story, "a", "b")
        assert judge(theory, story, "a", "b", DefinitionKind.FINAL).strength == 0

    def test_hh_needs_a_unique_law_for_the_cause(self):
        theory = parse_theory("x:0.5 <- .\nx:0.5 <- .\ny <- x.")
        story = parse_story("apply 0 -> x\napply 1 -> x\napply 2 -> y\n", theory)
        with pytest.raises(MultipleLawsForC):
            cause_hh(theory, story, "x", "y")


class TestRanking:
    """Test ranking every true atom as a candidate cause"""

    def test_pens_final(self, pens):
        theory, story = pens
        ranked = rank_causes(theory, story, "nopens", "final")
        assert [v.cause for v in ranked] == ["prof", "assistant"]
        assert [v.strength for v in ranked] == [Fraction(99, 100), Fraction(1, 5)]

    def test_pens_hh(self, pens):
        theory, story = pens
        ranked = rank_causes(theory, story, "nopens", DefinitionKind.HH)
        assert [(v.cause, v.is_cause) for v in ranked] == [("prof", True), ("assistant", False)]

    def test_failed_candidates_come_last(self):
        theory = parse_theory("x:0.5 <- .\nx:0.5 <- .\ny <- x.")
        story = parse_story("apply 0 -> x\napply 1 -> x\napply 2 -> y\n", theory)
        (verdict,) = rank_causes(theory, story, "y", "hh")
        assert verdict.strength == 0
        assert verdict.error.startswith("MultipleLawsForC")
        assert verdict.to_dict()["diagnostics"] == [verdict.error]

    def test_effect_must_hold(self, pens):
        theory, _ = pens
        story = parse_story("apply 0 -> prof\napply 1 -> _\n", theory)
        with pytest.raises(CEnotInLeaf):
            rank_causes(theory, story, "nopens", "final")


class TestTheorem2:
    def test_pens_satisfies_hypothesis(self, pens):
        theory, story = pens
        report = check_theorem2(theory, story, "prof", "nopens")
        assert report.hypothesis
        assert report.equal
        assert report.lhs == Fraction(99, 100)
        assert report.to_dict()["lhs"] == "99/100"
