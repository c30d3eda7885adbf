"""
Tests for structural models and their CP-logic translation.

Tests evaluation, normality, translation, hh-actual causation with witnesses,
and the executable agreement checks between both formalisms.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpcause.bridge import (
    DerivedVariable,
    InnateVariable,
    NormalityVerdict,
    StructuralModel,
    TypicalityMode,
    at_least_as_normal,
    best_witness,
    check_lemma2,
    check_theorem1,
    format_world,
    hh_actual_cause,
    lawful_worlds,
    normality_compare,
    story_for_context,
    translate,
    witnesses,
    world_for_context,
)
from cpcause.checks import random_context, random_model
from cpcause.engine import exact_distribution
from cpcause.errors import (
    AmbiguousTypicality,
    CEnotInWorld,
    CyclicModelError,
    UnknownVariableError,
)
from cpcause.models import State, Var
from cpcause.parser import parse_model, parse_theory

ACTUAL = frozenset({"prof", "assistant"})


class TestStructuralModel:
    def test_world_for_context(self, pen_model):
        assert world_for_context(pen_model, ACTUAL) == {"prof", "assistant", "nopens"}
        assert world_for_context(pen_model, frozenset({"prof"})) == {"prof"}

    def test_lawful_worlds(self, pen_model):
        assert len(lawful_worlds(pen_model)) == 4

    def test_context_must_be_innate(self, pen_model):
        with pytest.raises(UnknownVariableError):
            world_for_context(pen_model, frozenset({"nopens"}))

    def test_cyclic_equations(self):
        with pytest.raises(CyclicModelError):
            StructuralModel(
                (InnateVariable("u", Fraction(3, 10)),),
                (DerivedVariable("x", Var("y")), DerivedVariable("y", Var("x"))),
            )

    def test_format_world(self, pen_model):
        assert format_world(pen_model, frozenset({"assistant"})) == "{~prof, assistant, ~nopens}"


class TestNormality:
    """Test the variable-by-variable normality preorder"""

    def test_norm_decides_in_normative_mode(self, pen_model):
        actual = world_for_context(pen_model, ACTUAL)
        verdict = normality_compare(pen_model, frozenset({"assistant"}), actual)
        assert verdict == NormalityVerdict.MORE

    def test_statistics_decide_in_statistical_mode(self, pen_model):
        actual = world_for_context(pen_model, ACTUAL)
        verdict = normality_compare(
            pen_model, frozenset({"assistant"}), actual, TypicalityMode.STATISTICAL
        )
        assert verdict == NormalityVerdict.LESS

    def test_incomparable_and_equal(self, pen_model):
        actual = world_for_context(pen_model, ACTUAL)
        assert normality_compare(pen_model, frozenset(), actual) == NormalityVerdict.INCOMPARABLE
        assert normality_compare(pen_model, actual, actual) == NormalityVerdict.EQUAL

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_preorder_over_all_worlds(self, seed):
        """Test at-least-as-normal is reflexive and transitive over every assignment"""
        model = random_model(np.random.default_rng(seed), max_innate=3, max_derived=3)
        names = model.variables
        worlds = [
            frozenset(itertools.compress(names, bits))
            for bits in itertools.product((False, True), repeat=len(names))
        ]
        relation = np.array(
            [[at_least_as_normal(model, w1, w2) for w2 in worlds] for w1 in worlds]
        )
        assert relation.diagonal().all()
        composed = (relation.astype(int) @ relation.astype(int)) > 0
        assert not (composed & ~relation).any()
        for w in worlds:
            assert normality_compare(model, w, w) == NormalityVerdict.EQUAL

    def test_half_probability_is_ambiguous(self):
        model = parse_model("innate u : 0.5\n")
        with pytest.raises(AmbiguousTypicality):
            normality_compare(model, frozenset(), frozenset({"u"}))

    def test_half_norm_only_matters_in_normative_mode(self):
        model = parse_model("innate u : 0.7 {0.5}\n")
        with pytest.raises(AmbiguousTypicality):
            normality_compare(model, frozenset(), frozenset({"u"}))
        verdict = normality_compare(
            model, frozenset(), frozenset({"u"}), TypicalityMode.STATISTICAL
        )
        assert verdict == NormalityVerdict.LESS


class TestTranslation:
    """Test the translation of models into CP-theories"""

    def test_pen_model(self, pen_model, pens):
        theory, story = pens
        assert translate(pen_model) == theory
        assert story_for_context(pen_model, ACTUAL) == story

    def test_negated_equation(self):
        model = parse_model("innate x : 0.3\nderived y = ~x\n")
        assert translate(model) == parse_theory("x:0.3 <- .\ny <- ~x.")
        story = story_for_context(model, frozenset())
        assert story.leaf_true == {"y"}

    def test_story_leaf_is_the_world(self, pen_model, dice5_model):
        for model in (pen_model, dice5_model):
            for context in model.all_contexts():
                story = story_for_context(model, context)
                assert story.leaf_true == world_for_context(model, context)

    def test_world_probabilities(self):
        """Test each lawful world gets the product of its innate probabilities"""
        for seed in range(20):
            model = random_model(np.random.default_rng(seed))
            distribution = exact_distribution(translate(model))
            for context in model.all_contexts():
                expected = Fraction(1)
                for variable in model.innate:
                    p = variable.stat_prob
                    expected *= p if variable.name in context else 1 - p
                assert distribution.get(State(world_for_context(model, context))) == expected
            assert distribution.total == 1

    def test_dice5_translation_matches_corpus_story(self, dice5_model):
        theory = translate(dice5_model)
        story = story_for_context(dice5_model, dice5_model.contexts[0])
        assert story.leaf_true == {"lands_one(1)", "throw(1,1)", "wincar"}
        assert len(theory) == 11


class TestActualCausation:
    """Test hh-actual causation in the model"""

    def test_pens(self, pen_model):
        assert hh_actual_cause(pen_model, ACTUAL, "prof", "nopens")
        assert not hh_actual_cause(pen_model, ACTUAL, "assistant", "nopens")

    def test_witnesses(self, pen_model):
        (witness,) = witnesses(pen_model, ACTUAL, "prof", "nopens")
        assert witness.world == {"assistant"}
        assert witness.admissible
        assert witness.verdict == NormalityVerdict.MORE
        assert witness.probability == 1

    def test_cause_must_hold(self, pen_model):
        with pytest.raises(CEnotInWorld):
            witnesses(pen_model, frozenset({"assistant"}), "prof", "nopens")

    def test_pens_best_witness(self, pen_model):
        best = best_witness(pen_model, ACTUAL, "prof", "nopens")
        assert best.world == {"assistant"}
        assert best.probability == Fraction(3, 10)
        assert best.story_probability == Fraction(6, 25)
        assert best.to_dict(pen_model)["world"] == "{~prof, assistant, ~nopens}"

    def test_dice5(self, dice5_model):
        context = dice5_model.contexts[0]
        assert not hh_actual_cause(dice5_model, context, "throw(1,1)", "wincar")
        assert best_witness(dice5_model, context, "throw(1,1)", "wincar") is None

    def test_dice5_relaxed_witness(self, dice5_model):
        """Test the most normal losing world is the second throw landing one"""
        context = dice5_model.contexts[0]
        best = best_witness(dice5_model, context, "throw(1,1)", "wincar", relaxed=True)
        assert best.world == {"lands_one(2)", "throw(2,1)"}
        assert best.probability == Fraction(9, 100)


class TestAgreementChecks:
    """Test normality against executability, and hh in both formalisms"""

    def test_lemma2_on_pens(self, pen_model):
        report = check_lemma2(pen_model, ACTUAL)
        assert len(report.rows) == 4
        assert report.holds
        normal = {row.world for row in report.rows if row.executable}
        assert normal == {frozenset({"assistant"}), world_for_context(pen_model, ACTUAL)}

    def test_theorem1_on_pens(self, pen_model):
        for cause, expected in (("prof", True), ("assistant", False)):
            report = check_theorem1(pen_model, ACTUAL, cause, "nopens")
            assert report.agrees
            assert report.in_model is expected

    def test_theorem1_with_a_false_innate_variable(self):
        """Test a context that leaves an innate variable false"""
        model = parse_model("innate u : 0.3\ninnate w : 0.4\nderived x = u\n")
        report = check_theorem1(model, frozenset({"u"}), "u", "x")
        assert report.agrees
        assert report.in_model

    def test_theorem1_on_random_models(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            model = random_model(rng)
            context = random_context(rng, model)
            world = sorted(world_for_context(model, context))
            for cause, effect in itertools.permutations(world, 2):
                assert check_theorem1(model, context, cause, effect).agrees
