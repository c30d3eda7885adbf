"""
Tests for the generated-instance sweeps.

Tests seeded generators, counterexample shrinking and small runs of every
sweep; the full default counts are marked slow.
"""

import numpy as np
import pytest

from cpcause.checks import (
    SWEEPS,
    Counterexample,
    SweepReport,
    random_context,
    random_model,
    random_theory,
    run_sweep,
    shrink_model,
    shrink_theory,
)
from cpcause.config import CheckConfig
from cpcause.engine import build_tree
from cpcause.parser import parse_model, parse_theory


class TestGenerators:
    """Test random theories and models"""

    def test_theories_are_seeded(self):
        first = random_theory(np.random.default_rng([3, 14]))
        second = random_theory(np.random.default_rng([3, 14]))
        assert first == second

    def test_theories_respect_bounds(self):
        for seed in range(50):
            theory = random_theory(np.random.default_rng(seed), max_laws=4, max_atoms=3)
            assert 1 <= len(theory) <= 4
            assert theory.atoms <= {"a0", "a1", "a2"}

    def test_theories_are_stratified(self, recwarn):
        for seed in range(50):
            build_tree(random_theory(np.random.default_rng(seed)))
        assert not recwarn.list

    def test_models_and_contexts(self):
        rng = np.random.default_rng(5)
        model = random_model(rng)
        context = random_context(rng, model)
        assert context <= model.innate_names
        assert random_model(np.random.default_rng(5)) == model


class TestShrinking:
    def test_shrink_theory(self):
        theory = parse_theory("a:0.5 <- .\nb:0.5 <- .\nc <- a, b.\nd <- c.")
        small = shrink_theory(theory, lambda t: len(t) >= 2)
        assert len(small) == 2
        assert small.law_ids == (0, 1)

    def test_shrink_model_keeps_named_variables(self):
        model = parse_model("innate u : 0.3\ninnate v : 0.6\ninnate w : 0.2\nderived x = u\n")
        small, context = shrink_model(
            model, frozenset({"u", "v"}), frozenset({"x"}), lambda m, c: True
        )
        assert small.variables == ("u", "x")
        assert context == {"u"}


class TestSweeps:
    """Test small runs of each sweep"""

    @pytest.mark.parametrize("name", sorted(SWEEPS))
    def test_small_runs_pass(self, name):
        report = run_sweep(name, seed=1, count=8)
        assert report.ok, [c.to_dict() for c in report.counterexamples]
        assert report.checked <= 8

    def test_statistical_mode_runs(self):
        report = run_sweep("lemma2", seed=2, count=5, config=CheckConfig(typicality_mode="statistical"))
        assert report.checked == 5

    def test_report_to_dict(self):
        report = SweepReport("order-invariance", 7, 3, checked=3)
        report.counterexamples.append(Counterexample("instance 1", "a <- ."))
        data = report.to_dict()
        assert data["ok"] is False
        assert data["counterexamples"] == [{"description": "instance 1", "reproducer": "a <- ."}]

    @pytest.mark.slow
    @pytest.mark.parametrize("name", sorted(SWEEPS))
    def test_default_counts(self, name):
        report = run_sweep(name)
        assert report.ok
