"""
cpcause - Exact inference and graded actual causation for CP-logic theories.

A CP-theory is a finite set of probabilistic causal laws, each optionally
annotated with norms. This package enumerates the theory's probability tree,
applies interventions and norm-driven refinements, and grades how strongly one
event actually caused another in a given story.

Example usage:
    from cpcause import cause_final, load_story, load_theory, prob, parse_formula
    from cpcause.api import corpus_path

    theory = load_theory(corpus_path("pens.cp"))
    story = load_story(corpus_path("pens.story"), theory)

    prob(theory, parse_formula("nopens"))                    # Fraction(14, 25)
    cause_final(theory, story, "prof", "nopens").strength    # Fraction(99, 100)

    # Structural models translate to theories
    from cpcause import load_model, translate

    model = load_model(corpus_path("pen.sm"))
    print(translate(model))
"""

__version__ = "0.3.0"

# Public API
from .api import corpus_path, judge_files, load_model, load_story, load_theory, rank_files
from .bridge import (
    StructuralModel,
    TypicalityMode,
    best_witness,
    check_lemma2,
    check_theorem1,
    hh_actual_cause,
    normality_compare,
    story_for_context,
    translate,
    witnesses,
)
from .causation import (
    cause_final,
    cause_hh,
    cause_intermediate,
    cause_working,
    check_theorem2,
    judge,
    rank_causes,
)
from .checks import run_sweep
from .config import Config, get_config, reset_config
from .engine import (
    build_tree,
    cond_prob,
    enumerate_branches,
    exact_distribution,
    prob,
    sample_leaves,
)
from .errors import CPCauseError, NonStratifiedWarning, NormExclusionWarning
from .models import (
    Branch,
    CauseVerdict,
    CPLaw,
    CPTheory,
    DefinitionKind,
    Distribution,
    State,
)
from .parser import parse_formula, parse_model, parse_story, parse_theory, serialize_theory
from .transform import (
    determinize,
    intervene,
    intervene_neg,
    intervene_pos,
    nn_refine,
    normal_refine,
    pn_refine,
    t_star,
    t_star_star,
)

__all__ = [
    # File-level API
    "load_theory",
    "load_story",
    "load_model",
    "judge_files",
    "rank_files",
    "corpus_path",
    # Parsing
    "parse_theory",
    "parse_story",
    "parse_model",
    "parse_formula",
    "serialize_theory",
    # Data types
    "CPLaw",
    "CPTheory",
    "State",
    "Branch",
    "Distribution",
    "DefinitionKind",
    "CauseVerdict",
    "StructuralModel",
    "TypicalityMode",
    # Inference
    "build_tree",
    "enumerate_branches",
    "exact_distribution",
    "prob",
    "cond_prob",
    "sample_leaves",
    # Transformations
    "determinize",
    "intervene",
    "intervene_neg",
    "intervene_pos",
    "pn_refine",
    "nn_refine",
    "normal_refine",
    "t_star",
    "t_star_star",
    # Causation
    "cause_working",
    "cause_hh",
    "cause_intermediate",
    "cause_final",
    "judge",
    "rank_causes",
    "check_theorem2",
    # Structural models
    "translate",
    "story_for_context",
    "normality_compare",
    "witnesses",
    "hh_actual_cause",
    "best_witness",
    "check_lemma2",
    "check_theorem1",
    # Property sweeps
    "run_sweep",
    # Configuration
    "Config",
    "get_config",
    "reset_config",
    # Errors
    "CPCauseError",
    "NonStratifiedWarning",
    "NormExclusionWarning",
]
