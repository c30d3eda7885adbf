"""
Public file-level API for cpcause.

This module exposes simple functions that can be imported and used as a library.

Example usage:
    from cpcause.api import corpus_path, judge_files, load_story, load_theory, rank_files

    # Option 1: One-shot judgement from files
    verdict = judge_files(
        corpus_path("pens.cp"), corpus_path("pens.story"),
        cause="prof", effect="nopens", definition="final",
    )
    print(verdict.strength)  # 99/100

    # Option 2: Load once, ask many questions
    theory = load_theory(corpus_path("dice.cp"))
    story = load_story(corpus_path("dice.story"), theory)
    ranking = rank_files(corpus_path("pens.cp"), corpus_path("pens.story"), effect="nopens")
"""

from importlib import resources
from pathlib import Path
from typing import Any

from .bridge import StructuralModel
from .causation import judge, rank_causes
from .errors import InputFileError
from .models import Branch, CauseVerdict, CPTheory, DefinitionKind
from .parser import parse_model, parse_story, parse_theory
from .utils import validate_input_file


def read_input(path: str | Path) -> str:
    """
    Read an input file as UTF-8 text.

    Raises:
        InputFileError: the file does not exist or cannot be read
    """
    path = Path(path)
    if not validate_input_file(path):
        raise InputFileError(f"input file not found: {path}")
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InputFileError(f"cannot read {path}: {e}") from None


def load_theory(path: str | Path) -> CPTheory:
    """Parse a theory file."""
    return parse_theory(read_input(path), source=str(path))


def load_story(path: str | Path, theory: CPTheory) -> Branch:
    """Parse a story file and replay it against ``theory``."""
    return parse_story(read_input(path), theory, source=str(path))


def load_model(path: str | Path) -> StructuralModel:
    """Parse a structural-model file."""
    return parse_model(read_input(path), source=str(path))


def corpus_path(name: str) -> Path:
    """Path of a bundled corpus file (``pens.cp``, ``dice.story``, ``pen.sm``, ...)."""
    path = Path(str(resources.files("cpcause") / "corpus" / name))
    if not path.exists():
        raise InputFileError(f"no corpus file named {name}")
    return path


def corpus_files() -> list[str]:
    """Names of all bundled corpus files."""
    directory = Path(str(resources.files("cpcause") / "corpus"))
    return sorted(p.name for p in directory.iterdir() if p.is_file())


def judge_files(
    theory_path: str | Path,
    story_path: str | Path,
    cause: str,
    effect: str,
    definition: DefinitionKind | str = DefinitionKind.FINAL,
) -> CauseVerdict:
    """Judge whether ``cause`` actually caused ``effect`` in the story of a theory file."""
    theory = load_theory(theory_path)
    story = load_story(story_path, theory)
    return judge(theory, story, cause, effect, definition)


def rank_files(
    theory_path: str | Path,
    story_path: str | Path,
    effect: str,
    definition: DefinitionKind | str = DefinitionKind.FINAL,
) -> list[CauseVerdict]:
    """Rank every atom of the story's leaf as a cause of ``effect``."""
    theory = load_theory(theory_path)
    story = load_story(story_path, theory)
    return rank_causes(theory, story, effect, definition)


def rank_files_dict(
    theory_path: str | Path,
    story_path: str | Path,
    effect: str,
    definition: DefinitionKind | str = DefinitionKind.FINAL,
) -> list[dict[str, Any]]:
    """Like ``rank_files`` but returns dictionaries (for JSON serialization)."""
    return [v.to_dict() for v in rank_files(theory_path, story_path, effect, definition)]
