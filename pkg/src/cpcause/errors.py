"""
Error and warning taxonomy for cpcause.

Every error is a ``ValueError`` subclass that knows the CLI exit code of its
category and, when it comes from a parsed file, where in the file it happened.
"""

from dataclasses import dataclass
from enum import IntEnum


class ExitCode(IntEnum):
    """CLI exit codes, one per error category."""

    OK = 0
    VALIDATION = 2
    STORY = 3
    CONDITION = 4
    CAUSATION = 5
    COUNTEREXAMPLE = 6


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of a construct in an input file."""

    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class CPCauseError(ValueError):
    """Base class of all cpcause errors."""

    exit_code: ExitCode = ExitCode.VALIDATION

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def with_span(self, span: SourceSpan | None) -> "CPCauseError":
        """Attach a span unless one is already present."""
        if self.span is None:
            self.span = span
        return self

    def __str__(self) -> str:
        if self.span is not None:
            return f"{self.span}: {self.message}"
        return self.message


# Parse / validation (exit 2)


class TheorySyntaxError(CPCauseError):
    """Input text does not follow the grammar."""


class ProbabilitySumError(CPCauseError):
    """A head's statistical or normative mass exceeds 1, or a probability is out of range."""


class DuplicateHeadAtom(CPCauseError):
    """The same atom occurs twice in one head."""


class UnknownAtomError(CPCauseError):
    """A query or intervention names an atom outside the theory's universe."""


class InputFileError(CPCauseError):
    """An input file is missing or unreadable."""


class ModelError(CPCauseError):
    """A structural model is malformed."""


class CyclicModelError(ModelError):
    """Derived variables depend on each other cyclically; ``cycle`` lists them in order."""

    def __init__(
        self, message: str, cycle: tuple[str, ...] = (), span: SourceSpan | None = None
    ):
        super().__init__(message, span)
        self.cycle = cycle


class UnknownVariableError(ModelError):
    """A structural-model equation or context names an undeclared variable."""


# Stories (exit 3)


class StoryError(CPCauseError):
    exit_code = ExitCode.STORY


class IllegalStep(StoryError):
    """A story step cannot be executed at the point where it occurs."""


class IncompleteStory(StoryError):
    """A story ends while some law is still applicable."""


class NoSuchBranch(StoryError):
    """No branch of the theory has the requested leaf."""


class AmbiguousBranch(StoryError):
    """Several choice-distinct branches share the requested leaf."""


class InvalidBranch(StoryError):
    """A branch is not a branch of the theory it is used with."""


# Queries (exit 4)


class ConditionImpossible(CPCauseError):
    """Conditioning on an event of probability zero."""

    exit_code = ExitCode.CONDITION


# Causation (exit 5)


class CausationError(CPCauseError):
    exit_code = ExitCode.CAUSATION


class CEnotInLeaf(CausationError):
    """Cause or effect is not true in the leaf of the story."""


class CEnotInWorld(CausationError):
    """Cause or effect is not true in the actual world of a structural model."""


class NoLawForC(CausationError):
    """No law has the candidate cause in its head."""


class MultipleLawsForC(CausationError):
    """More than one law has the candidate cause in its head."""


class StrictNormForbidden(CausationError):
    """A norm of 0 or 1 was given to a definition that requires norms inside (0, 1)."""


class BranchExcludedByNorms(CausationError):
    """Strict norms give a choice of the story probability zero."""


class AmbiguousTypicality(CausationError):
    """An innate variable's governing probability is exactly 1/2."""


# Warnings


class NonStratifiedWarning(UserWarning):
    """A leaf leaves some law neither applicable nor impossible."""


class NormExclusionWarning(UserWarning):
    """The normal refinement assigns a choice of the story probability zero."""
