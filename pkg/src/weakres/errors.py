"""Exception hierarchy shared across the package."""

from __future__ import annotations


class WeakresError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(WeakresError):
    """Syntax or grammar violation in a textual input.

    Carries the 1-based line and column of the offending token when known.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, col {column}: {message}"
        super().__init__(message)


class EvaluationError(WeakresError):
    """A formula cannot be evaluated on the given signal."""


class HorizonError(EvaluationError):
    """The signal is too short for the formula's temporal horizon."""


class UnknownVariableError(EvaluationError):
    """A formula or expression references a variable the signal lacks."""


class ModelError(WeakresError):
    """An environment model is malformed or internally inconsistent."""


class InstantiationError(WeakresError):
    """A weakening instantiation request is invalid."""


class ThetaBoundsError(InstantiationError):
    """The supplied parameter vector has the wrong arity or exceeds bounds."""


class EmptyIntervalError(InstantiationError):
    """An interval adjustment produced an empty temporal window."""


class EncodingError(WeakresError):
    """A formula or model cannot be lowered to mixed-integer constraints."""


class SolverError(WeakresError):
    """The optimization backend failed."""


class SolverNumericError(SolverError):
    """Numerical breakdown (singular basis, cycling guard) distinct from infeasibility."""


class FeatureSpecError(WeakresError):
    """A feature specification file is malformed."""


class ScenarioError(WeakresError):
    """A scenario configuration is malformed or out of range."""
