"""Domain error hierarchy.

Every failure mode that a caller can trigger with bad inputs raises a
subclass of DomainError carrying a stable machine-readable ``code``.
The CLI maps these to exit status 1 with a JSON payload on stderr;
library callers can catch either the base class or a specific subclass.
"""

from __future__ import annotations

__all__ = [
    "DomainError",
    "NegativeMass",
    "SumOutOfTolerance",
    "EmptyRange",
    "DuplicateOutcome",
    "DimensionMismatch",
    "NonFiniteParameter",
    "RangeMismatch",
    "NonSurjectiveProjection",
    "NonPositiveAlpha",
    "NegativeAlphaOnZeroMass",
    "SpaceTooLarge",
    "EmptyIntersectionSupport",
    "OracleSupportEscapesModel",
    "NonFiniteEncountered",
    "NonFiniteLogits",
    "LabelOutOfRange",
]


class DomainError(ValueError):
    """Base class for all input-domain errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class NegativeMass(DomainError):
    """A probability entry is negative."""


class SumOutOfTolerance(DomainError):
    """Probabilities do not sum to 1 within the construction tolerance."""


class EmptyRange(DomainError):
    """An outcome range must contain at least one outcome."""


class DuplicateOutcome(DomainError):
    """Outcome labels within a range must be pairwise distinct."""


class DimensionMismatch(DomainError):
    """Vector length does not match the expected dimension."""


class NonFiniteParameter(DomainError):
    """Parameter vector contains NaN or infinity."""


class RangeMismatch(DomainError):
    """Two objects that must share an outcome range do not."""


class NonSurjectiveProjection(DomainError):
    """A refinement projection must cover every coarse outcome."""


class NonPositiveAlpha(DomainError):
    """This operation requires alpha > 0."""


class NegativeAlphaOnZeroMass(DomainError):
    """Negative alpha requires a fully supported distribution."""


class SpaceTooLarge(DomainError):
    """Exhaustive enumeration is capped to keep runtime bounded."""


class EmptyIntersectionSupport(DomainError):
    """Model, oracle, and prior share no supported outcome."""


class OracleSupportEscapesModel(DomainError):
    """The subset assumption requires supp(oracle) within supp(model)."""


class NonFiniteEncountered(DomainError):
    """A value or gradient became NaN or infinite where the contract requires a finite result."""


class NonFiniteLogits(DomainError):
    """Logit array contains NaN or infinity."""


class LabelOutOfRange(DomainError):
    """A class label falls outside [0, num_classes)."""
