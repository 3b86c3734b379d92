"""Exception taxonomy shared by all heatlab modules.

The CLI maps these onto its exit-code contract: usage/configuration
problems exit 2, numerical failures exit 3 (verdict failures exit 1 but
are not exceptions).
"""


class HeatlabError(Exception):
    """Base class for all heatlab errors."""


class ArgumentError(HeatlabError, ValueError):
    """An argument violates a documented precondition (t <= 0, empty set, ...)."""


class DomainError(HeatlabError, ValueError):
    """A point lies outside the manifold domain, or a value outside a function's domain."""


class DegeneratePairError(ArgumentError):
    """An operation that needs x != y was called on a degenerate pair."""


class CutLocusError(ArgumentError):
    """A pair too close to the cut locus for an off-cut expansion to be valid."""


class UnsupportedConfigurationError(HeatlabError):
    """A geometrically valid request outside the catalog of shipped closed forms."""


class NumericalFailureError(HeatlabError, RuntimeError):
    """A numerical routine (eigensolve, quadrature) failed to converge."""


class StepSizeError(NumericalFailureError):
    """A finite-difference or SDE step is unstable or underflows."""


class PrecisionLossError(NumericalFailureError):
    """Propagated error bounds exceed the tolerance an operation needs."""


class StatisticsError(ArgumentError):
    """Too few samples for the requested statistical resolution."""
