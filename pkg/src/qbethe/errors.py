"""Exception hierarchy shared by all engine modules."""


class QbetheError(Exception):
    """Base class for all engine errors."""


class DivisionByZero(QbetheError):
    """Division by a zero scalar or rational function."""


class ContextMismatch(QbetheError):
    """Operands declare incompatible spectral-variable contexts."""


class PoleAtSample(QbetheError):
    """A denominator vanished at a numeric sample point."""


class SampleExhaustion(QbetheError):
    """Bounded resampling failed to find a pole-free sample point."""


class ArityMismatch(QbetheError):
    """Argument tuples of unequal length where equal length is required."""


class SizeCap(QbetheError):
    """Requested size exceeds a configured cap (factorial growth guard)."""


class DegenerateNodes(QbetheError):
    """Interpolation nodes coincide symbolically."""


class AmbiguousExpansion(QbetheError):
    """A Laurent expansion is not well defined in the requested zone."""


class ModuleCertificationFailed(QbetheError):
    """A candidate evaluation module failed the defining-relation suite."""


class UnsupportedRoot(QbetheError):
    """Operation requested for a root the module does not carry."""


class BadModule(QbetheError):
    """Module lacks structure required by the operation."""


class IncompleteFamily(QbetheError):
    """A required member of a weight-function family is missing."""


class Indeterminate(QbetheError):
    """A ratio of two zero vectors has no defined value."""


class ConventionRejected(QbetheError):
    """A six-vertex weight dictionary failed the Yang-Baxter check."""


class UsageError(QbetheError):
    """Invalid command-line or configuration input."""
