"""Exception hierarchy shared by every module of the package."""


class CVEntangleError(Exception):
    """Base class for all package errors."""


class AxisError(CVEntangleError, ValueError):
    """Incompatible, asymmetric or otherwise unusable grid axes."""


class MassError(CVEntangleError, ValueError):
    """A density has zero, negative or non-finite total mass."""


class ProbError(CVEntangleError, ValueError):
    """Input is not a valid probability vector or normalized density."""


class ParamError(CVEntangleError, ValueError):
    """Invalid physical parameter (width, squeezing, eta, ...)."""


class WeightError(ParamError):
    """Mixture weights are negative or do not sum to one."""


class AliasError(CVEntangleError, ValueError):
    """Momentum-space amplitude does not decay inside the conjugate grid."""


class SchemaError(CVEntangleError, ValueError):
    """Malformed state-descriptor document."""


class DomainError(CVEntangleError, ValueError):
    """Momentum outside the open interval (-p0, p0) of the GUP map."""


class GupDomainError(DomainError):
    """Momentum tail mass beyond the GUP cutoff exceeds the tolerance."""


class KindError(CVEntangleError, ValueError):
    """Criterion kind does not apply to the given state (pure vs mixed)."""
