"""Exception hierarchy shared by the package."""


class TangentFlowError(Exception):
    """Base class for every error raised by tangentflow."""


class DimensionError(TangentFlowError, ValueError):
    """Operands live in different numbers of variables."""


class TruncationError(TangentFlowError, ValueError):
    """A coefficient beyond the known truncation degree was requested."""


class SubstitutionError(TangentFlowError, ValueError):
    """A substituted component has a constant term."""


class NotInDomainError(TangentFlowError, ValueError):
    """The input lies outside the domain of the requested map."""


class NotTangentError(NotInDomainError):
    """The diffeomorphism is not tangent to the identity to the needed order."""


class SingularScalingError(TangentFlowError, ValueError):
    """Conjugation by the zero scaling was requested."""


class InsufficientDataError(TangentFlowError, ValueError):
    """Too few nonzero degrees to fit a growth model."""


class InconclusiveSupError(TangentFlowError, RuntimeError):
    """A supremum scan hit its hard cap before the objective started decreasing."""


class DocumentError(TangentFlowError, ValueError):
    """A series document could not be parsed or violates an invariant."""
