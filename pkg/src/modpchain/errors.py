"""Exception hierarchy shared by every module."""


class ChainError(Exception):
    """Base class for user-facing errors (CLI exit code 2)."""


class DegenerateSegment(ChainError):
    pass


class DimensionMismatch(ChainError):
    pass


class ComplexMismatch(ChainError):
    pass


class NotInBoundarySupport(ChainError):
    pass


class MalformedChain(ChainError):
    pass


class CoefficientOutOfRange(ChainError):
    pass


class ApexCollision(ChainError):
    pass


class ParamOutOfRange(ChainError):
    pass


class InstanceTooLarge(ChainError):
    """Oracle guardrail tripped; pass ``force=True`` to override."""


class SchemaError(ChainError):
    pass


class InternalError(AssertionError):
    """A proven invariant failed at runtime (CLI exit code 3)."""
