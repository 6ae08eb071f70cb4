"""Exception types raised across the package."""


class QuasirepError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(QuasirepError, ValueError):
    """Operands have incompatible shapes or dimensions."""


class SingularFrameError(QuasirepError, ValueError):
    """A frame does not span the operator space, so no canonical dual exists."""


class NonFaithfulBasesError(QuasirepError, ValueError):
    """Some basis overlap vanishes, so the Kirkwood-Dirac frame is undefined."""


class ReconstructionError(QuasirepError, ValueError):
    """A frame/dual pair fails the reconstruction identity."""


class SpanningError(QuasirepError, ValueError):
    """A tomographic decomposition has no solution within tolerance."""


class NonIdempotentError(QuasirepError, ValueError):
    """A matrix expected to satisfy D @ D == D does not."""


class SplittingMismatchError(QuasirepError, ValueError):
    """Two factorizations do not split the same idempotent."""


class InjectivityError(QuasirepError, ValueError):
    """An extracted state map is rank-deficient where injectivity is required."""
