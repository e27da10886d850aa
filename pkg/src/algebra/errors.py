"""
Exceptions raised by the algebra layer.

Each class carries the process exit code the command-line front end reports
for it: 1 for bad input, 2 for a mathematical failure.
"""


class SoftPairError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code = 2


class InvalidInput(SoftPairError, ValueError):
    """Non-finite entries, wrong shapes of raw data, bad parameters."""

    exit_code = 1


class NotHermitian(InvalidInput):
    """A matrix required to be Hermitian is not, within tolerance."""


class DomainError(InvalidInput):
    """A spectrum (or a function's range) leaves the required interval."""


class ShapeError(InvalidInput):
    """Dimensions do not agree."""


class BadGrid(InvalidInput):
    """A sample grid violates its contract."""


class NotAProjection(InvalidInput):
    """A matrix expected to be a projection is not."""


class RelationViolation(SoftPairError):
    """A pair fails the soft projection relations."""


class NoMatching(SoftPairError):
    """Interior spectra of a and b cannot be paired."""


class NotReducible(SoftPairError):
    """b does not agree with a on the interior spectral subspace of a."""


class NotNearInteger(SoftPairError):
    """tr(a - b) is not within tolerance of an integer."""


class ProjectionDefect(SoftPairError):
    """P or Q built from a pair is too far from being a projection."""


class SupportMismatch(SoftPairError):
    """A perturbation does not vanish where the cut-off function is below 1."""


class GluingMismatch(SoftPairError):
    """Fields disagree on the overlap of the regions being glued."""


class RankDrop(SoftPairError):
    """A frame overlap is near-singular or the projection rank changes."""


class NotLocallyConstant(SoftPairError):
    """A pointwise integer invariant jumps between adjacent points."""


class FileFormatError(InvalidInput):
    """A document cannot be read, parsed or written."""
