"""Exception hierarchy shared across the library."""


class SubsplitError(Exception):
    """Base class for all library errors."""


class InvalidData(SubsplitError):
    """Input data violates a precondition (non-finite values, length mismatch, ...)."""


class InvalidParams(SubsplitError):
    """Distribution parameters outside their valid domain."""


class InvalidConfig(SubsplitError):
    """Sampler or benchmark configuration is inconsistent."""


class NumericalFailure(SubsplitError):
    """A linear-algebra operation failed (e.g. Cholesky on a non-PD matrix)."""


class EmptySubcluster(SubsplitError):
    """A split was requested for a cluster with an empty subcluster."""


class DegenerateCluster(SubsplitError):
    """All points of a cluster coincide; 2-means cannot produce two sides."""


class DimensionMismatch(SubsplitError):
    """Array dimensions do not match the expected model dimension."""


class UnsplittablePrior(SubsplitError):
    """The pair generator could not produce a splittable pair within its attempt budget."""


class WeightFileError(SubsplitError):
    """Base class for weight-file parsing errors."""


class BadMagic(WeightFileError):
    """The weight file does not start with the expected magic bytes."""


class ShapeMismatch(WeightFileError):
    """A tensor is missing or has a shape inconsistent with the file's meta header."""


class CorruptTensor(WeightFileError):
    """Truncated payload or non-finite tensor values."""


class InvalidWeights(WeightFileError):
    """Meta fields are internally inconsistent (e.g. hidden dim not divisible by heads)."""
