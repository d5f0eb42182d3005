"""Exception and warning types shared across the package.

The CLI maps :class:`DataError` to exit code 3 and every other
:class:`DataBiasError` to exit code 4.
"""


class DataBiasError(Exception):
    """Base class for all package errors."""


class DataBiasWarning(UserWarning):
    """Non-fatal condition recorded while processing data."""


# -- data -------------------------------------------------------------------

class DataError(DataBiasError):
    """Problem with input data or schemas."""


class SchemaError(DataError):
    """A schema violates the column-role invariants."""


class MissingColumn(DataError):
    def __init__(self, column, where="data file"):
        super().__init__(f"column {column!r} missing from {where}")
        self.column = column


class UnmappableValue(DataError):
    def __init__(self, column, value, line=None):
        loc = f" (line {line})" if line is not None else ""
        super().__init__(f"column {column!r}: value {value!r} is not in the declared mapping{loc}")
        self.column = column
        self.value = value
        self.line = line


class BadNumericValue(DataError):
    def __init__(self, column, value):
        super().__init__(f"numeric column {column!r}: cannot parse {value!r}")
        self.column = column
        self.value = value


class EmptyDataset(DataError):
    pass


class EmptyFitSet(DataError):
    pass


class SchemaMismatch(DataError):
    pass


class DegenerateSensitive(DataError):
    pass


class NoFeaturesLeft(DataError):
    pass


class InvalidBias(DataBiasError, ValueError):
    """Malformed or out-of-range bias request."""


# -- fetching ---------------------------------------------------------------

class NetworkError(DataBiasError):
    pass


class ChecksumMismatch(DataBiasError):
    pass


# -- models -----------------------------------------------------------------

class NonFiniteLoss(DataBiasError):
    """Gradient descent diverged; the learning rate is probably too high."""


class ShapeMismatch(DataBiasError, ValueError):
    pass


# -- metrics ----------------------------------------------------------------

class MetricError(DataBiasError, ValueError):
    """A metric is undefined on the given inputs."""


class MissingClass(MetricError):
    pass


class MissingGroup(MetricError):
    pass


class NoPositivesInGroup(MetricError):
    pass


class MissingClassInGroup(MetricError):
    pass


class EmptyPairSet(MetricError):
    pass


class ProfileError(DataBiasError):
    """A detection measure failed while assembling a profile."""

    def __init__(self, measure, cause):
        super().__init__(f"{measure}: {cause}")
        self.measure = measure
        self.cause = cause


class RepetitionFailed(DataBiasError):
    """An experiment repetition failed outside metric evaluation."""

    def __init__(self, repetition, seed, level, cause):
        super().__init__(f"repetition {repetition} (seed {seed}), level {level}: "
                         f"{type(cause).__name__}: {cause}")
        self.repetition = repetition
        self.seed = seed
        self.level = level
        self.cause = cause
