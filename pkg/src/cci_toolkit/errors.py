"""Exception hierarchy shared across the toolkit.

Three families map onto CLI exit codes: :class:`ValidationError` (bad
parameters or malformed requests, exit 2), :class:`DataError` (defective or
insufficient input data, exit 3) and :class:`NumericalError` (estimation or
identification failures, exit 4).
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ValidationError(ToolkitError):
    """A request or parameter violates a precondition."""

    exit_code = 2


class DataError(ToolkitError):
    """Input data is malformed, degenerate or insufficient."""

    exit_code = 3


class NumericalError(ToolkitError):
    """A numerical procedure failed or produced an unusable result."""

    exit_code = 4


# -- series / panel -----------------------------------------------------------

class EmptyOverlap(DataError):
    """Series share no usable calendar window."""


class NonPositiveLevel(DataError):
    """Growth-rate transforms require strictly positive levels."""


class TooShort(ValidationError):
    """Series or sample too short for the requested operation."""


class ZeroVariance(DataError):
    """A series with zero sample variance cannot be standardized."""


# -- index construction -------------------------------------------------------

class DegenerateBenchmark(DataError):
    """Benchmark series is identically zero within a group."""


class AllZero(DataError):
    """Aggregated raw index is identically zero."""


class MissingTerm(DataError):
    """A vocabulary term has no group data."""


# -- VAR / identification -----------------------------------------------------

class RankDeficient(NumericalError):
    """Regressor matrix is singular."""


class UnknownVariable(ValidationError):
    """A requested variable label is not in the model."""


class SingularSigma(NumericalError):
    """Residual covariance matrix is not invertible."""


class LengthMismatch(DataError):
    """Instrument does not align with the residual sample."""


class IrrelevantInstrument(NumericalError):
    """Instrument carries no information about the target shock."""


class UnstableDgp(NumericalError):
    """Simulation coefficients have companion spectral radius >= 1."""


# -- instrument construction --------------------------------------------------

class TooFewReferenceObs(DataError):
    """Reference window has too few observations for percentiles."""


# -- ingest -------------------------------------------------------------------

class ParseError(DataError):
    """A CSV or config file failed to parse."""


class GapError(DataError):
    """A series has missing months."""


class HttpError(DataError):
    """A remote fetch failed after retries."""


class AuthError(DataError):
    """Remote API rejected the credentials."""


class ConfigError(ValidationError):
    """A run-configuration key is missing or invalid."""
