"""Exception hierarchy for the library.

Configuration-class errors describe bad static parameters and map to CLI
exit code 2; numeric-class errors describe failures discovered while
computing and map to exit code 3.
"""


class ConfqmError(Exception):
    """Base class for all library errors."""


class ConfigurationError(ConfqmError):
    """Invalid static parameters (grid shape, force parameters, config files)."""


class ResolutionError(ConfigurationError):
    """A packet width is too small for the grid spacing to resolve."""


class ResourceError(ConfigurationError):
    """A requested computation exceeds a documented size cap."""


class UnknownScenarioError(ConfigurationError):
    """A scenario name or scenario kind that the library does not know."""


class GridMismatchError(ConfqmError):
    """Two states (or a state and a grid) that must share a grid do not."""


class ArgumentError(ConfqmError):
    """An operation was called with arguments outside its contract."""


class SupportError(ConfqmError):
    """A packet's support would touch or wrap across a periodic boundary."""


class NormalizationError(ConfqmError):
    """An operation that requires a unit-norm state received something else."""


class DataError(ConfqmError):
    """Amplitude data contains non-finite entries."""


class OutputError(ConfqmError):
    """An output path cannot be created or written."""


class NumericError(ConfqmError):
    """A runtime numeric failure (lost Hermiticity, negative variance, ...)."""
