"""Exception hierarchy.

Every error the library raises deliberately derives from :class:`FdchangeError`
so callers (and the CLI exit-code mapping) can distinguish input-parsing
problems, bad configuration, and degenerate data.
"""


class FdchangeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(FdchangeError):
    """Malformed input file (bad header, non-numeric cell, short row, ...)."""


class ConfigurationError(FdchangeError):
    """Invalid parameter combination (bad basis size, empty d list, ...)."""


class ResolutionError(ConfigurationError):
    """A discretization grid is too coarse for the requested output."""


class GridMismatchError(FdchangeError):
    """Two objects that must share an evaluation grid do not."""


class DegenerateDataError(FdchangeError):
    """Data carries no usable signal (zero covariance, tied sample, ...)."""


class InsufficientSampleError(DegenerateDataError):
    """Too few curves for the requested operation."""


class DimensionError(DegenerateDataError):
    """A requested projection dimension exceeds what the data supports."""
