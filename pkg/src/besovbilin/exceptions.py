"""Exception types raised by besovbilin."""


class BesovBilinError(Exception):
    """Base class for all package errors."""


class NonFiniteError(BesovBilinError, ValueError):
    """Raised when an input array contains NaN or infinite entries."""


class GridMismatchError(BesovBilinError, ValueError):
    """Raised when fields or symbols living on different grids are combined."""


class NyquistError(BesovBilinError, ValueError):
    """Raised when a construction needs frequencies the grid cannot represent."""


class ConfigError(BesovBilinError, ValueError):
    """Raised for malformed configurations or descriptors."""
