"""Exception types shared across the package."""


class ExpucodeError(Exception):
    """Base class for all library errors."""


class ChannelFormatError(ExpucodeError, ValueError):
    """Malformed channel matrix or channel file."""


class NegativeEntryError(ChannelFormatError):
    """A transition-matrix entry is negative."""


class RowSumError(ChannelFormatError):
    """A transition-matrix row does not sum to 1 within tolerance."""


class DegenerateAlphabetError(ChannelFormatError):
    """Input or output alphabet has fewer than 2 symbols."""


class LengthMismatchError(ExpucodeError, ValueError):
    """Sequences of unequal length where equal lengths are required."""


class RhoRangeError(ExpucodeError, ValueError):
    """rho lies outside the interval the operation is defined on."""


class RhoMaxTooSmallError(ExpucodeError, ValueError):
    """Search ceiling for rho is below 1."""


class BudgetExceededError(ExpucodeError, ValueError):
    """Exact enumeration would exceed the configured budget."""


class SizeOverflowError(ExpucodeError, ValueError):
    """Requested codebook size does not fit the 64-bit sizing guard."""


class KeepTooLargeError(ExpucodeError, ValueError):
    """Asked to keep more codewords than the code contains."""


class NoConvergenceError(ExpucodeError, RuntimeError):
    """An increasing scan exhausted its range without success."""


class ConfigError(ExpucodeError, ValueError):
    """Invalid experiment configuration."""
