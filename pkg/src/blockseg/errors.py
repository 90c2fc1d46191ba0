"""Exception hierarchy shared across the package."""


class BlocksegError(Exception):
    """Base class for all blockseg errors."""


class MatrixFormatError(BlocksegError):
    """Input file or array cannot be turned into a valid symmetric matrix."""


class SymmetryViolation(MatrixFormatError):
    """Matrix entries differ from their transpose beyond the allowed tolerance."""


class ParameterError(BlocksegError):
    """A parameter is out of range or the requested configuration is infeasible."""


class EnumerationBudgetError(ParameterError):
    """Exhaustive search would exceed the configured enumeration budget."""
