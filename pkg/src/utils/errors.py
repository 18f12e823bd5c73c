"""
Exception hierarchy for slopeforge.

Every failure raised by the library derives from SlopeforgeError so the CLI
can translate it into an exit code. Input-validation errors also derive from
ValueError.
"""
from typing import List, Optional


class SlopeforgeError(Exception):
    """Base class for all slopeforge errors."""


class DimensionError(SlopeforgeError, ValueError):
    """Matrix or lattice dimensions are incompatible with the operation."""


class ShapeError(SlopeforgeError, ValueError):
    """A matrix does not have the required shape (e.g. not symmetric)."""


class DefinitenessError(SlopeforgeError, ValueError):
    """A Gram matrix is not positive definite."""

    def __init__(self, message: str, minor: Optional[int] = None):
        super().__init__(message)
        self.minor = minor


class DomainError(SlopeforgeError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnfactoredError(SlopeforgeError):
    """An integer could not be factored within the retry budget."""

    def __init__(self, value: int):
        super().__init__(f"could not factor {value}")
        self.value = value


class RankError(SlopeforgeError, ValueError):
    """Generators are linearly dependent."""


class ParseError(SlopeforgeError, ValueError):
    """Malformed lattice file or manifest."""

    def __init__(self, message: str, row: Optional[int] = None, col: Optional[int] = None):
        position = ""
        if row is not None:
            position = f" (row {row}" + (f", col {col})" if col is not None else ")")
        super().__init__(f"{message}{position}")
        self.row = row
        self.col = col


class ConfigurationError(SlopeforgeError):
    """Invalid configuration."""


class InvariantViolation(SlopeforgeError):
    """An internal consistency check failed."""


class BudgetExhausted(SlopeforgeError):
    """A search ran out of its node or time budget."""

    def __init__(self, operation: str, nodes: int):
        super().__init__(f"{operation}: search budget exhausted after {nodes} nodes")
        self.operation = operation
        self.nodes = nodes


class RankCapExceeded(SlopeforgeError):
    """A tensor experiment exceeds the configured rank cap."""


class UnknownCatalogEntry(SlopeforgeError, KeyError):
    """Requested catalog name does not exist."""

    def __init__(self, name: str, available: List[str]):
        super().__init__(f"unknown lattice '{name}'; available: {', '.join(available)}")
        self.name = name
        self.available = available

    def __str__(self) -> str:
        return self.args[0]
