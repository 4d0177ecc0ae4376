"""
Exception hierarchy for spectrafrac
"""

from typing import Optional


class SpectraFracError(Exception):
    """Base class for every error raised by spectrafrac"""


class DomainError(SpectraFracError, ValueError):
    """A precondition on an argument does not hold"""


class OutsideSupportError(DomainError):
    """The query point carries no mass at the largest scale"""

    def __init__(self, x: float, eps_max: float):
        super().__init__(f"outside support: mu(B({x!r}, {eps_max!r})) = 0")
        self.x = x
        self.eps_max = eps_max


class ResourceLimitError(SpectraFracError):
    """A grid, depth or enumeration would exceed its cap"""


class InvariantError(SpectraFracError):
    """A computed object violates one of its invariants"""


class NumericError(SpectraFracError):
    """A numerical routine failed to converge or lost accuracy"""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message if index is None else f"{message} (index {index})")
        self.index = index


class ConfigError(DomainError):
    """A configuration file is malformed; carries the location when known"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line
