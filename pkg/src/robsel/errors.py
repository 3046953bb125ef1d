"""Exception types raised by robsel."""

from typing import Optional


class RobselError(Exception):
    """Base class for every error raised deliberately by robsel."""


class InvalidSubsetError(RobselError, ValueError):
    """A subset refers to items outside the ground set or has the wrong width."""


class InvalidArgumentError(RobselError, ValueError):
    """An argument violates an operation's precondition."""


class InvalidBudgetError(RobselError, ValueError):
    """The cardinality budget k is outside [1, n]."""


class EnumerationSizeError(RobselError, ValueError):
    """A brute-force enumeration would exceed its budget."""


class EdgeListParseError(RobselError, ValueError):
    """An edge-list line could not be parsed."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EmptyGraphError(RobselError, ValueError):
    """The edge list contained no nodes."""


class ConfigError(RobselError, ValueError):
    """An experiment configuration is malformed or inconsistent."""

    def __init__(self, message: str, key: Optional[str] = None, line_number: Optional[int] = None):
        location = ""
        if line_number is not None:
            location += f"line {line_number}: "
        if key is not None:
            location += f"'{key}': "
        super().__init__(f"{location}{message}")
        self.key = key
        self.line_number = line_number


class PopulationInvariantError(RobselError, AssertionError):
    """A debug check found the EPORSS archive in an invalid state."""
