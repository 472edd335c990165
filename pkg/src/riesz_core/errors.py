"""
Error hierarchy shared by the kernel, the theorem checkers and the harness.

Every error raised on purpose by this project derives from ``RieszError`` so
callers (the suite runner, the CLI) can tell them apart from programming bugs.
"""

from typing import Optional


class RieszError(Exception):
    """Base class for all errors raised by the Riesz space toolkit."""


class StructuralError(RieszError, ValueError):
    """Operands do not fit together (different sample spaces, wrong shapes)."""


class DomainError(RieszError, ValueError):
    """A precondition on the values of an operand does not hold."""


class ResourceCapError(RieszError):
    """
    An exhaustive enumeration would exceed its configured cap.

    Attributes:
        cap: The configured limit
        requested: The size the operation asked for
        cap_name: Name of the setting holding the limit
    """

    def __init__(self, cap_name: str, cap: int, requested: int):
        self.cap_name = cap_name
        self.cap = cap
        self.requested = requested
        super().__init__(f"{cap_name} exceeded: requested {requested}, cap is {cap}")


class ScenarioError(RieszError):
    """A scenario file could not be turned into a valid scenario."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        location = f" (at {field})" if field else ""
        super().__init__(f"{message}{location}")


class ScenarioParseError(ScenarioError):
    """
    The scenario text is malformed.

    Attributes:
        line: 1-based line of a syntax error, if known
        column: 1-based column of a syntax error, if known
    """

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} at line {line}, column {column}"
        super().__init__(message, field)


class UnresolvedNameError(ScenarioError):
    """A scenario refers to an element, partition or process it never defines."""

    def __init__(self, name: str, field: str):
        self.name = name
        super().__init__(f"Unresolved name '{name}'", field)


class ScenarioInvariantError(ScenarioError):
    """A scenario value parses but violates a domain invariant."""
