"""Exception hierarchy shared by every stage of the toolchain."""

from __future__ import annotations


class CodeGraphError(Exception):
    """Base class for all toolchain errors."""


class SourceError(CodeGraphError):
    """An error tied to a position in a source file."""

    severity = "error"

    def __init__(self, message: str, line: int = 0, column: int = 0, filename: str = "<input>"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.filename = filename

    def diagnostic(self, filename: str | None = None) -> str:
        name = filename or self.filename
        return f"{name}:{self.line}:{self.column}: {self.severity}: {self.message}"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


class LexError(SourceError):
    pass


class ParseError(SourceError):
    def __init__(self, message: str, line: int = 0, column: int = 0, expected: tuple[str, ...] = (),
                 filename: str = "<input>"):
        if expected:
            message = f"{message} (expected one of: {', '.join(expected)})"
        super().__init__(message, line, column, filename)
        self.expected = expected


class ResolveError(SourceError):
    pass


class CfgError(SourceError):
    """Raised while building control-flow graphs, e.g. for unreachable code."""


class GraphError(CodeGraphError):
    pass


class FormatError(CodeGraphError):
    pass


class ShapeError(CodeGraphError):
    pass


class ConfigError(CodeGraphError):
    pass


class DataError(CodeGraphError):
    pass


class MetricError(CodeGraphError):
    pass
