"""Exception hierarchy shared by every forestlab module."""

from __future__ import annotations


class ForestlabError(Exception):
    """Base class for domain errors; the CLI maps these to exit status 1."""

    kind = "ForestlabError"

    def __str__(self) -> str:
        return f"{self.kind}: {super().__str__()}"


class ParseError(ForestlabError):
    kind = "ParseError"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UnknownClassError(ParseError):
    kind = "UnknownClass"


class DuplicateClassError(ParseError):
    kind = "DuplicateClass"


class MalformedCoefficientError(ParseError):
    kind = "MalformedCoefficient"


class ResourceBoundError(ForestlabError):
    kind = "ResourceBound"


class ExplicitFormUnavailable(ForestlabError):
    kind = "RADIUS_SUB_ONE"


class ComponentTestFailed(ForestlabError):
    kind = "ComponentTestFailed"


class InsufficientDataError(ForestlabError):
    kind = "InsufficientData"


class InvalidSystemError(ForestlabError):
    kind = "InvalidSystem"
