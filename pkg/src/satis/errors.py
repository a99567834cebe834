"""Exception hierarchy shared by every SATIS module."""

from __future__ import annotations


class SatisError(Exception):
    """Base class for all errors raised by the engine."""


class ParseError(SatisError):
    """Malformed Turtle, query, or fragment text.

    ``line`` and ``column`` are 1-based. ``source`` is an optional file name
    filled in by loaders so diagnostics read ``file:line:column: message``.
    """

    def __init__(self, line: int, column: int, message: str, source: str | None = None):
        self.line = line
        self.column = column
        self.message = message
        self.source = source
        super().__init__(self.diagnostic())

    def diagnostic(self) -> str:
        where = f"{self.line}:{self.column}"
        if self.source:
            where = f"{self.source}:{where}"
        return f"{where}: {self.message}"


class UnknownPrefix(ParseError):
    def __init__(self, name: str, line: int = 0, column: int = 0, source: str | None = None):
        self.name = name
        super().__init__(line, column, f"unknown prefix {name!r}", source)


class UnboundFilterVariable(ParseError):
    def __init__(self, variable: str, line: int = 0, column: int = 0, source: str | None = None):
        self.variable = variable
        super().__init__(line, column, f"filter variable ?{variable} occurs in no triple pattern", source)


class VariableInData(SatisError):
    """A triple holding a Variable was inserted into a stored Graph."""


class TypeMismatch(SatisError):
    """A filter was applied to a Literal; filters compare concept IRIs only."""


class CyclicMap(SatisError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__(f"map has a directed cycle through {len(self.cycle)} intention(s)")


class InvalidMap(SatisError):
    def __init__(self, violations):
        self.violations = tuple(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid map: {lines}")


class MalformedSection(SatisError):
    def __init__(self, node, missing):
        self.node = node
        self.missing = tuple(missing)
        super().__init__(f"section {node} is missing {', '.join(self.missing)}")


class UnknownConcept(SatisError):
    def __init__(self, owner, concept):
        self.owner = owner
        self.concept = concept
        super().__init__(f"{owner}: concept {concept} is not declared in the domain ontology")


class EmptyProfile(SatisError):
    def __init__(self, service):
        self.service = service
        super().__init__(f"service {service} declares no input and no output")


class NotFound(SatisError):
    def __init__(self, iri):
        self.iri = iri
        super().__init__(f"{iri} not found")


class DuplicateId(SatisError):
    def __init__(self, fragment_id: str):
        self.fragment_id = fragment_id
        super().__init__(f"fragment id {fragment_id!r} already in catalog")


class InvalidSignature(SatisError):
    """Fragment signature violates the mandatory-target rule."""


class InvalidBody(SatisError):
    """Fragment body does not fit its kind (bad query shape or invalid map)."""


class InvalidGoal(SatisError):
    """Render goal has a wildcard or special target intention."""
