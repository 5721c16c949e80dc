"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CausalGraphError(Exception):
    """Base class for all domain errors raised by causalkg."""


class TermError(CausalGraphError):
    """Malformed RDF term (empty IRI, unsupported datatype, ...)."""


class ParseError(CausalGraphError):
    """Syntax error in Turtle/N-Triples or query text, with position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        if line:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class StorageError(CausalGraphError):
    """Store file I/O or protocol violation (e.g. write on a shared open)."""


class LockError(StorageError):
    """Exclusive lock on the store file is held by someone else."""


class OntologyError(CausalGraphError):
    """Invalid ontology content or model merge (redefinition, cycle, ...)."""


class GraphError(CausalGraphError):
    """Violation of a causal-graph contract (bad confidence, collision, ...)."""


class NotFoundError(GraphError):
    """A named individual required by the operation does not exist."""
