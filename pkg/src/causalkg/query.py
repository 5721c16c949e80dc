"""SPARQL-subset query engine: conjunctive patterns, numeric/text FILTER, LIMIT.

Grammar::

    PREFIX name: <iri> ...
    SELECT ?v ... WHERE { tp ( '.' tp )* ( FILTER '(' ?v OP const ')' )* } ( LIMIT n )?

Pattern positions are IRIs (``<...>`` or prefixed), ``a``, literals, or
``?variables``. Results are deduplicated bindings in lexicographic order of
their canonical term text.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import ParseError
from .ontology import CG, CGS, OWL_NS, RDFS_NS
from .rdf import (
    XSD,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_INTEGER,
    XSD_STRING,
    Iri,
    Literal,
    Term,
    term_text,
)
from .turtle import RDF_NS, RDF_TYPE

BUILTIN_PREFIXES = {
    "cg": CG,
    "cgs": CGS,
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
    "owl": OWL_NS,
    "xsd": XSD,
}

_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    "=": operator.eq,
    "!=": operator.ne,
    ">=": operator.ge,
    ">": operator.gt,
}

_NUMERIC_DATATYPES = (XSD_DECIMAL, XSD_INTEGER)


@dataclass(frozen=True)
class Variable:
    name: str


PatternTerm = Union[Term, Variable]


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def variables(self) -> set[str]:
        return {t.name for t in (self.subject, self.predicate, self.object) if isinstance(t, Variable)}


@dataclass(frozen=True)
class Comparison:
    var: str
    op: str  # one of < <= = != >= >
    value: Union[float, str]

    def holds(self, term: Term) -> bool:
        """Total comparison: cross-kind comparisons are False, never errors."""
        if not isinstance(term, Literal):
            return False
        compare = _OPS[self.op]
        if isinstance(self.value, str):
            if term.datatype != XSD_STRING:
                return False
            return compare(term.lexical, self.value)
        if term.datatype not in _NUMERIC_DATATYPES:
            return False
        return compare(term.as_float(), self.value)


@dataclass
class QueryAst:
    select_vars: list[str]
    patterns: list[TriplePattern]
    filters: list[Comparison] = field(default_factory=list)
    limit: Optional[int] = None


class _QueryLexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def tokens(self) -> list[tuple[str, str, int, int]]:
        out = []
        while True:
            while self.pos < len(self.text) and self.text[self.pos].isspace():
                self._advance()
            if self.pos >= len(self.text):
                out.append(("eof", "", self.line, self.col))
                return out
            line, col = self.line, self.col
            ch = self.text[self.pos]
            if ch == "?":
                self._advance()
                start = self.pos
                while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                    self._advance()
                if self.pos == start:
                    raise ParseError("empty variable name", line, col)
                out.append(("var", self.text[start : self.pos], line, col))
            elif ch == "<":
                # '<...>' with no whitespace is an IRI, otherwise a comparison
                end = self.pos + 1
                while end < len(self.text) and not self.text[end].isspace() and self.text[end] != ">":
                    end += 1
                if end < len(self.text) and self.text[end] == ">":
                    out.append(("iri", self.text[self.pos + 1 : end], line, col))
                    self._advance(end + 1 - self.pos)
                elif self.text.startswith("<=", self.pos):
                    self._advance(2)
                    out.append(("op", "<=", line, col))
                else:
                    self._advance()
                    out.append(("op", "<", line, col))
            elif ch == '"':
                self._advance()
                chars = []
                while True:
                    if self.pos >= len(self.text):
                        raise ParseError("unterminated string", line, col)
                    c = self.text[self.pos]
                    if c == '"':
                        self._advance()
                        break
                    if c == "\\" and self.pos + 1 < len(self.text):
                        nxt = self.text[self.pos + 1]
                        chars.append({"n": "\n", "t": "\t", "r": "\r"}.get(nxt, nxt))
                        self._advance(2)
                    else:
                        chars.append(c)
                        self._advance()
                out.append(("string", "".join(chars), line, col))
            elif ch.isdigit() or (ch in "+-" and self._peek_digit()):
                start = self.pos
                self._advance()
                while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] == "."):
                    self._advance()
                out.append(("number", self.text[start : self.pos], line, col))
            elif ch in "{}().":
                self._advance()
                out.append(("punct", ch, line, col))
            elif ch in "<>!=":
                # comparison operators (single or double char)
                two = self.text[self.pos : self.pos + 2]
                if two in ("<=", ">=", "!="):
                    self._advance(2)
                    out.append(("op", two, line, col))
                else:
                    self._advance()
                    out.append(("op", ch, line, col))
            else:
                start = self.pos
                while self.pos < len(self.text) and not self.text[self.pos].isspace() and self.text[
                    self.pos
                ] not in '{}().?"<>!=':
                    self._advance()
                word = self.text[start : self.pos]
                if not word:
                    raise ParseError(f"unexpected character {ch!r}", line, col)
                out.append(("word", word, line, col))

    def _peek_digit(self) -> bool:
        return self.pos + 1 < len(self.text) and self.text[self.pos + 1].isdigit()


class _QueryParser:
    def __init__(self, tokens: list[tuple[str, str, int, int]]):
        self.tokens = tokens
        self.index = 0
        self.prefixes = dict(BUILTIN_PREFIXES)

    @property
    def current(self):
        return self.tokens[self.index]

    def _error(self, message: str) -> ParseError:
        _, _, line, col = self.current
        return ParseError(message, line, col)

    def _take(self):
        token = self.current
        if token[0] != "eof":
            self.index += 1
        return token

    def _keyword(self, word: str) -> bool:
        kind, value, _, _ = self.current
        return kind == "word" and value.upper() == word

    def _expect_keyword(self, word: str) -> None:
        if not self._keyword(word):
            raise self._error(f"expected {word}")
        self._take()

    def _expect_punct(self, value: str) -> None:
        kind, got, _, _ = self.current
        if kind not in ("punct", "op") or got != value:
            raise self._error(f"expected {value!r}")
        self._take()

    def parse(self) -> QueryAst:
        while self._keyword("PREFIX"):
            self._take()
            kind, value, _, _ = self._take()
            if kind != "word" or not value.endswith(":"):
                raise self._error("expected prefix name ending in ':'")
            iri_kind, iri, _, _ = self._take()
            if iri_kind != "iri":
                raise self._error("expected <IRI> in PREFIX")
            self.prefixes[value[:-1]] = iri

        self._expect_keyword("SELECT")
        select_vars = []
        while self.current[0] == "var":
            select_vars.append(self._take()[1])
        if not select_vars:
            raise self._error("SELECT needs at least one ?variable")

        self._expect_keyword("WHERE")
        self._expect_punct("{")
        patterns: list[TriplePattern] = []
        filters: list[Comparison] = []

        while True:
            if self.current[0] == "punct" and self.current[1] == "}":
                self._take()
                break
            if self._keyword("FILTER"):
                self._take()
                filters.append(self._filter())
                continue
            patterns.append(self._pattern())
            # optional '.' separator
            if self.current[0] == "punct" and self.current[1] == ".":
                self._take()
        if not patterns:
            raise self._error("WHERE block needs at least one triple pattern")

        limit = None
        if self._keyword("LIMIT"):
            self._take()
            kind, value, _, _ = self._take()
            if kind != "number" or not value.isdigit() or int(value) <= 0:
                raise self._error("LIMIT needs a positive integer")
            limit = int(value)
        if self.current[0] != "eof":
            raise self._error(f"unexpected trailing {self.current[1]!r}")

        ast = QueryAst(select_vars, patterns, filters, limit)
        bound = set().union(*(p.variables() for p in patterns))
        for var in select_vars:
            if var not in bound:
                raise ParseError(f"selected variable ?{var} appears in no pattern")
        for f in filters:
            if f.var not in bound:
                raise ParseError(f"filter variable ?{f.var} appears in no pattern")
        return ast

    def _pattern(self) -> TriplePattern:
        subject = self._pattern_term(allow_literal=False)
        predicate = self._pattern_term(allow_literal=False)
        obj = self._pattern_term(allow_literal=True)
        return TriplePattern(subject, predicate, obj)

    def _pattern_term(self, *, allow_literal: bool) -> PatternTerm:
        kind, value, line, col = self.current
        if kind == "var":
            self._take()
            return Variable(value)
        if kind == "iri":
            self._take()
            return Iri(value)
        if kind == "word":
            if value == "a":
                self._take()
                return Iri(RDF_TYPE)
            if allow_literal and value in ("true", "false"):
                self._take()
                return Literal(value, XSD_BOOLEAN)
            if ":" in value:
                self._take()
                prefix, _, local = value.partition(":")
                if prefix not in self.prefixes:
                    raise ParseError(f"unknown prefix {prefix!r}", line, col)
                return Iri(self.prefixes[prefix] + local)
            raise ParseError(f"unexpected token {value!r}", line, col)
        if not allow_literal:
            raise ParseError("literal not allowed in this position", line, col)
        if kind == "string":
            self._take()
            return Literal(value, XSD_STRING)
        if kind == "number":
            self._take()
            return Literal(value, XSD_DECIMAL if "." in value else XSD_INTEGER)
        raise ParseError(f"unexpected token {value!r}", line, col)

    def _filter(self) -> Comparison:
        self._expect_punct("(")
        kind, var, line, col = self._take()
        if kind != "var":
            raise ParseError("FILTER expects a ?variable on the left", line, col)
        op_kind, op, line, col = self._take()
        if op_kind != "op" or op not in _OPS:
            raise ParseError(f"unknown comparison operator {op!r}", line, col)
        kind, value, line, col = self._take()
        if kind == "number":
            constant: Union[float, str] = float(value)
        elif kind == "string":
            constant = value
        else:
            raise ParseError("FILTER constant must be numeric or a string", line, col)
        self._expect_punct(")")
        return Comparison(var, op, constant)


def parse_query(text: str) -> QueryAst:
    """Parse query text into an AST with all prefixes resolved."""
    tokens = _QueryLexer(text).tokens()
    return _QueryParser(tokens).parse()


def eval_query(target, ast: QueryAst) -> list[dict[str, Term]]:
    """Evaluate against a Graph or TripleStore.

    Conjunctive join, filters, then deduplicated bindings ordered
    lexicographically by canonical term text; LIMIT applies last.
    """
    store = target.store if hasattr(target, "store") else target

    bindings: list[dict[str, Term]] = [{}]
    for pattern in ast.patterns:
        extended: list[dict[str, Term]] = []
        for binding in bindings:
            positions = [
                binding.get(t.name) if isinstance(t, Variable) else t
                for t in (pattern.subject, pattern.predicate, pattern.object)
            ]
            for triple in store.match(*positions):
                candidate = dict(binding)
                ok = True
                for slot, value in zip(
                    (pattern.subject, pattern.predicate, pattern.object),
                    (triple.subject, triple.predicate, triple.object),
                ):
                    if not isinstance(slot, Variable):
                        continue
                    bound = candidate.get(slot.name)
                    if bound is None:
                        candidate[slot.name] = value
                    elif bound != value:
                        ok = False
                        break
                if ok:
                    extended.append(candidate)
        bindings = extended
        if not bindings:
            break

    for comparison in ast.filters:
        bindings = [b for b in bindings if comparison.holds(b[comparison.var])]

    rows = {tuple(b[v] for v in ast.select_vars) for b in bindings}
    ordered = sorted(rows, key=lambda row: tuple(term_text(t) for t in row))
    if ast.limit is not None:
        ordered = ordered[: ast.limit]
    return [dict(zip(ast.select_vars, row)) for row in ordered]


def run_query(target, text: str) -> list[dict[str, Term]]:
    return eval_query(target, parse_query(text))
