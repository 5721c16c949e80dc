"""Parser for the Turtle / N-Triples subset accepted as ontology input.

Supported: ``@prefix`` / ``PREFIX`` declarations, full IRIs, prefixed names,
blank node labels (``_:x``), the ``a`` keyword, string literals with
``^^`` datatypes, numeric and boolean literals, predicate lists (``;``) and
object lists (``,``), and ``#`` comments. Everything outside this subset is
rejected with a positioned error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError
from .rdf import (
    SUPPORTED_DATATYPES,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Iri,
    Literal,
    Term,
    Triple,
)

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDF_TYPE = RDF_NS + "type"

_PUNCT = {".", ";", ",", "[", "]", "(", ")"}


@dataclass
class ParsedOntology:
    """Result of parsing one ontology document."""

    prefixes: dict[str, str] = field(default_factory=dict)
    triples: list[Triple] = field(default_factory=list)


@dataclass(frozen=True)
class _Token:
    kind: str  # iri, pname, blank, string, number, boolean, a, prefix, punct, dtype, eof
    value: str
    line: int
    column: int
    extra: str = ""  # datatype IRI for string tokens carrying ^^


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _skip_ws(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            elif ch.isspace():
                self._advance()
            else:
                return

    def tokens(self) -> list[_Token]:
        out = []
        while True:
            token = self._next()
            out.append(token)
            if token.kind == "eof":
                return out

    def _next(self) -> _Token:
        self._skip_ws()
        line, col = self.line, self.col
        if self.pos >= len(self.text):
            return _Token("eof", "", line, col)
        ch = self.text[self.pos]
        if ch == "<":
            return _Token("iri", self._iri_body(), line, col)
        if ch == '"':
            return self._string(line, col)
        if self.text.startswith("_:", self.pos):
            return _Token("blank", self._blank_label(), line, col)
        if ch in _PUNCT:
            self._advance()
            return _Token("punct", ch, line, col)
        if ch.isdigit() or (ch in "+-" and self._peek(1).isdigit()):
            return _Token("number", self._number(), line, col)
        word = self._word()
        if word == "":
            raise self._error(f"unexpected character {ch!r}")
        lowered = word.lower()
        if word == "a":
            return _Token("a", word, line, col)
        if lowered == "@prefix" or lowered == "prefix":
            return _Token("prefix", word, line, col)
        if word in ("true", "false"):
            return _Token("boolean", word, line, col)
        if word.startswith("@"):
            raise ParseError(f"unsupported directive or language tag {word!r}", line, col)
        if ":" in word:
            return _Token("pname", word, line, col)
        raise ParseError(f"unexpected token {word!r}", line, col)

    def _peek(self, offset: int) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def _iri_body(self) -> str:
        self._advance()  # consume <
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] != ">":
            if self.text[self.pos] in " \t\n\r":
                raise self._error("whitespace inside IRI")
            self._advance()
        if self.pos >= len(self.text):
            raise self._error("unterminated IRI")
        body = self.text[start : self.pos]
        self._advance()  # consume >
        return body

    def _blank_label(self) -> str:
        self._advance(2)
        start = self.pos
        end = start
        while end < len(self.text) and (self.text[end].isalnum() or self.text[end] in "_-."):
            end += 1
        # a trailing dot belongs to the statement terminator, not the label
        label = self.text[start:end].rstrip(".")
        if not label:
            raise self._error("empty blank node label")
        self._advance(len(label))
        return label

    def _string(self, line: int, col: int) -> _Token:
        self._advance()  # opening quote
        out = []
        while True:
            if self.pos >= len(self.text):
                raise ParseError("unterminated string literal", line, col)
            ch = self.text[self.pos]
            if ch == '"':
                self._advance()
                break
            if ch == "\\":
                out.append(self._escape())
            else:
                out.append(ch)
                self._advance()
        value = "".join(out)
        if self.pos < len(self.text) and self.text[self.pos] == "@":
            raise self._error("language-tagged literals are not supported")
        datatype = ""
        if self.text.startswith("^^", self.pos):
            self._advance(2)
            self._skip_ws()
            if self.pos < len(self.text) and self.text[self.pos] == "<":
                datatype = self._iri_body()
            else:
                word = self._word()
                if ":" not in word:
                    raise self._error("expected datatype IRI after ^^")
                datatype = "pname:" + word
        return _Token("string", value, line, col, extra=datatype)

    def _escape(self) -> str:
        simple = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}
        code = self._peek(1)
        if code in simple:
            self._advance(2)
            return simple[code]
        if code in ("u", "U"):
            width = 4 if code == "u" else 8
            digits = self.text[self.pos + 2 : self.pos + 2 + width]
            if len(digits) != width:
                raise self._error("truncated \\u escape")
            try:
                value = int(digits, 16)
            except ValueError as exc:
                raise self._error("bad \\u escape") from exc
            self._advance(2 + width)
            return chr(value)
        raise self._error(f"unknown escape \\{code}")

    def _number(self) -> str:
        start = self.pos
        if self.text[self.pos] in "+-":
            self._advance()
        saw_dot = False
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch.isdigit():
                self._advance()
            elif ch == "." and not saw_dot and self._peek(1).isdigit():
                saw_dot = True
                self._advance()
            else:
                break
        return self.text[start : self.pos]

    def _word(self) -> str:
        start = self.pos
        end = start
        while end < len(self.text):
            ch = self.text[end]
            if ch.isspace() or ch in '<>";,[]()':
                break
            end += 1
        # a trailing '.' after a prefixed name terminates the statement
        word = self.text[start:end].rstrip(".")
        self._advance(len(word))
        return word


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.index = 0
        self.doc = ParsedOntology()
        self._blank_counter = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _error(self, message: str) -> ParseError:
        tok = self.current
        return ParseError(message, tok.line, tok.column)

    def _take(self) -> _Token:
        token = self.current
        if token.kind != "eof":
            self.index += 1
        return token

    def _expect_punct(self, value: str) -> None:
        token = self.current
        if token.kind != "punct" or token.value != value:
            raise self._error(f"expected {value!r}, found {token.value!r}")
        self._take()

    def parse(self) -> ParsedOntology:
        while self.current.kind != "eof":
            if self.current.kind == "prefix":
                self._prefix_decl()
            else:
                self._triple_statement()
        return self.doc

    def _prefix_decl(self) -> None:
        keyword = self._take()
        name_tok = self.current
        if name_tok.kind != "pname" or not name_tok.value.endswith(":"):
            raise self._error("expected a prefix name ending in ':'")
        self._take()
        iri_tok = self.current
        if iri_tok.kind != "iri":
            raise self._error("expected <IRI> in prefix declaration")
        self._take()
        if keyword.value.lower() == "@prefix":
            self._expect_punct(".")
        self.doc.prefixes[name_tok.value[:-1]] = iri_tok.value

    def _resolve_pname(self, token: _Token, value: str) -> Iri:
        prefix, _, local = value.partition(":")
        if prefix not in self.doc.prefixes:
            raise ParseError(f"unknown prefix {prefix!r}", token.line, token.column)
        return Iri(self.doc.prefixes[prefix] + local)

    def _resolve_datatype(self, token: _Token) -> str:
        raw = token.extra
        if raw.startswith("pname:"):
            datatype = self._resolve_pname(token, raw[len("pname:") :]).text
        else:
            datatype = raw
        if datatype not in SUPPORTED_DATATYPES:
            raise ParseError(f"unsupported literal datatype {datatype}", token.line, token.column)
        return datatype

    def _term(self, *, allow_literal: bool) -> Term:
        token = self.current
        if token.kind == "iri":
            self._take()
            return Iri(token.value)
        if token.kind == "pname":
            self._take()
            return self._resolve_pname(token, token.value)
        if token.kind == "a":
            self._take()
            return Iri(RDF_TYPE)
        if token.kind == "blank":
            self._take()
            return BlankNode(token.value)
        if not allow_literal:
            raise self._error(f"unexpected {token.kind} in subject/predicate position")
        if token.kind == "string":
            self._take()
            datatype = self._resolve_datatype(token) if token.extra else XSD_STRING
            return Literal(token.value, datatype)
        if token.kind == "number":
            self._take()
            datatype = XSD_DECIMAL if "." in token.value else XSD_INTEGER
            return Literal(token.value, datatype)
        if token.kind == "boolean":
            self._take()
            return Literal(token.value, XSD_BOOLEAN)
        raise self._error(f"unexpected token {token.value!r}")

    def _triple_statement(self) -> None:
        subject = self._term(allow_literal=False)
        if isinstance(subject, Literal):
            raise self._error("literal cannot be a subject")
        while True:
            predicate = self._term(allow_literal=False)
            if not isinstance(predicate, Iri):
                raise self._error("predicate must be an IRI")
            while True:
                obj = self._term(allow_literal=True)
                self.doc.triples.append(Triple(subject, predicate, obj))
                if self.current.kind == "punct" and self.current.value == ",":
                    self._take()
                    continue
                break
            if self.current.kind == "punct" and self.current.value == ";":
                self._take()
                # tolerate a trailing ';' before '.'
                if self.current.kind == "punct" and self.current.value == ".":
                    break
                continue
            break
        self._expect_punct(".")


def parse_turtle(text: str) -> ParsedOntology:
    """Parse Turtle/N-Triples subset text into prefixes and triples."""
    tokens = _Lexer(text).tokens()
    return _Parser(tokens).parse()


def parse_turtle_file(path) -> ParsedOntology:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_turtle(handle.read())


__all__ = [
    "ParsedOntology",
    "parse_turtle",
    "parse_turtle_file",
    "RDF_NS",
    "RDF_TYPE",
    "XSD_STRING",
]
