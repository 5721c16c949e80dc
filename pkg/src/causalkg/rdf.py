"""In-memory RDF triplestore: set semantics, interned terms, SPO/POS/OSP indexes.

Terms and triples are immutable values. The canonical text form of a triple
is one N-Triples line (``<s> <p> <o> .``), which is also the unit of the
persistence log and of full-store dumps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .errors import ParseError, TermError

XSD = "http://www.w3.org/2001/XMLSchema#"
XSD_STRING = XSD + "string"
XSD_DECIMAL = XSD + "decimal"
XSD_INTEGER = XSD + "integer"
XSD_BOOLEAN = XSD + "boolean"

#: Literal datatypes accepted anywhere in the store. Anything else is a
#: parse/construction-time error.
SUPPORTED_DATATYPES = frozenset({XSD_STRING, XSD_DECIMAL, XSD_INTEGER, XSD_BOOLEAN})


@dataclass(frozen=True, slots=True)
class Iri:
    """An IRI reference. Must be non-empty and contain no whitespace."""

    text: str

    def __post_init__(self) -> None:
        if not self.text or any(c.isspace() for c in self.text):
            raise TermError(f"invalid IRI: {self.text!r}")
        if "<" in self.text or ">" in self.text or '"' in self.text:
            raise TermError(f"IRI contains a forbidden character: {self.text!r}")


@dataclass(frozen=True, slots=True)
class Literal:
    """A typed literal. The lexical form is preserved bit-exactly."""

    lexical: str
    datatype: str = XSD_STRING

    def __post_init__(self) -> None:
        if self.datatype not in SUPPORTED_DATATYPES:
            raise TermError(f"unsupported literal datatype: {self.datatype}")

    def as_float(self) -> float:
        """Numeric value at 64-bit precision (decimal/integer literals)."""
        return float(self.lexical)


@dataclass(frozen=True, slots=True)
class BlankNode:
    """A blank node with a local label."""

    label: str

    def __post_init__(self) -> None:
        if not self.label or any(c.isspace() for c in self.label):
            raise TermError(f"invalid blank node label: {self.label!r}")


Term = Union[Iri, Literal, BlankNode]
Subject = Union[Iri, BlankNode]


def string_literal(value: str) -> Literal:
    return Literal(value, XSD_STRING)


def decimal_literal(value: float) -> Literal:
    """Decimal literal whose lexical form is the shortest round-trip repr."""
    return Literal(repr(float(value)), XSD_DECIMAL)


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape_lexical(text: str) -> str:
    out = []
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def term_text(term: Term) -> str:
    """Canonical N-Triples text of a single term."""
    if isinstance(term, Iri):
        return f"<{term.text}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    quoted = f'"{_escape_lexical(term.lexical)}"'
    if term.datatype == XSD_STRING:
        return quoted
    return f"{quoted}^^<{term.datatype}>"


@dataclass(frozen=True, slots=True)
class Triple:
    """A subject-predicate-object fact. Subject is never a literal,
    predicate is always an IRI."""

    subject: Subject
    predicate: Iri
    object: Term

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise TermError("triple subject cannot be a literal")
        if not isinstance(self.subject, (Iri, BlankNode)):
            raise TermError(f"triple subject must be an IRI or blank node, got {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            raise TermError(f"triple predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (Iri, Literal, BlankNode)):
            raise TermError(f"triple object is not a term: {self.object!r}")


def triple_line(t: Triple) -> str:
    """One canonical N-Triples line, without the trailing newline."""
    return f"{term_text(t.subject)} {term_text(t.predicate)} {term_text(t.object)} ."


def triple_sort_key(t: Triple) -> tuple[str, str, str]:
    return (term_text(t.subject), term_text(t.predicate), term_text(t.object))


class _LineScanner:
    """Strict scanner for one canonical N-Triples line."""

    def __init__(self, line: str):
        self.line = line
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(f"{message} in N-Triples line {self.line!r}", 1, self.pos + 1)

    def skip_ws(self) -> None:
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def _iri(self) -> Iri:
        end = self.line.find(">", self.pos)
        if end < 0:
            raise self.error("unterminated IRI")
        text = self.line[self.pos + 1 : end]
        self.pos = end + 1
        try:
            return Iri(text)
        except TermError as exc:
            raise self.error(str(exc)) from exc

    def _blank(self) -> BlankNode:
        self.pos += 2
        start = self.pos
        while self.pos < len(self.line) and not self.line[self.pos].isspace():
            self.pos += 1
        try:
            return BlankNode(self.line[start : self.pos])
        except TermError as exc:
            raise self.error(str(exc)) from exc

    def _literal(self) -> Literal:
        self.pos += 1
        out = []
        while True:
            if self.pos >= len(self.line):
                raise self.error("unterminated literal")
            ch = self.line[self.pos]
            if ch == '"':
                self.pos += 1
                break
            if ch == "\\":
                out.append(self._escape())
            else:
                out.append(ch)
                self.pos += 1
        lexical = "".join(out)
        datatype = XSD_STRING
        if self.line.startswith("^^", self.pos):
            self.pos += 2
            if self.pos >= len(self.line) or self.line[self.pos] != "<":
                raise self.error("expected <datatype IRI> after ^^")
            datatype = self._iri().text
        try:
            return Literal(lexical, datatype)
        except TermError as exc:
            raise self.error(str(exc)) from exc

    def _escape(self) -> str:
        simple = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}
        code = self.line[self.pos + 1] if self.pos + 1 < len(self.line) else ""
        if code in simple:
            self.pos += 2
            return simple[code]
        if code in ("u", "U"):
            width = 4 if code == "u" else 8
            digits = self.line[self.pos + 2 : self.pos + 2 + width]
            if len(digits) != width:
                raise self.error("truncated \\u escape")
            try:
                value = int(digits, 16)
            except ValueError as exc:
                raise self.error("bad \\u escape") from exc
            self.pos += 2 + width
            return chr(value)
        raise self.error(f"unknown escape \\{code}")

    def term(self, *, allow_literal: bool) -> Term:
        self.skip_ws()
        if self.pos >= len(self.line):
            raise self.error("unexpected end of line")
        ch = self.line[self.pos]
        if ch == "<":
            return self._iri()
        if self.line.startswith("_:", self.pos):
            return self._blank()
        if ch == '"':
            if not allow_literal:
                raise self.error("literal not allowed in this position")
            return self._literal()
        raise self.error(f"unexpected character {ch!r}")


def parse_triple_line(line: str) -> Triple:
    """Parse one N-Triples line (inverse of :func:`triple_line`)."""
    scanner = _LineScanner(line)
    subject = scanner.term(allow_literal=False)
    predicate = scanner.term(allow_literal=False)
    if not isinstance(predicate, Iri):
        raise scanner.error("predicate must be an IRI")
    obj = scanner.term(allow_literal=True)
    scanner.skip_ws()
    if scanner.pos >= len(scanner.line) or scanner.line[scanner.pos] != ".":
        raise scanner.error("expected terminating '.'")
    scanner.pos += 1
    scanner.skip_ws()
    if scanner.pos != len(scanner.line):
        raise scanner.error("trailing content after '.'")
    return Triple(subject, predicate, obj)  # type: ignore[arg-type]


class TripleStore:
    """Set of triples with three-way indexing.

    All IRIs and literals are interned to integer ids; the canonical text
    of every term is recoverable bit-exactly. A single writer may mutate a
    store; concurrent readers are safe between mutations.
    """

    __slots__ = ("_terms", "_ids", "_triples", "_spo", "_pos", "_osp", "_subject_seq", "_next_seq")

    def __init__(self) -> None:
        self._terms: list[Term] = []
        self._ids: dict[Term, int] = {}
        self._triples: set[tuple[int, int, int]] = set()
        self._spo: dict[int, dict[int, set[int]]] = {}
        self._pos: dict[int, dict[int, set[int]]] = {}
        self._osp: dict[int, dict[int, set[int]]] = {}
        # first-seen order of subjects, kept so callers can reconstruct
        # insertion order after a replay from disk
        self._subject_seq: dict[int, int] = {}
        self._next_seq = 0

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, t: Triple) -> bool:
        key = self._key_of(t)
        return key is not None and key in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self._materialize(self._triples), key=triple_sort_key))

    def triples(self) -> list[Triple]:
        """All triples in arbitrary order (cheaper than sorted iteration)."""
        return self._materialize(self._triples)

    def _intern(self, term: Term) -> int:
        tid = self._ids.get(term)
        if tid is None:
            tid = len(self._terms)
            self._terms.append(term)
            self._ids[term] = tid
        return tid

    def _key_of(self, t: Triple) -> Optional[tuple[int, int, int]]:
        s = self._ids.get(t.subject)
        p = self._ids.get(t.predicate)
        o = self._ids.get(t.object)
        if s is None or p is None or o is None:
            return None
        return (s, p, o)

    def insert(self, t: Triple) -> bool:
        """Add ``t``; returns False when it was already present."""
        key = (self._intern(t.subject), self._intern(t.predicate), self._intern(t.object))
        if key in self._triples:
            return False
        s, p, o = key
        self._triples.add(key)
        self._spo.setdefault(s, {}).setdefault(p, set()).add(o)
        self._pos.setdefault(p, {}).setdefault(o, set()).add(s)
        self._osp.setdefault(o, {}).setdefault(s, set()).add(p)
        if s not in self._subject_seq:
            self._subject_seq[s] = self._next_seq
            self._next_seq += 1
        return True

    def delete(self, t: Triple) -> bool:
        """Remove ``t``; returns False when it was absent."""
        key = self._key_of(t)
        if key is None or key not in self._triples:
            return False
        s, p, o = key
        self._triples.discard(key)
        self._drop(self._spo, s, p, o)
        self._drop(self._pos, p, o, s)
        self._drop(self._osp, o, s, p)
        if s not in self._spo:
            self._subject_seq.pop(s, None)
        return True

    @staticmethod
    def _drop(index: dict[int, dict[int, set[int]]], a: int, b: int, c: int) -> None:
        level = index[a]
        bucket = level[b]
        bucket.discard(c)
        if not bucket:
            del level[b]
        if not level:
            del index[a]

    def match(
        self,
        subject: Optional[Term] = None,
        predicate: Optional[Term] = None,
        object: Optional[Term] = None,
    ) -> list[Triple]:
        """Triples agreeing with every bound position, in canonical order."""
        bound: list[Optional[int]] = []
        for term in (subject, predicate, object):
            if term is None:
                bound.append(None)
            else:
                tid = self._ids.get(term)
                if tid is None:
                    return []
                bound.append(tid)
        keys = self._match_ids(*bound)
        return sorted(self._materialize(keys), key=triple_sort_key)

    def _match_ids(self, s, p, o) -> list[tuple[int, int, int]]:
        if s is not None and p is not None and o is not None:
            return [(s, p, o)] if (s, p, o) in self._triples else []
        if s is not None and p is not None:
            return [(s, p, oo) for oo in self._spo.get(s, {}).get(p, ())]
        if p is not None and o is not None:
            return [(ss, p, o) for ss in self._pos.get(p, {}).get(o, ())]
        if s is not None and o is not None:
            return [(s, pp, o) for pp in self._osp.get(o, {}).get(s, ())]
        if s is not None:
            return [(s, pp, oo) for pp, objs in self._spo.get(s, {}).items() for oo in objs]
        if p is not None:
            return [(ss, p, oo) for oo, subs in self._pos.get(p, {}).items() for ss in subs]
        if o is not None:
            return [(ss, pp, o) for ss, preds in self._osp.get(o, {}).items() for pp in preds]
        return list(self._triples)

    def _materialize(self, keys) -> list[Triple]:
        terms = self._terms
        return [Triple(terms[s], terms[p], terms[o]) for s, p, o in keys]  # type: ignore[arg-type]

    def subjects_first_seen(self) -> list[Subject]:
        """Current subjects ordered by when they first gained a triple."""
        ordered = sorted(self._subject_seq.items(), key=lambda kv: kv[1])
        return [self._terms[tid] for tid, _ in ordered]  # type: ignore[misc]

    def dump_ntriples(self) -> str:
        """Canonical full-store dump: sorted N-Triples lines, LF-terminated."""
        return "".join(triple_line(t) + "\n" for t in self)
