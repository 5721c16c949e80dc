"""Independent oracles and generators used across the test suite.

Everything here deliberately avoids the indexed/fast paths it checks:
naive list scans, nested-loop joins, a standalone reification sweep, and
minimal GML/GraphML/DOT readers.
"""

from __future__ import annotations

import random
import re
import xml.etree.ElementTree as ET
from typing import Optional

from causalkg.graph import Graph
from causalkg.ontology import (
    CAUSAL_EDGE,
    CAUSAL_NODE,
    CREATOR,
    EVENT,
    HAS_CAUSE,
    HAS_CONFIDENCE,
    HAS_EFFECT,
    HAS_TIME_LAG,
    IS_AFFECTED_BY,
    IS_CAUSING,
    STATE,
    VARIABLE,
)
from causalkg.query import QueryAst, Variable
from causalkg.rdf import Iri, Literal, Term, Triple, term_text
from causalkg.turtle import RDF_TYPE

_TYPE = Iri(RDF_TYPE)
_CAUSAL_NODE_TYPES = {CAUSAL_NODE, STATE, EVENT, VARIABLE}


# -- naive triple matching ------------------------------------------------------


def naive_match(triples, subject=None, predicate=None, object=None) -> list[Triple]:
    """Reference list-scan implementation of TripleStore.match."""
    hits = [
        t
        for t in triples
        if (subject is None or t.subject == subject)
        and (predicate is None or t.predicate == predicate)
        and (object is None or t.object == object)
    ]
    return sorted(hits, key=lambda t: (term_text(t.subject), term_text(t.predicate), term_text(t.object)))


# -- nested-loop query evaluation ------------------------------------------------


def reference_eval(triples, ast: QueryAst) -> list[dict[str, Term]]:
    """Nested-loop join over a plain triple list; mirrors the documented
    result semantics without using the store indexes."""

    def unify(pattern, triple, binding) -> Optional[dict]:
        out = dict(binding)
        for slot, value in zip(
            (pattern.subject, pattern.predicate, pattern.object),
            (triple.subject, triple.predicate, triple.object),
        ):
            if isinstance(slot, Variable):
                if slot.name in out:
                    if out[slot.name] != value:
                        return None
                else:
                    out[slot.name] = value
            elif slot != value:
                return None
        return out

    bindings = [{}]
    for pattern in ast.patterns:
        bindings = [m for b in bindings for t in triples if (m := unify(pattern, t, b)) is not None]
    for comparison in ast.filters:
        bindings = [b for b in bindings if comparison.holds(b[comparison.var])]
    rows = {tuple(b[v] for v in ast.select_vars) for b in bindings}
    ordered = sorted(rows, key=lambda row: tuple(term_text(t) for t in row))
    if ast.limit is not None:
        ordered = ordered[: ast.limit]
    return [dict(zip(ast.select_vars, row)) for row in ordered]


# -- standalone reification sweep -------------------------------------------------


def sweep_reification(store) -> list[str]:
    """Single-pass check of the global reification invariant, independent of
    the Graph implementation. Returns human-readable violations."""
    type_of: dict[str, set[str]] = {}
    causes: dict[str, list[Term]] = {}
    effects: dict[str, list[Term]] = {}
    is_causing: set[tuple[str, str]] = set()
    is_affected: set[tuple[str, str]] = set()
    confidences: list[tuple[str, Term]] = []
    lags: list[tuple[str, Term]] = []

    for t in store.triples():
        if not isinstance(t.subject, Iri):
            continue
        s = t.subject.text
        p = t.predicate.text
        if p == RDF_TYPE and isinstance(t.object, Iri):
            type_of.setdefault(s, set()).add(t.object.text)
        elif p == HAS_CAUSE:
            causes.setdefault(s, []).append(t.object)
        elif p == HAS_EFFECT:
            effects.setdefault(s, []).append(t.object)
        elif p == IS_CAUSING and isinstance(t.object, Iri):
            is_causing.add((s, t.object.text))
        elif p == IS_AFFECTED_BY and isinstance(t.object, Iri):
            is_affected.add((s, t.object.text))
        elif p == HAS_CONFIDENCE:
            confidences.append((s, t.object))
        elif p == HAS_TIME_LAG:
            lags.append((s, t.object))

    violations = []
    edges = {s for s, types in type_of.items() if CAUSAL_EDGE in types}
    for edge in edges:
        edge_causes = causes.get(edge, [])
        edge_effects = effects.get(edge, [])
        if len(edge_causes) != 1:
            violations.append(f"{edge}: {len(edge_causes)} hasCause")
        if len(edge_effects) != 1:
            violations.append(f"{edge}: {len(edge_effects)} hasEffect")
        for term in edge_causes:
            if not isinstance(term, Iri):
                violations.append(f"{edge}: non-IRI cause")
            else:
                if not (_CAUSAL_NODE_TYPES & type_of.get(term.text, set())):
                    violations.append(f"{edge}: cause {term.text} not a CausalNode")
                if (term.text, edge) not in is_causing:
                    violations.append(f"{edge}: missing isCausing mirror")
        for term in edge_effects:
            if not isinstance(term, Iri):
                violations.append(f"{edge}: non-IRI effect")
            else:
                if not (_CAUSAL_NODE_TYPES & type_of.get(term.text, set())):
                    violations.append(f"{edge}: effect {term.text} not a CausalNode")
                if (term.text, edge) not in is_affected:
                    violations.append(f"{edge}: missing isAffectedBy mirror")
    for node, edge in is_causing:
        if edge not in edges:
            violations.append(f"isCausing points at non-edge {edge}")
        elif not any(isinstance(c, Iri) and c.text == node for c in causes.get(edge, [])):
            violations.append(f"isCausing {node} lacks matching hasCause")
    for node, edge in is_affected:
        if edge not in edges:
            violations.append(f"isAffectedBy points at non-edge {edge}")
        elif not any(isinstance(e, Iri) and e.text == node for e in effects.get(edge, [])):
            violations.append(f"isAffectedBy {node} lacks matching hasEffect")
    for subject, term in confidences:
        if not isinstance(term, Literal) or not 0 < float(term.lexical) <= 1:
            violations.append(f"{subject}: confidence out of range")
    for subject, term in lags:
        if not isinstance(term, Literal) or float(term.lexical) < 0:
            violations.append(f"{subject}: negative lag")
    return violations


# -- random causal graph traces ------------------------------------------------


def random_graph_trace(rng: random.Random, graph: Graph, max_nodes: int = 30, max_edges: int = 60,
                       on_step=None) -> None:
    """Drive a graph through a random mutation sequence within the size
    bounds, invoking ``on_step`` after every mutation."""
    nodes: list[str] = []
    edges: list[str] = []
    node_seq = 0
    edge_seq = 0

    def step() -> None:
        if on_step is not None:
            on_step()

    def random_metadata() -> dict:
        meta = {}
        if rng.random() < 0.6:
            meta["confidence"] = round(rng.uniform(0.01, 1.0), 3)
        if rng.random() < 0.6:
            meta["time_lag_s"] = round(rng.uniform(0.0, 50.0), 3)
        if rng.random() < 0.3:
            meta["comment"] = [f"note {rng.randrange(1000)}"]
        if rng.random() < 0.2:
            meta["creator"] = f"agent{rng.randrange(3)}"
        return meta

    target_ops = rng.randrange(20, 90)
    for _ in range(target_ops):
        roll = rng.random()
        if roll < 0.35 and len(nodes) < max_nodes:
            node_seq += 1
            name = f"n{node_seq}"
            comment = [f"c{rng.randrange(100)}"] if rng.random() < 0.3 else None
            creator = f"agent{rng.randrange(3)}" if rng.random() < 0.15 else None
            graph.add_causal_node(name, comment=comment, creator=creator)
            nodes.append(name)
            step()
        elif roll < 0.75 and len(nodes) >= 2 and len(edges) < max_edges:
            cause, effect = rng.sample(nodes, 2)
            edge_seq += 1
            name = f"e{edge_seq}"
            graph.add_causal_edge(cause, effect, name, force_create=False, **random_metadata())
            edges.append(name)
            step()
        elif roll < 0.8 and edges and rng.random() < 0.7:
            # metadata upsert on an existing edge
            name = rng.choice(edges)
            record = graph.get_edge_record(name)
            graph.add_causal_edge(record.cause, record.effect, name, **random_metadata())
            step()
        elif roll < 0.88 and edges:
            name = rng.choice(edges)
            graph.remove_causal_edge_by_name(name)
            edges.remove(name)
            step()
        elif roll < 0.93 and nodes and rng.random() < 0.5:
            name = rng.choice(nodes)
            graph.remove_causal_node(name)
            nodes.remove(name)
            edges[:] = [e for e in edges if graph.get_entity_by_name(e) is not None]
            step()
        elif nodes:
            name = rng.choice(nodes)
            graph.remove_causal_edges_of_node(name)
            edges[:] = [e for e in edges if graph.get_entity_by_name(e) is not None]
            step()


# -- minimal GML reader -----------------------------------------------------------


def _gml_unescape(text: str) -> str:
    text = re.sub(r"&#(\d+);", lambda m: chr(int(m.group(1))), text)
    return text.replace("&quot;", '"').replace("&amp;", "&")


def parse_gml(text: str) -> dict:
    """Tiny GML reader: returns {'nodes': [attrs...], 'edges': [attrs...]}."""
    tokens = re.findall(r'"[^"]*"|\[|\]|[^\s\[\]]+', text)
    pos = 0

    def parse_block() -> dict:
        nonlocal pos
        block: dict = {}
        while pos < len(tokens):
            token = tokens[pos]
            if token == "]":
                pos += 1
                return block
            key = token
            pos += 1
            value = tokens[pos]
            pos += 1
            if value == "[":
                block.setdefault(key, []).append(parse_block())
            elif value.startswith('"'):
                block[key] = _gml_unescape(value[1:-1])
            else:
                try:
                    block[key] = int(value)
                except ValueError:
                    block[key] = float(value)
        return block

    assert tokens[0] == "graph" and tokens[1] == "["
    pos = 2
    top = parse_block()
    return {"nodes": top.get("node", []), "edges": top.get("edge", [])}


# -- minimal GraphML reader ---------------------------------------------------------


def parse_graphml(text: str) -> dict:
    """GraphML reader over ElementTree; returns node/edge dicts with data."""
    ns = {"g": "http://graphml.graphdrawing.org/xmlns"}
    root = ET.fromstring(text)
    keys = {}
    for key in root.findall("g:key", ns):
        keys[key.get("id")] = key.get("attr.name")
    graph = root.find("g:graph", ns)
    assert graph is not None and graph.get("edgedefault") == "directed"
    nodes = []
    for node in graph.findall("g:node", ns):
        attrs = {"id": node.get("id")}
        for data in node.findall("g:data", ns):
            attrs[keys[data.get("key")]] = data.text or ""
        nodes.append(attrs)
    edges = []
    for edge in graph.findall("g:edge", ns):
        attrs = {"source": edge.get("source"), "target": edge.get("target")}
        for data in edge.findall("g:data", ns):
            attrs[keys[data.get("key")]] = data.text or ""
        edges.append(attrs)
    return {"nodes": nodes, "edges": edges}


# -- minimal DOT grammar check ---------------------------------------------------------


def check_dot(text: str) -> None:
    """Raises AssertionError unless ``text`` is a well-formed digraph in the
    subset this project emits."""
    token_re = re.compile(r'"(?:[^"\\]|\\.)*"|->|[{}\[\];=,]|[A-Za-z0-9_.]+')
    stripped = text.strip()
    tokens = token_re.findall(stripped)
    assert "".join(token_re.split(stripped)).strip() == "", "unlexable characters in DOT"
    pos = 0

    def take(expected=None):
        nonlocal pos
        assert pos < len(tokens), "unexpected end of DOT"
        token = tokens[pos]
        pos += 1
        if expected is not None:
            assert token == expected, f"expected {expected!r}, got {token!r}"
        return token

    def is_id(token: str) -> bool:
        return token.startswith('"') or re.fullmatch(r"[A-Za-z0-9_.]+", token) is not None

    def attr_list() -> None:
        take("[")
        while True:
            name = take()
            assert is_id(name), f"bad attribute name {name!r}"
            take("=")
            value = take()
            assert is_id(value), f"bad attribute value {value!r}"
            token = take()
            if token == "]":
                return
            assert token == ",", f"expected ',' or ']', got {token!r}"

    take("digraph")
    if tokens[pos] != "{":
        assert is_id(take()), "bad digraph name"
    take("{")
    while tokens[pos] != "}":
        first = take()
        assert is_id(first), f"bad statement start {first!r}"
        token = tokens[pos]
        if token == "=":  # ID '=' ID ';'
            take("=")
            assert is_id(take())
        elif token == "->":
            take("->")
            assert is_id(take()), "bad edge target"
            if tokens[pos] == "[":
                attr_list()
        elif token == "[":
            attr_list()
        take(";")
    take("}")
    assert pos == len(tokens), "trailing tokens after closing brace"


# -- HTML island extraction --------------------------------------------------------


def extract_island(html: str) -> str:
    marker = '<script type="application/json" id="cg-data">\n'
    start = html.index(marker) + len(marker)
    end = html.index("</script>", start)
    return html[start:end]
