"""Import/export bridges: lossless property-graph documents, lossy link
tuples, GML/GraphML emission, and full N-Triples dumps.

The property-graph document captures every individual, type and property
assertion so a load reproduces a byte-identical canonical dump. The link
tuple keeps only structure, confidence and lag steps.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union
from xml.sax.saxutils import escape as xml_escape

from .errors import GraphError
from .graph import Graph
from .ontology import (
    CAUSAL_EDGE,
    CAUSAL_NODE,
    COMMENT,
    CREATED,
    CREATOR,
    HAS_CAUSE,
    HAS_CONFIDENCE,
    HAS_CREATOR,
    HAS_EFFECT,
    HAS_TIME_LAG,
    IS_AFFECTED_BY,
    IS_CAUSING,
    OntologyModel,
    is_individual_iri,
    iri_to_name,
    name_to_iri,
)
from .rdf import (
    XSD_BOOLEAN,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Iri,
    Literal,
    Term,
    Triple,
    decimal_literal,
    parse_triple_line,
    string_literal,
    triple_line,
)
from .turtle import RDF_TYPE, ParsedOntology

_TYPE = Iri(RDF_TYPE)

# individual-subject predicates that the structured document fields cover;
# everything else on an individual is exported under its property IRI
_STRUCTURED_PREDICATES = {
    RDF_TYPE,
    COMMENT,
    HAS_CREATOR,
    CREATED,
    HAS_CAUSE,
    HAS_EFFECT,
    IS_CAUSING,
    IS_AFFECTED_BY,
    HAS_CONFIDENCE,
    HAS_TIME_LAG,
}


def canonical_json(payload) -> str:
    """Deterministic, diff- and HTML-embedding-friendly JSON text."""
    text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)
    # '<', '>' and '&' only occur inside JSON strings; escaping them keeps
    # the text safe to inline into a <script> data island byte-identically
    text = text.replace("&", "\\u0026").replace("<", "\\u003c").replace(">", "\\u003e")
    return text + "\n"


@dataclass
class PropertyGraphNode:
    name: str
    types: list[str]
    props: dict = field(default_factory=dict)


@dataclass
class PropertyGraphEdge:
    name: str
    cause: str
    effect: str
    props: dict = field(default_factory=dict)


@dataclass
class PropertyGraphDoc:
    """Lossless snapshot of a graph as a property-graph document."""

    nodes: list[PropertyGraphNode] = field(default_factory=list)
    edges: list[PropertyGraphEdge] = field(default_factory=list)
    ontology_extras: list[str] = field(default_factory=list)  # canonical N-Triples lines

    def to_dict(self) -> dict:
        return {
            "nodes": [{"name": n.name, "types": list(n.types), "props": n.props} for n in self.nodes],
            "edges": [
                {"name": e.name, "cause": e.cause, "effect": e.effect, "props": e.props}
                for e in self.edges
            ],
            "ontology_extras": list(self.ontology_extras),
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, payload: dict) -> "PropertyGraphDoc":
        try:
            nodes = [
                PropertyGraphNode(str(n["name"]), [str(t) for t in n["types"]], dict(n.get("props", {})))
                for n in payload["nodes"]
            ]
            edges = [
                PropertyGraphEdge(
                    str(e["name"]), str(e["cause"]), str(e["effect"]), dict(e.get("props", {}))
                )
                for e in payload["edges"]
            ]
            extras = [str(line) for line in payload.get("ontology_extras", [])]
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed property-graph document: {exc}") from exc
        doc = cls(nodes, edges, extras)
        doc.validate()
        return doc

    @classmethod
    def from_json(cls, text: str) -> "PropertyGraphDoc":
        return cls.from_dict(json.loads(text))

    def validate(self) -> None:
        names: set[str] = set()
        for node in self.nodes:
            if node.name in names:
                raise GraphError(f"duplicate individual name {node.name!r} in document")
            names.add(node.name)
            if not node.types:
                raise GraphError(f"individual {node.name!r} has no types")
        node_names = set(names)
        for edge in self.edges:
            if edge.name in names:
                raise GraphError(f"duplicate individual name {edge.name!r} in document")
            names.add(edge.name)
            for endpoint in (edge.cause, edge.effect):
                if endpoint not in node_names:
                    raise GraphError(f"edge {edge.name!r} references unlisted node {endpoint!r}")


@dataclass
class LinkTupleDoc:
    """Lossy projection: variables, directed links with lag steps and
    confidence, and the time step size in seconds."""

    variables: list[str]
    links: list[tuple[int, int, int, float]]  # (cause_idx, effect_idx, lag_steps, confidence)
    step_s: float = 1.0

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "links": [[c, e, lag, conf] for c, e, lag, conf in self.links],
            "step_s": self.step_s,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, payload: dict) -> "LinkTupleDoc":
        try:
            variables = [str(v) for v in payload["variables"]]
            links = [(int(c), int(e), int(lag), float(conf)) for c, e, lag, conf in payload["links"]]
            step_s = float(payload.get("step_s", 1.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed link-tuple document: {exc}") from exc
        doc = cls(variables, links, step_s)
        doc.validate()
        return doc

    @classmethod
    def from_json(cls, text: str) -> "LinkTupleDoc":
        return cls.from_dict(json.loads(text))

    def validate(self) -> None:
        if self.step_s <= 0:
            raise GraphError(f"step_s must be > 0, got {self.step_s!r}")
        if len(set(self.variables)) != len(self.variables):
            raise GraphError("duplicate variable names in link-tuple document")
        for c, e, lag, conf in self.links:
            if not (0 <= c < len(self.variables) and 0 <= e < len(self.variables)):
                raise GraphError(f"link index out of range: ({c}, {e})")
            if lag < 0:
                raise GraphError(f"negative lag_steps in link ({c}, {e})")
            if not 0 < conf <= 1:
                raise GraphError(f"confidence out of (0, 1] in link ({c}, {e})")


# -- property graph export ---------------------------------------------------


def _encode_value(term: Term):
    if isinstance(term, Literal):
        if term.datatype == XSD_STRING:
            return term.lexical
        if term.datatype == XSD_BOOLEAN:
            return term.lexical == "true"
        if term.datatype == XSD_INTEGER:
            return int(term.lexical)
        return float(term.lexical)
    if isinstance(term, Iri) and is_individual_iri(term.text):
        return {"name": iri_to_name(term.text)}
    if isinstance(term, Iri):
        return {"iri": term.text}
    return {"blank": term.label}


def _decode_value(value) -> Term:
    if isinstance(value, dict):
        if "name" in value:
            return Iri(name_to_iri(str(value["name"])))
        if "iri" in value:
            return Iri(str(value["iri"]))
        if "blank" in value:
            return BlankNode(str(value["blank"]))
        raise GraphError(f"unrecognized property value object: {value!r}")
    if isinstance(value, bool):
        return Literal("true" if value else "false", XSD_BOOLEAN)
    if isinstance(value, str):
        return Literal(value, XSD_STRING)
    if isinstance(value, int):
        return Literal(str(value), XSD_INTEGER)
    if isinstance(value, float):
        return decimal_literal(value)
    raise GraphError(f"unsupported property value {value!r}")


def _individual_props(graph: Graph, subject: Iri) -> dict:
    props: dict = {}
    comments = sorted(
        t.object.lexical
        for t in graph.store.match(subject, Iri(COMMENT), None)
        if isinstance(t.object, Literal)
    )
    if comments:
        props["comments"] = comments
    creators = graph.store.match(subject, Iri(HAS_CREATOR), None)
    if creators and isinstance(creators[0].object, Iri):
        props["creator"] = iri_to_name(creators[0].object.text)
    for t in graph.store.match(subject, None, None):
        predicate = t.predicate.text
        if predicate in _STRUCTURED_PREDICATES:
            continue
        props.setdefault(predicate, []).append(_encode_value(t.object))
    for key, values in props.items():
        if isinstance(values, list) and key not in ("comments",):
            props[key] = sorted(values, key=lambda v: json.dumps(v, sort_keys=True))
    return props


def export_property_graph(graph: Graph) -> PropertyGraphDoc:
    """Full-fidelity snapshot; composing with load reproduces the graph."""
    doc = PropertyGraphDoc()
    individual_iris: set[str] = set()
    for individual in graph.individuals():
        individual_iris.add(individual.iri)
        subject = Iri(individual.iri)
        props = _individual_props(graph, subject)
        if CAUSAL_EDGE in individual.types:
            record = graph.get_edge_record(individual.name)
            if record.confidence is not None:
                props["confidence"] = record.confidence
            if record.time_lag_s is not None:
                props["time_lag_s"] = record.time_lag_s
            doc.edges.append(
                PropertyGraphEdge(individual.name, record.cause, record.effect, props)
            )
        else:
            doc.nodes.append(
                PropertyGraphNode(individual.name, list(individual.types), props)
            )
    doc.ontology_extras = sorted(
        triple_line(t)
        for t in graph.store
        if not (isinstance(t.subject, Iri) and t.subject.text in individual_iris)
    )
    return doc


def populate_graph(graph: Graph, source) -> None:
    """Fill an empty graph from a document (object, dict, JSON text, or path)."""
    doc = _coerce_doc(source)
    if isinstance(doc, PropertyGraphDoc):
        _fill_from_property_graph(graph, doc)
    else:
        _fill_from_link_tuple(graph, doc)


def _coerce_doc(source) -> Union[PropertyGraphDoc, LinkTupleDoc]:
    if isinstance(source, (PropertyGraphDoc, LinkTupleDoc)):
        source.validate()
        return source
    if isinstance(source, dict):
        return _doc_from_payload(source)
    if isinstance(source, (str, Path)):
        path = Path(source)
        if path.exists():
            return _doc_from_payload(json.loads(path.read_text(encoding="utf-8")))
        if isinstance(source, str) and source.lstrip().startswith("{"):
            return _doc_from_payload(json.loads(source))
        raise GraphError(f"external graph file not found: {source}")
    raise GraphError(f"unsupported external graph source: {type(source).__name__}")


def _doc_from_payload(payload: dict) -> Union[PropertyGraphDoc, LinkTupleDoc]:
    if "nodes" in payload and "edges" in payload:
        return PropertyGraphDoc.from_dict(payload)
    if "variables" in payload and "links" in payload:
        return LinkTupleDoc.from_dict(payload)
    raise GraphError("document is neither a property graph nor a link tuple")


def _fill_from_property_graph(graph: Graph, doc: PropertyGraphDoc) -> None:
    doc.validate()
    extras = [parse_triple_line(line) for line in doc.ontology_extras]
    model, _, _ = OntologyModel.builtin().merged_with(
        ParsedOntology(prefixes={}, triples=extras), source="document"
    )

    asserts: list[Triple] = list(extras)
    node_types: dict[str, set[str]] = {}
    for node in doc.nodes:
        subject = Iri(name_to_iri(node.name))
        for class_iri in node.types:
            if not model.is_class(class_iri):
                raise GraphError(f"node {node.name!r} has unknown type {class_iri}")
            asserts.append(Triple(subject, _TYPE, Iri(class_iri)))
        node_types[node.name] = set(node.types)
        _decode_props(graph, model, subject, node.props, asserts)

    for edge in doc.edges:
        subject = Iri(name_to_iri(edge.name))
        cause = Iri(name_to_iri(edge.cause))
        effect = Iri(name_to_iri(edge.effect))
        if edge.cause == edge.effect:
            raise GraphError(f"edge {edge.name!r} is a self-loop")
        asserts.append(Triple(subject, _TYPE, Iri(CAUSAL_EDGE)))
        asserts.append(Triple(subject, Iri(HAS_CAUSE), cause))
        asserts.append(Triple(subject, Iri(HAS_EFFECT), effect))
        asserts.append(Triple(cause, Iri(IS_CAUSING), subject))
        asserts.append(Triple(effect, Iri(IS_AFFECTED_BY), subject))
        for endpoint in (edge.cause, edge.effect):
            types = node_types[endpoint]
            if not any(model.is_subclass(t, CAUSAL_NODE) for t in types):
                asserts.append(Triple(Iri(name_to_iri(endpoint)), _TYPE, Iri(CAUSAL_NODE)))
                types.add(CAUSAL_NODE)
        props = dict(edge.props)
        confidence = props.pop("confidence", None)
        time_lag_s = props.pop("time_lag_s", None)
        if confidence is not None:
            if not 0 < float(confidence) <= 1:
                raise GraphError(f"edge {edge.name!r}: confidence out of (0, 1]")
            asserts.append(Triple(subject, Iri(HAS_CONFIDENCE), decimal_literal(float(confidence))))
        if time_lag_s is not None:
            if float(time_lag_s) < 0:
                raise GraphError(f"edge {edge.name!r}: negative time lag")
            asserts.append(Triple(subject, Iri(HAS_TIME_LAG), decimal_literal(float(time_lag_s))))
        _decode_props(graph, model, subject, props, asserts)

    graph.commit(asserts)
    graph.model = model


def _decode_props(graph: Graph, model: OntologyModel, subject: Iri, props: dict, asserts: list[Triple]) -> None:
    for key, value in props.items():
        if key in ("confidence", "time_lag_s"):
            raise GraphError(f"{key} is not valid on a node entry")
        if key == "comments":
            for text in value:
                asserts.append(Triple(subject, Iri(COMMENT), string_literal(str(text))))
            continue
        if key == "creator":
            creator_iri = Iri(name_to_iri(str(value)))
            asserts.append(Triple(creator_iri, _TYPE, Iri(CREATOR)))
            asserts.append(Triple(subject, Iri(HAS_CREATOR), creator_iri))
            asserts.append(Triple(creator_iri, Iri(CREATED), subject))
            continue
        if key not in model.properties:
            raise GraphError(f"undeclared property {key!r} in document props")
        for item in value if isinstance(value, list) else [value]:
            asserts.append(Triple(subject, Iri(key), _decode_value(item)))


def load_property_graph(
    doc: Union[PropertyGraphDoc, dict],
    new_store_path=None,
    *,
    overwrite: bool = False,
    **graph_kwargs,
) -> Graph:
    """Create a NEW graph from a document; the source graph is untouched."""
    if isinstance(doc, dict):
        doc = PropertyGraphDoc.from_dict(doc)
    _check_target(new_store_path, overwrite)
    graph = Graph(new_store_path, **graph_kwargs)
    _fill_from_property_graph(graph, doc)
    return graph


def _check_target(new_store_path, overwrite: bool) -> None:
    if new_store_path is None:
        return
    path = Path(new_store_path)
    if path.exists():
        if not overwrite:
            raise GraphError(f"refusing to load into existing store {path} (pass overwrite)")
        path.unlink()


# -- link tuple ---------------------------------------------------------------


def _round_half_away_from_zero(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def export_link_tuple(graph: Graph, step_s: float = 1.0) -> tuple[LinkTupleDoc, list[str]]:
    """Structure-only projection. Absent confidence exports as 1.0 and
    absent lag as 0 steps; returns (doc, warnings)."""
    if step_s <= 0:
        raise GraphError(f"step_s must be > 0, got {step_s!r}")
    warnings: list[str] = []
    causal = set(graph.node_names())
    node_names: list[str] = []
    for individual in graph.individuals():
        if CAUSAL_EDGE in individual.types:
            continue
        if individual.name in causal:
            node_names.append(individual.name)
        else:
            display = ", ".join(graph.model.class_display(t) for t in individual.types)
            warnings.append(f"skipped non-causal individual {individual.name!r} ({display})")
    variables = sorted(node_names)
    index = {name: i for i, name in enumerate(variables)}

    links: list[tuple[int, int, int, float]] = []
    for record in graph.edge_records():
        confidence = record.confidence if record.confidence is not None else 1.0
        lag = record.time_lag_s if record.time_lag_s is not None else 0.0
        steps = _round_half_away_from_zero(lag / step_s)
        residual = abs(steps * step_s - lag)
        if residual > 1e-9 * max(1.0, abs(lag)):
            warnings.append(
                f"edge {record.name!r}: lag {lag} s is not a multiple of step_s={step_s} "
                f"(rounded to {steps} steps, residual {residual:.3g} s)"
            )
        links.append((index[record.cause], index[record.effect], steps, confidence))
    links.sort()
    return LinkTupleDoc(variables=variables, links=links, step_s=step_s), sorted(warnings)


def _fill_from_link_tuple(graph: Graph, doc: LinkTupleDoc) -> None:
    doc.validate()
    for name in doc.variables:
        graph.add_causal_node(name)
    for cause_idx, effect_idx, lag_steps, confidence in doc.links:
        cause = doc.variables[cause_idx]
        effect = doc.variables[effect_idx]
        k = 1
        while graph.get_entity_by_name(f"{cause}->{effect}_{k}") is not None:
            k += 1
        graph.add_causal_edge(
            cause,
            effect,
            f"{cause}->{effect}_{k}",
            confidence=confidence,
            time_lag_s=lag_steps * doc.step_s,
        )


def load_link_tuple(
    doc: Union[LinkTupleDoc, dict],
    new_store_path=None,
    *,
    overwrite: bool = False,
    **graph_kwargs,
) -> Graph:
    """Create a NEW graph from a link-tuple document."""
    if isinstance(doc, dict):
        doc = LinkTupleDoc.from_dict(doc)
    _check_target(new_store_path, overwrite)
    graph = Graph(new_store_path, **graph_kwargs)
    _fill_from_link_tuple(graph, doc)
    return graph


# -- GML / GraphML -------------------------------------------------------------


def _gml_escape(text: str) -> str:
    out = []
    for ch in text:
        if ch == "&":
            out.append("&amp;")
        elif ch == '"':
            out.append("&quot;")
        elif ord(ch) < 0x20 or ord(ch) > 0x7E:
            out.append(f"&#{ord(ch)};")
        else:
            out.append(ch)
    return "".join(out)


def _graph_elements(graph: Graph):
    nodes = sorted(graph.node_names())
    index = {name: i for i, name in enumerate(nodes)}
    records = sorted(graph.edge_records(), key=lambda r: (r.cause, r.effect, r.name))
    return nodes, index, records


def _first_comment(graph: Graph, name: str) -> Optional[str]:
    subject = Iri(name_to_iri(name))
    comments = sorted(
        t.object.lexical
        for t in graph.store.match(subject, Iri(COMMENT), None)
        if isinstance(t.object, Literal)
    )
    return comments[0] if comments else None


def export_gml(graph: Graph, path=None) -> str:
    """Directed multigraph in GML; deterministic, parse-back safe."""
    nodes, index, records = _graph_elements(graph)
    lines = ["graph [", "  directed 1"]
    for name in nodes:
        lines.append("  node [")
        lines.append(f"    id {index[name]}")
        lines.append(f'    label "{_gml_escape(name)}"')
        comment = _first_comment(graph, name)
        if comment is not None:
            lines.append(f'    comment "{_gml_escape(comment)}"')
        lines.append("  ]")
    for record in records:
        lines.append("  edge [")
        lines.append(f"    source {index[record.cause]}")
        lines.append(f"    target {index[record.effect]}")
        lines.append(f'    label "{_gml_escape(record.name)}"')
        if record.confidence is not None:
            lines.append(f"    confidence {record.confidence!r}")
        if record.time_lag_s is not None:
            lines.append(f"    time_lag_s {record.time_lag_s!r}")
        if record.comments:
            lines.append(f'    comment "{_gml_escape(record.comments[0])}"')
        lines.append("  ]")
    lines.append("]")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


_GRAPHML_KEYS = [
    ("n_name", "node", "name", "string"),
    ("n_comment", "node", "comment", "string"),
    ("e_name", "edge", "name", "string"),
    ("e_confidence", "edge", "confidence", "double"),
    ("e_time_lag_s", "edge", "time_lag_s", "double"),
    ("e_comment", "edge", "comment", "string"),
]


def export_graphml(graph: Graph, path=None) -> str:
    """Directed multigraph in GraphML with attribute keys declared first."""
    nodes, index, records = _graph_elements(graph)
    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    out.append('<graphml xmlns="http://graphml.graphdrawing.org/xmlns">')
    for key_id, domain, attr_name, attr_type in _GRAPHML_KEYS:
        out.append(
            f'  <key id="{key_id}" for="{domain}" attr.name="{attr_name}" attr.type="{attr_type}"/>'
        )
    out.append('  <graph id="G" edgedefault="directed">')
    for name in nodes:
        out.append(f'    <node id="n{index[name]}">')
        out.append(f'      <data key="n_name">{xml_escape(name)}</data>')
        comment = _first_comment(graph, name)
        if comment is not None:
            out.append(f'      <data key="n_comment">{xml_escape(comment)}</data>')
        out.append("    </node>")
    for i, record in enumerate(records):
        out.append(
            f'    <edge id="e{i}" source="n{index[record.cause]}" target="n{index[record.effect]}">'
        )
        out.append(f'      <data key="e_name">{xml_escape(record.name)}</data>')
        if record.confidence is not None:
            out.append(f'      <data key="e_confidence">{record.confidence!r}</data>')
        if record.time_lag_s is not None:
            out.append(f'      <data key="e_time_lag_s">{record.time_lag_s!r}</data>')
        if record.comments:
            out.append(f'      <data key="e_comment">{xml_escape(record.comments[0])}</data>')
        out.append("    </edge>")
    out.append("  </graph>")
    out.append("</graphml>")
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def export_ntriples(graph: Graph, path=None) -> str:
    """Canonical sorted N-Triples dump of the full store."""
    text = graph.dump_ntriples()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
