"""Class/property model: built-in causal vocabulary plus imported ontologies.

The built-in model is always present and cannot be redefined. Imported
ontology files contribute classes, subclass axioms and property
declarations; everything else they contain is kept as raw triples in the
store but not interpreted.
"""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import quote, unquote

from .errors import OntologyError
from .rdf import (
    SUPPORTED_DATATYPES,
    XSD_DECIMAL,
    XSD_STRING,
    Iri,
    Literal,
    TripleStore,
    Triple,
)
from .turtle import RDF_NS, RDF_TYPE, ParsedOntology

RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
RDFS_SUBCLASS_OF = RDFS_NS + "subClassOf"
RDFS_DOMAIN = RDFS_NS + "domain"
RDFS_RANGE = RDFS_NS + "range"
RDFS_CLASS = RDFS_NS + "Class"
OWL_NS = "http://www.w3.org/2002/07/owl#"
OWL_CLASS = OWL_NS + "Class"
OWL_OBJECT_PROPERTY = OWL_NS + "ObjectProperty"
OWL_DATATYPE_PROPERTY = OWL_NS + "DatatypeProperty"

#: Namespace of the built-in causal vocabulary.
CG = "urn:causalgraph:ontology#"
#: Namespace under which named individuals live.
CGS = "urn:causalgraph:store#"

CAUSAL_NODE = CG + "CausalNode"
CAUSAL_EDGE = CG + "CausalEdge"
CREATOR = CG + "Creator"
STATE = CG + "State"
EVENT = CG + "Event"
VARIABLE = CG + "Variable"

HAS_CAUSE = CG + "hasCause"
HAS_EFFECT = CG + "hasEffect"
IS_CAUSING = CG + "isCausing"
IS_AFFECTED_BY = CG + "isAffectedBy"
HAS_CREATOR = CG + "hasCreator"
CREATED = CG + "created"
HAS_CONFIDENCE = CG + "hasConfidence"
HAS_TIME_LAG = CG + "hasTimeLag"
COMMENT = CG + "comment"
# internal plumbing: remembers the display label of an imported namespace
NAMESPACE_LABEL = CG + "namespaceLabel"

_CLASS_DECL_TYPES = (OWL_CLASS, RDFS_CLASS)
_RESERVED_PREFIX_LABELS = {"rdf", "rdfs", "owl", "xsd", "cg", "cgs"}


def name_to_iri(name: str) -> str:
    """Store IRI of a named individual (percent-encoded, bijective)."""
    return CGS + quote(name, safe="")


def iri_to_name(iri: str) -> str:
    return unquote(iri[len(CGS):])


def is_individual_iri(iri: str) -> bool:
    return iri.startswith(CGS)


def local_name(iri: str) -> str:
    """Fragment or last path segment of an IRI."""
    if "#" in iri:
        return iri.rsplit("#", 1)[1]
    return iri.rsplit("/", 1)[-1]


@dataclass(frozen=True)
class OntologyClass:
    iri: str
    parents: frozenset[str] = frozenset()


@dataclass(frozen=True)
class PropertyDef:
    iri: str
    kind: str  # "object" | "data"
    domain: str | None = None
    range: str | None = None


@dataclass(frozen=True)
class ImportReport:
    classes_added: int = 0
    properties_added: int = 0
    triples_added: int = 0

    def summary(self) -> str:
        return (
            f"imported {self.classes_added} classes, "
            f"{self.properties_added} properties, "
            f"{self.triples_added} new triples"
        )

    def to_dict(self) -> dict[str, int]:
        return {
            "classes_added": self.classes_added,
            "properties_added": self.properties_added,
            "triples_added": self.triples_added,
        }


def _builtin_classes() -> dict[str, OntologyClass]:
    return {
        CAUSAL_NODE: OntologyClass(CAUSAL_NODE),
        CAUSAL_EDGE: OntologyClass(CAUSAL_EDGE),
        CREATOR: OntologyClass(CREATOR),
        STATE: OntologyClass(STATE, frozenset({CAUSAL_NODE})),
        EVENT: OntologyClass(EVENT, frozenset({CAUSAL_NODE})),
        VARIABLE: OntologyClass(VARIABLE, frozenset({CAUSAL_NODE})),
    }


def _builtin_properties() -> dict[str, PropertyDef]:
    defs = [
        PropertyDef(HAS_CAUSE, "object", CAUSAL_EDGE, CAUSAL_NODE),
        PropertyDef(HAS_EFFECT, "object", CAUSAL_EDGE, CAUSAL_NODE),
        PropertyDef(IS_CAUSING, "object", CAUSAL_NODE, CAUSAL_EDGE),
        PropertyDef(IS_AFFECTED_BY, "object", CAUSAL_NODE, CAUSAL_EDGE),
        PropertyDef(HAS_CREATOR, "object", None, CREATOR),
        PropertyDef(CREATED, "object", CREATOR, None),
        PropertyDef(HAS_CONFIDENCE, "data", CAUSAL_EDGE, XSD_DECIMAL),
        PropertyDef(HAS_TIME_LAG, "data", CAUSAL_EDGE, XSD_DECIMAL),
        PropertyDef(COMMENT, "data", None, XSD_STRING),
        PropertyDef(NAMESPACE_LABEL, "data", None, XSD_STRING),
    ]
    return {d.iri: d for d in defs}


class OntologyModel:
    """Merged class hierarchy and property definitions.

    Instances are treated as immutable: imports build and validate a new
    model, then the graph swaps it in.
    """

    def __init__(
        self,
        classes: dict[str, OntologyClass] | None = None,
        properties: dict[str, PropertyDef] | None = None,
        labels: dict[str, str] | None = None,
    ):
        self.classes = dict(classes) if classes else _builtin_classes()
        self.properties = dict(properties) if properties else _builtin_properties()
        # namespace IRI -> display label; longest namespace match wins
        self.labels = dict(labels) if labels else {CG: "causalgraph"}

    @classmethod
    def builtin(cls) -> "OntologyModel":
        return cls()

    # -- lookups ---------------------------------------------------------

    def is_class(self, iri: str) -> bool:
        return iri in self.classes

    def superclasses(self, iri: str) -> set[str]:
        """Reflexive-transitive superclass closure."""
        seen: set[str] = set()
        stack = [iri]
        while stack:
            current = stack.pop()
            if current in seen:
                continue
            seen.add(current)
            cls = self.classes.get(current)
            if cls:
                stack.extend(cls.parents)
        return seen

    def is_subclass(self, child: str, ancestor: str) -> bool:
        return ancestor in self.superclasses(child)

    def class_display(self, iri: str) -> str:
        """Human-readable form, e.g. ``causalgraph.CausalNode``."""
        best = ""
        for namespace in self.labels:
            if iri.startswith(namespace) and len(namespace) > len(best):
                best = namespace
        if best:
            return f"{self.labels[best]}.{iri[len(best):]}"
        return f"<{iri}>"

    def _resolve(self, table: dict, name: str, what: str) -> str:
        stripped = name[1:-1] if name.startswith("<") and name.endswith(">") else name
        if stripped in table:
            return stripped
        if ":" in stripped and ("/" in stripped or stripped.startswith("urn:")):
            raise OntologyError(f"unknown {what}: {name}")
        if "." in stripped:
            label, _, local = stripped.partition(".")
            for namespace, known in self.labels.items():
                if known == label and namespace + local in table:
                    return namespace + local
        hits = [iri for iri in table if local_name(iri) == stripped]
        if not hits:
            raise OntologyError(f"unknown {what}: {name}")
        if len(hits) > 1:
            pretty = ", ".join(sorted(self.class_display(h) for h in hits))
            raise OntologyError(f"ambiguous {what} name {name!r}: {pretty}")
        return hits[0]

    def resolve_class(self, name: str) -> str:
        """Resolve a class given as local name, ``label.Name``, or full IRI."""
        return self._resolve(self.classes, name, "class")

    def resolve_property(self, name: str) -> str:
        return self._resolve(self.properties, name, "property")

    # -- merging ---------------------------------------------------------

    def merged_with(self, parsed: ParsedOntology, source: str = "") -> tuple["OntologyModel", int, int]:
        """New model including ``parsed``; returns (model, classes_added,
        properties_added). Raises on built-in redefinition or cycles."""
        classes = dict(self.classes)
        properties = dict(self.properties)
        labels = dict(self.labels)

        builtin_iris = set(_builtin_classes()) | set(_builtin_properties())
        class_decls: set[str] = set()
        prop_decls: dict[str, str] = {}
        subclass_axioms: list[tuple[str, str]] = []
        domains: list[tuple[str, str]] = []
        ranges: list[tuple[str, str]] = []

        for t in parsed.triples:
            if not isinstance(t.subject, Iri) or not isinstance(t.object, (Iri, Literal)):
                continue  # blank-node axioms are preserved raw, not interpreted
            subject = t.subject.text
            predicate = t.predicate.text
            if predicate == RDF_TYPE and isinstance(t.object, Iri):
                obj = t.object.text
                if obj in _CLASS_DECL_TYPES:
                    self._guard_builtin(subject, builtin_iris, source)
                    class_decls.add(subject)
                elif obj == OWL_OBJECT_PROPERTY:
                    self._guard_builtin(subject, builtin_iris, source)
                    prop_decls[subject] = "object"
                elif obj == OWL_DATATYPE_PROPERTY:
                    self._guard_builtin(subject, builtin_iris, source)
                    prop_decls[subject] = "data"
            elif predicate == RDFS_SUBCLASS_OF and isinstance(t.object, Iri):
                self._guard_builtin(subject, builtin_iris, source)
                subclass_axioms.append((subject, t.object.text))
            elif predicate == RDFS_DOMAIN and isinstance(t.object, Iri):
                self._guard_builtin(subject, builtin_iris, source)
                domains.append((subject, t.object.text))
            elif predicate == RDFS_RANGE and isinstance(t.object, Iri):
                self._guard_builtin(subject, builtin_iris, source)
                ranges.append((subject, t.object.text))
            elif predicate == NAMESPACE_LABEL and isinstance(t.object, Literal):
                labels.setdefault(subject, t.object.lexical)

        classes_before = set(classes)
        for iri in class_decls:
            classes.setdefault(iri, OntologyClass(iri))
        for child, parent in subclass_axioms:
            for iri in (child, parent):
                if iri in prop_decls or iri in properties:
                    raise OntologyError(f"{iri} used both as class and property")
                classes.setdefault(iri, OntologyClass(iri))
            existing = classes[child]
            classes[child] = OntologyClass(child, existing.parents | {parent})

        props_before = set(properties)
        for iri, kind in prop_decls.items():
            if iri in classes:
                raise OntologyError(f"{iri} used both as class and property")
            existing_prop = properties.get(iri)
            if existing_prop is not None:
                if existing_prop.kind != kind:
                    raise OntologyError(f"property {iri} redeclared with a different kind")
            else:
                properties[iri] = PropertyDef(iri, kind)
        for subject, value in domains:
            prop = properties.get(subject)
            if prop is None:
                raise OntologyError(f"rdfs:domain given for undeclared property {subject}")
            classes.setdefault(value, OntologyClass(value))
            properties[subject] = PropertyDef(prop.iri, prop.kind, value, prop.range)
        for subject, value in ranges:
            prop = properties.get(subject)
            if prop is None:
                raise OntologyError(f"rdfs:range given for undeclared property {subject}")
            if prop.kind == "data":
                if value not in SUPPORTED_DATATYPES:
                    raise OntologyError(f"unsupported datatype range {value} on {subject}")
            else:
                classes.setdefault(value, OntologyClass(value))
            properties[subject] = PropertyDef(prop.iri, prop.kind, prop.domain, value)

        for label, namespace in parsed.prefixes.items():
            if not label or label in _RESERVED_PREFIX_LABELS:
                continue
            if namespace in (RDF_NS, RDFS_NS, OWL_NS, CG, CGS) or namespace.startswith(
                "http://www.w3.org/2001/XMLSchema#"
            ):
                continue
            if namespace not in labels:
                taken = set(labels.values())
                candidate, k = label, 2
                while candidate in taken:
                    candidate = f"{label}{k}"
                    k += 1
                labels[namespace] = candidate

        model = OntologyModel(classes, properties, labels)
        model._check_acyclic()
        return model, len(set(classes) - classes_before), len(set(properties) - props_before)

    @staticmethod
    def _guard_builtin(iri: str, builtin_iris: set[str], source: str) -> None:
        if iri in builtin_iris:
            where = f" in {source}" if source else ""
            raise OntologyError(f"import{where} attempts to redefine built-in {iri}")

    def _check_acyclic(self) -> None:
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {iri: WHITE for iri in self.classes}

        def visit(iri: str, trail: list[str]) -> None:
            color[iri] = GRAY
            trail.append(iri)
            for parent in sorted(self.classes[iri].parents):
                if parent not in color:
                    continue
                if color[parent] == GRAY:
                    cycle = trail[trail.index(parent):] + [parent]
                    raise OntologyError("subclass cycle: " + " -> ".join(cycle))
                if color[parent] == WHITE:
                    visit(parent, trail)
            trail.pop()
            color[iri] = BLACK

        for iri in sorted(self.classes):
            if color[iri] == WHITE:
                visit(iri, [])


def namespace_label_triples(model: OntologyModel) -> list[Triple]:
    """Triples that persist the imported-namespace display labels."""
    out = []
    for namespace, label in model.labels.items():
        if namespace == CG:
            continue
        out.append(Triple(Iri(namespace), Iri(NAMESPACE_LABEL), Literal(label, XSD_STRING)))
    return out


def model_from_store(store: TripleStore) -> OntologyModel:
    """Rebuild the merged model from previously persisted ontology triples."""
    parsed = ParsedOntology(prefixes={}, triples=[t for t in store if not isinstance(t.subject, Iri) or not is_individual_iri(t.subject.text)])
    model, _, _ = OntologyModel.builtin().merged_with(parsed, source="store")
    return model
