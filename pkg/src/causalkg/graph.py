"""The Graph facade: every causal-level mutation and lookup.

Causal edges are reified: each edge is a named individual typed CausalEdge
carrying hasCause/hasEffect, mirrored on the endpoints as isCausing and
isAffectedBy, so confidence, time lag, comments and provenance attach to
the edge itself.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import networkx as nx

from . import ontology as onto
from .errors import GraphError, NotFoundError, OntologyError
from .ontology import (
    CAUSAL_EDGE,
    CAUSAL_NODE,
    CGS,
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
    ImportReport,
    OntologyModel,
    iri_to_name,
    model_from_store,
    name_to_iri,
    namespace_label_triples,
)
from .rdf import (
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_INTEGER,
    XSD_STRING,
    Iri,
    Literal,
    Term,
    Triple,
    TripleStore,
    decimal_literal,
    string_literal,
)
from .storage import StoreFile, open_store
from .turtle import RDF_TYPE, parse_turtle_file

_TYPE = Iri(RDF_TYPE)


@dataclass(frozen=True)
class Individual:
    """A named entity with one or more class memberships."""

    name: str
    iri: str
    types: tuple[str, ...]  # class IRIs, non-causal types first, CausalNode last


@dataclass(frozen=True)
class CausalEdgeRecord:
    """Materialized view of one reified edge."""

    name: str
    cause: str
    effect: str
    confidence: Optional[float] = None
    time_lag_s: Optional[float] = None
    creator: Optional[str] = None
    comments: tuple[str, ...] = ()


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    cycles: list[list[str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.cycles


def _check_confidence(confidence: Optional[float]) -> None:
    if confidence is not None and not 0 < confidence <= 1:
        raise GraphError(f"confidence must be in (0, 1], got {confidence!r}")


def _check_time_lag(time_lag_s: Optional[float]) -> None:
    if time_lag_s is not None and not time_lag_s >= 0:
        raise GraphError(f"time_lag_s must be >= 0, got {time_lag_s!r}")


class Graph:
    """A causal graph embedded in a knowledge graph.

    With ``store_path`` the graph is durably bound to a store file
    (``exclusive=True`` for the single writer, ``False`` for a read-only
    view frozen at open time); without it the graph lives in memory only.
    ``external_ontos`` are imported in list order after the built-in
    ontology; ``external_graph`` pre-fills a fresh graph from a
    property-graph or link-tuple document (object, dict, or file path).
    """

    def __init__(
        self,
        store_path=None,
        *,
        exclusive: bool = True,
        log_file_dir=None,
        logger_level: int = 20,
        external_ontos: Sequence = (),
        external_graph=None,
        fsync: bool = True,
    ):
        self._log = self._configure_logging(store_path, log_file_dir, logger_level)
        self._file: Optional[StoreFile] = None
        if store_path is not None:
            self._file = open_store(store_path, exclusive=exclusive, fsync=fsync)
            self.store: TripleStore = self._file.store
        else:
            self.store = TripleStore()
        self.exclusive = exclusive if store_path is not None else True
        self.model: OntologyModel = model_from_store(self.store)

        for source in external_ontos:
            self.import_ontology(source)
        if external_graph is not None:
            if self.individuals():
                raise GraphError("external_graph requires an empty graph")
            from . import interchange

            interchange.populate_graph(self, external_graph)
        self._log.info("graph ready: %d triples", len(self.store))

    @staticmethod
    def _configure_logging(store_path, log_file_dir, logger_level: int) -> logging.Logger:
        log = logging.getLogger("causalkg.graph")
        log.setLevel(logger_level)
        if log_file_dir is not None:
            directory = Path(log_file_dir)
            directory.mkdir(parents=True, exist_ok=True)
            stem = Path(store_path).stem if store_path is not None else "memory"
            target = (directory / f"causalkg-{stem}.log").resolve()
            if not any(
                isinstance(h, logging.FileHandler) and Path(h.baseFilename) == target
                for h in log.handlers
            ):
                handler = logging.FileHandler(target, encoding="utf-8")
                handler.setLevel(logger_level)
                handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
                log.addHandler(handler)
        return log

    # -- plumbing ---------------------------------------------------------

    def close(self) -> None:
        if self._file is not None:
            self._file.close()

    def __enter__(self) -> "Graph":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    @property
    def store_path(self) -> Optional[Path]:
        return self._file.path if self._file is not None else None

    def compact(self) -> None:
        """Fold the persistence log into the snapshot (exclusive mode only)."""
        if self._file is None:
            raise GraphError("in-memory graph has no store file")
        self._file.compact()

    def commit(self, asserts: Iterable[Triple] = (), retracts: Iterable[Triple] = ()) -> None:
        """Apply a change set; durably logged when a store file is bound."""
        if self._file is not None:
            self._file.commit(asserts=asserts, retracts=retracts)
        else:
            for t in retracts:
                self.store.delete(t)
            for t in asserts:
                self.store.insert(t)

    def _iri(self, name: str) -> Iri:
        return Iri(name_to_iri(name))

    # -- lookups ----------------------------------------------------------

    def _direct_types(self, subject: Iri) -> list[str]:
        return [t.object.text for t in self.store.match(subject, _TYPE, None) if isinstance(t.object, Iri)]

    def _ordered_types(self, subject: Iri) -> tuple[str, ...]:
        """Deterministic presentation order: non-CausalNode types sorted by
        display form, the plain CausalNode type last (promotion appends)."""
        types = self._direct_types(subject)
        rest = sorted((t for t in types if t != CAUSAL_NODE), key=self.model.class_display)
        if CAUSAL_NODE in types:
            rest.append(CAUSAL_NODE)
        return tuple(rest)

    def get_entity_by_name(self, name: str) -> Optional[Individual]:
        """The individual with this exact name, or None."""
        subject = self._iri(name)
        types = self._ordered_types(subject)
        if not types:
            return None
        return Individual(name=name, iri=subject.text, types=types)

    def individuals(self) -> list[Individual]:
        """All individuals (nodes, edges, creators) in insertion order."""
        out = []
        for subject in self.store.subjects_first_seen():
            if not isinstance(subject, Iri) or not onto.is_individual_iri(subject.text):
                continue
            types = self._ordered_types(subject)
            if types:
                out.append(Individual(iri_to_name(subject.text), subject.text, types))
        return out

    def classes(self) -> list[str]:
        """Display names of every known ontology class, sorted."""
        return sorted(self.model.class_display(iri) for iri in self.model.classes)

    def _is_causal_node(self, types: Sequence[str]) -> bool:
        return any(self.model.is_subclass(t, CAUSAL_NODE) for t in types)

    def node_names(self) -> list[str]:
        return [i.name for i in self.individuals() if self._is_causal_node(i.types)]

    def edge_names(self) -> list[str]:
        return [i.name for i in self.individuals() if CAUSAL_EDGE in i.types]

    def types_display(self, name: str) -> list[str]:
        individual = self.get_entity_by_name(name)
        if individual is None:
            raise NotFoundError(f"no individual named {name!r}")
        return [self.model.class_display(t) for t in individual.types]

    # -- name generation ---------------------------------------------------

    def _fresh_name(self, stem: str) -> str:
        k = 1
        while self.get_entity_by_name(f"{stem}_{k}") is not None:
            k += 1
        return f"{stem}_{k}"

    @staticmethod
    def _check_name(name: str) -> str:
        if not isinstance(name, str) or not name:
            raise GraphError("individual names must be non-empty strings")
        return name

    # -- causal mutations ---------------------------------------------------

    def add_causal_node(
        self,
        individual_name: Optional[str] = None,
        comment: Optional[Sequence[str]] = None,
        creator: Optional[str] = None,
    ) -> str:
        """Create a CausalNode; re-adding an existing node is a no-op."""
        name = self._check_name(individual_name) if individual_name is not None else self._fresh_name("CausalNode")
        existing = self.get_entity_by_name(name)
        if existing is not None:
            if CAUSAL_EDGE in existing.types or not self._is_causal_node(existing.types):
                raise GraphError(f"{name!r} already names a non-node individual")
            return name
        subject = self._iri(name)
        asserts: list[Triple] = []
        if creator is not None:
            creator_iri = self._ensure_creator(creator, asserts)
            asserts.append(Triple(subject, Iri(HAS_CREATOR), creator_iri))
            asserts.append(Triple(creator_iri, Iri(CREATED), subject))
        asserts.insert(0, Triple(subject, _TYPE, Iri(CAUSAL_NODE)))
        for text in comment or ():
            asserts.append(Triple(subject, Iri(COMMENT), string_literal(text)))
        self.commit(asserts)
        self._log.debug("added causal node %s", name)
        return name

    def _ensure_creator(self, name: str, asserts: list[Triple]) -> Iri:
        self._check_name(name)
        existing = self.get_entity_by_name(name)
        if existing is not None:
            if CREATOR not in existing.types:
                raise GraphError(f"{name!r} already names a non-creator individual")
            return Iri(existing.iri)
        creator_iri = self._iri(name)
        asserts.append(Triple(creator_iri, _TYPE, Iri(CREATOR)))
        return creator_iri

    def _prepare_endpoint(self, name: str, force_create: bool, asserts: list[Triple]) -> Iri:
        self._check_name(name)
        existing = self.get_entity_by_name(name)
        subject = self._iri(name)
        if existing is None:
            if not force_create:
                raise NotFoundError(f"unknown node {name!r} (pass force_create=True to create it)")
            asserts.append(Triple(subject, _TYPE, Iri(CAUSAL_NODE)))
            return subject
        if CAUSAL_EDGE in existing.types:
            raise GraphError(f"{name!r} is a CausalEdge and cannot be an endpoint")
        if not self._is_causal_node(existing.types):
            # referencing a plain individual in an edge promotes it
            asserts.append(Triple(subject, _TYPE, Iri(CAUSAL_NODE)))
        return subject

    def add_causal_edge(
        self,
        cause_node_name: str,
        effect_node_name: str,
        name_for_edge: Optional[str] = None,
        *,
        confidence: Optional[float] = None,
        time_lag_s: Optional[float] = None,
        comment: Optional[Sequence[str]] = None,
        creator: Optional[str] = None,
        force_create: bool = False,
    ) -> str:
        """Create (or update) a reified edge from cause to effect.

        Re-adding an existing edge name with the same endpoints updates the
        supplied metadata in place; different endpoints are an error.
        """
        if cause_node_name == effect_node_name:
            raise GraphError(f"self-loops are not allowed ({cause_node_name!r})")
        _check_confidence(confidence)
        _check_time_lag(time_lag_s)

        asserts: list[Triple] = []
        retracts: list[Triple] = []
        cause = self._prepare_endpoint(cause_node_name, force_create, asserts)
        effect = self._prepare_endpoint(effect_node_name, force_create, asserts)

        existing_edge = None
        if name_for_edge is not None:
            self._check_name(name_for_edge)
            present = self.get_entity_by_name(name_for_edge)
            if present is not None:
                if CAUSAL_EDGE not in present.types:
                    raise GraphError(f"{name_for_edge!r} already names a non-edge individual")
                record = self.get_edge_record(name_for_edge)
                if (record.cause, record.effect) != (cause_node_name, effect_node_name):
                    raise GraphError(
                        f"edge {name_for_edge!r} already connects "
                        f"{record.cause!r} -> {record.effect!r}"
                    )
                existing_edge = present
        edge_name = name_for_edge if name_for_edge is not None else self._fresh_name("CausalEdge")
        edge = self._iri(edge_name)

        if existing_edge is None:
            asserts.append(Triple(edge, _TYPE, Iri(CAUSAL_EDGE)))
            asserts.append(Triple(edge, Iri(HAS_CAUSE), cause))
            asserts.append(Triple(edge, Iri(HAS_EFFECT), effect))
            asserts.append(Triple(cause, Iri(IS_CAUSING), edge))
            asserts.append(Triple(effect, Iri(IS_AFFECTED_BY), edge))
        if confidence is not None:
            retracts.extend(self.store.match(edge, Iri(HAS_CONFIDENCE), None))
            asserts.append(Triple(edge, Iri(HAS_CONFIDENCE), decimal_literal(confidence)))
        if time_lag_s is not None:
            retracts.extend(self.store.match(edge, Iri(HAS_TIME_LAG), None))
            asserts.append(Triple(edge, Iri(HAS_TIME_LAG), decimal_literal(time_lag_s)))
        if comment is not None:
            retracts.extend(self.store.match(edge, Iri(COMMENT), None))
            for text in comment:
                asserts.append(Triple(edge, Iri(COMMENT), string_literal(text)))
        if creator is not None:
            for old in self.store.match(edge, Iri(HAS_CREATOR), None):
                retracts.append(old)
                retracts.append(Triple(old.object, Iri(CREATED), edge))
            creator_iri = self._ensure_creator(creator, asserts)
            asserts.append(Triple(edge, Iri(HAS_CREATOR), creator_iri))
            asserts.append(Triple(creator_iri, Iri(CREATED), edge))

        self.commit(asserts, retracts)
        self._log.debug("added causal edge %s (%s -> %s)", edge_name, cause_node_name, effect_node_name)
        return edge_name

    # -- removal -----------------------------------------------------------

    def _edge_triples(self, edge: Iri) -> list[Triple]:
        return self.store.match(edge, None, None) + self.store.match(None, None, edge)

    def remove_causal_edge_by_name(self, edge_name: str) -> bool:
        """Remove one edge; mirrored isCausing/isAffectedBy values go too."""
        existing = self.get_entity_by_name(edge_name)
        if existing is None or CAUSAL_EDGE not in existing.types:
            return False
        self.commit(retracts=self._edge_triples(Iri(existing.iri)))
        return True

    def _edges_with(self, predicate: str, node: Iri) -> list[Iri]:
        return sorted(
            {t.subject for t in self.store.match(None, Iri(predicate), node) if isinstance(t.subject, Iri)},
            key=lambda term: term.text,
        )

    def remove_causal_edges_between(self, cause_name: str, effect_name: str) -> int:
        """Remove every edge cause->effect (directed); returns the count."""
        cause, effect = self._iri(cause_name), self._iri(effect_name)
        outgoing = set(self._edges_with(HAS_CAUSE, cause))
        incoming = set(self._edges_with(HAS_EFFECT, effect))
        removed = 0
        for edge in sorted(outgoing & incoming, key=lambda term: term.text):
            self.commit(retracts=self._edge_triples(edge))
            removed += 1
        return removed

    def remove_causal_edges_of_node(self, node_name: str) -> int:
        """Remove all incoming and outgoing edges of a node; the node stays."""
        node = self._iri(node_name)
        edges = set(self._edges_with(HAS_CAUSE, node)) | set(self._edges_with(HAS_EFFECT, node))
        removed = 0
        for edge in sorted(edges, key=lambda term: term.text):
            self.commit(retracts=self._edge_triples(edge))
            removed += 1
        return removed

    def remove_causal_node(self, name: str) -> bool:
        """Remove a node and, by cascade, every edge referencing it."""
        existing = self.get_entity_by_name(name)
        if existing is None or CAUSAL_EDGE in existing.types or not self._is_causal_node(existing.types):
            return False
        self.remove_causal_edges_of_node(name)
        subject = Iri(existing.iri)
        retracts = self.store.match(subject, None, None) + self.store.match(None, None, subject)
        self.commit(retracts=retracts)
        self._log.debug("removed causal node %s", name)
        return True

    # -- edge metadata -------------------------------------------------------

    def _single_object(self, subject: Iri, predicate: str) -> Optional[Term]:
        triples = self.store.match(subject, Iri(predicate), None)
        return triples[0].object if triples else None

    def get_edge_record(self, edge_name: str) -> CausalEdgeRecord:
        """All reified metadata of one edge."""
        existing = self.get_entity_by_name(edge_name)
        if existing is None or CAUSAL_EDGE not in existing.types:
            raise NotFoundError(f"no causal edge named {edge_name!r}")
        edge = Iri(existing.iri)
        cause = self._single_object(edge, HAS_CAUSE)
        effect = self._single_object(edge, HAS_EFFECT)
        if not isinstance(cause, Iri) or not isinstance(effect, Iri):
            raise GraphError(f"edge {edge_name!r} is missing cause or effect")
        confidence = self._single_object(edge, HAS_CONFIDENCE)
        time_lag = self._single_object(edge, HAS_TIME_LAG)
        creator = self._single_object(edge, HAS_CREATOR)
        comments = tuple(
            sorted(t.object.lexical for t in self.store.match(edge, Iri(COMMENT), None) if isinstance(t.object, Literal))
        )
        return CausalEdgeRecord(
            name=edge_name,
            cause=iri_to_name(cause.text),
            effect=iri_to_name(effect.text),
            confidence=confidence.as_float() if isinstance(confidence, Literal) else None,
            time_lag_s=time_lag.as_float() if isinstance(time_lag, Literal) else None,
            creator=iri_to_name(creator.text) if isinstance(creator, Iri) else None,
            comments=comments,
        )

    def edge_records(self) -> list[CausalEdgeRecord]:
        return [self.get_edge_record(name) for name in self.edge_names()]

    # -- ontology-level operations --------------------------------------------

    def import_ontology(self, onto_file_path) -> ImportReport:
        """Merge classes/properties from a Turtle or N-Triples file; all of
        the file's triples are preserved in the store."""
        parsed = parse_turtle_file(onto_file_path)
        model, classes_added, properties_added = self.model.merged_with(parsed, source=str(onto_file_path))
        fresh = dict.fromkeys(t for t in parsed.triples if t not in self.store)
        fresh.update(dict.fromkeys(t for t in namespace_label_triples(model) if t not in self.store))
        asserts = list(fresh)
        self.commit(asserts)
        self.model = model
        report = ImportReport(classes_added, properties_added, len(asserts))
        self._log.info("ontology %s: %s", onto_file_path, report.summary())
        return report

    def add_individual_of_type(
        self,
        class_of_individual: str,
        individual_name: Optional[str] = None,
        props: Optional[dict] = None,
    ) -> str:
        """Create an individual of any known ontology class."""
        class_iri = self.model.resolve_class(class_of_individual)
        name = self._check_name(individual_name) if individual_name is not None else self._fresh_name(
            onto.local_name(class_iri)
        )
        existing = self.get_entity_by_name(name)
        if existing is not None:
            if set(existing.types) != {class_iri}:
                raise GraphError(
                    f"{name!r} already exists with types "
                    f"{[self.model.class_display(t) for t in existing.types]}"
                )
            return name
        subject = self._iri(name)
        asserts = [Triple(subject, _TYPE, Iri(class_iri))]
        for prop_name, values in (props or {}).items():
            prop = self.model.properties[self.model.resolve_property(prop_name)]
            if prop.domain is not None and not self.model.is_subclass(class_iri, prop.domain):
                raise GraphError(
                    f"property {prop_name!r} has domain {self.model.class_display(prop.domain)}, "
                    f"which {name!r} ({self.model.class_display(class_iri)}) is not"
                )
            for value in values if isinstance(values, (list, tuple)) else [values]:
                asserts.append(Triple(subject, Iri(prop.iri), self._property_value(prop, value)))
        self.commit(asserts)
        return name

    def _property_value(self, prop, value) -> Term:
        if prop.kind == "object":
            target = self.get_entity_by_name(str(value))
            if target is None:
                raise NotFoundError(f"object property value {value!r} names no individual")
            if prop.range is not None and not any(
                self.model.is_subclass(t, prop.range) for t in target.types
            ):
                raise GraphError(
                    f"{value!r} is not a {self.model.class_display(prop.range)} "
                    f"(range of {self.model.class_display(prop.iri)})"
                )
            return Iri(target.iri)
        datatype = prop.range or XSD_STRING
        if datatype == XSD_STRING and isinstance(value, str):
            return Literal(value, XSD_STRING)
        if datatype == XSD_BOOLEAN and isinstance(value, bool):
            return Literal("true" if value else "false", XSD_BOOLEAN)
        if datatype == XSD_INTEGER and isinstance(value, int) and not isinstance(value, bool):
            return Literal(str(value), XSD_INTEGER)
        if datatype == XSD_DECIMAL and isinstance(value, (int, float)) and not isinstance(value, bool):
            return decimal_literal(float(value))
        raise GraphError(f"value {value!r} does not fit datatype {datatype}")

    def promote_to_causal_node(self, name: str) -> None:
        """Append CausalNode to an individual's types (multiple inheritance)."""
        existing = self.get_entity_by_name(name)
        if existing is None:
            raise NotFoundError(f"no individual named {name!r}")
        if CAUSAL_EDGE in existing.types:
            raise GraphError(f"{name!r} is a CausalEdge and cannot become a node")
        if self._is_causal_node(existing.types):
            return
        self.commit([Triple(Iri(existing.iri), _TYPE, Iri(CAUSAL_NODE))])

    # -- validation ------------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Sweep the store for reification violations and report all simple
        cycles among causal nodes (cycles are permitted but flagged)."""
        report = ValidationReport()
        edge_subjects = sorted(
            (t.subject for t in self.store.match(None, _TYPE, Iri(CAUSAL_EDGE)) if isinstance(t.subject, Iri)),
            key=lambda term: term.text,
        )
        for edge in edge_subjects:
            name = iri_to_name(edge.text)
            causes = self.store.match(edge, Iri(HAS_CAUSE), None)
            effects = self.store.match(edge, Iri(HAS_EFFECT), None)
            if len(causes) != 1:
                report.violations.append(f"edge {name!r} has {len(causes)} hasCause values (expected 1)")
            if len(effects) != 1:
                report.violations.append(f"edge {name!r} has {len(effects)} hasEffect values (expected 1)")
            for t in causes:
                self._check_endpoint(report, name, t.object, "cause")
                if not isinstance(t.object, Iri) or Triple(t.object, Iri(IS_CAUSING), edge) not in self.store:
                    report.violations.append(f"edge {name!r}: cause lacks the mirrored isCausing")
            for t in effects:
                self._check_endpoint(report, name, t.object, "effect")
                if not isinstance(t.object, Iri) or Triple(t.object, Iri(IS_AFFECTED_BY), edge) not in self.store:
                    report.violations.append(f"edge {name!r}: effect lacks the mirrored isAffectedBy")
        edge_set = {e.text for e in edge_subjects}
        for t in self.store.match(None, Iri(IS_CAUSING), None):
            if not isinstance(t.object, Iri) or t.object.text not in edge_set or Triple(
                t.object, Iri(HAS_CAUSE), t.subject
            ) not in self.store:
                report.violations.append(f"stray isCausing on {self._describe(t.subject)}")
        for t in self.store.match(None, Iri(IS_AFFECTED_BY), None):
            if not isinstance(t.object, Iri) or t.object.text not in edge_set or Triple(
                t.object, Iri(HAS_EFFECT), t.subject
            ) not in self.store:
                report.violations.append(f"stray isAffectedBy on {self._describe(t.subject)}")
        for t in self.store.match(None, Iri(HAS_CONFIDENCE), None):
            if not isinstance(t.object, Literal) or not 0 < t.object.as_float() <= 1:
                report.violations.append(f"confidence out of (0, 1] on {self._describe(t.subject)}")
        for t in self.store.match(None, Iri(HAS_TIME_LAG), None):
            if not isinstance(t.object, Literal) or not t.object.as_float() >= 0:
                report.violations.append(f"negative time lag on {self._describe(t.subject)}")
        self._sweep_property_declarations(report)
        report.cycles = self._simple_cycles()
        return report

    def _describe(self, term: Term) -> str:
        if isinstance(term, Iri) and onto.is_individual_iri(term.text):
            return repr(iri_to_name(term.text))
        return repr(term)

    def _check_endpoint(self, report: ValidationReport, edge_name: str, term: Term, role: str) -> None:
        if not isinstance(term, Iri) or not onto.is_individual_iri(term.text):
            report.violations.append(f"edge {edge_name!r}: {role} is not a named individual")
            return
        types = self._direct_types(term)
        if not self._is_causal_node(types):
            report.violations.append(f"edge {edge_name!r}: {role} {iri_to_name(term.text)!r} is not a CausalNode")

    def _sweep_property_declarations(self, report: ValidationReport) -> None:
        for t in self.store.match(None, None, None):
            if not isinstance(t.subject, Iri) or not onto.is_individual_iri(t.subject.text):
                continue
            predicate = t.predicate.text
            if predicate == RDF_TYPE:
                if not isinstance(t.object, Iri) or not self.model.is_class(t.object.text):
                    report.violations.append(
                        f"{self._describe(t.subject)} typed with unknown class {t.object!r}"
                    )
                continue
            prop = self.model.properties.get(predicate)
            if prop is None:
                report.violations.append(
                    f"undeclared property {predicate} used on {self._describe(t.subject)}"
                )
                continue
            if prop.domain is not None:
                types = self._direct_types(t.subject)
                if not any(self.model.is_subclass(ty, prop.domain) for ty in types):
                    report.violations.append(
                        f"domain violation: {predicate} on {self._describe(t.subject)}"
                    )
            if prop.kind == "data" and not isinstance(t.object, Literal):
                report.violations.append(f"data property {predicate} with non-literal object")
            if prop.kind == "object" and not isinstance(t.object, (Iri,)):
                report.violations.append(f"object property {predicate} with non-IRI object")

    def _simple_cycles(self) -> list[list[str]]:
        digraph = nx.DiGraph()
        for t in self.store.match(None, _TYPE, Iri(CAUSAL_EDGE)):
            if not isinstance(t.subject, Iri):
                continue
            cause = self._single_object(t.subject, HAS_CAUSE)
            effect = self._single_object(t.subject, HAS_EFFECT)
            if isinstance(cause, Iri) and isinstance(effect, Iri):
                digraph.add_edge(iri_to_name(cause.text), iri_to_name(effect.text))
        cycles = []
        for cycle in nx.simple_cycles(digraph):
            pivot = min(range(len(cycle)), key=lambda i: cycle[i])
            cycles.append(cycle[pivot:] + cycle[:pivot])
        return sorted(cycles, key=lambda c: (len(c), c))

    # -- dumps -------------------------------------------------------------------

    def dump_ntriples(self) -> str:
        """Canonical N-Triples dump of the whole store (sorted lines)."""
        return self.store.dump_ntriples()
