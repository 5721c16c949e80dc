"""causalkg: causal graphs embedded in knowledge graphs.

Reified causal edges are first-class named individuals carrying confidence,
time lag, comments and provenance, stored in an embedded RDF triplestore
with single-file crash-safe persistence.
"""

from .errors import (
    CausalGraphError,
    GraphError,
    LockError,
    NotFoundError,
    OntologyError,
    ParseError,
    StorageError,
    TermError,
)
from .graph import CausalEdgeRecord, Graph, Individual, ValidationReport
from .interchange import (
    LinkTupleDoc,
    PropertyGraphDoc,
    export_gml,
    export_graphml,
    export_link_tuple,
    export_ntriples,
    export_property_graph,
    load_link_tuple,
    load_property_graph,
)
from .ontology import ImportReport, OntologyModel
from .query import eval_query, parse_query, run_query
from .rdf import BlankNode, Iri, Literal, Triple, TripleStore
from .storage import StoreFile, open_store
from .viz import emit_dot, emit_html

__version__ = "0.1.0"

__all__ = [
    "BlankNode",
    "CausalEdgeRecord",
    "CausalGraphError",
    "Graph",
    "GraphError",
    "ImportReport",
    "Individual",
    "Iri",
    "LinkTupleDoc",
    "Literal",
    "LockError",
    "NotFoundError",
    "OntologyError",
    "OntologyModel",
    "ParseError",
    "PropertyGraphDoc",
    "StorageError",
    "StoreFile",
    "TermError",
    "Triple",
    "TripleStore",
    "ValidationReport",
    "emit_dot",
    "emit_html",
    "eval_query",
    "export_gml",
    "export_graphml",
    "export_link_tuple",
    "export_ntriples",
    "export_property_graph",
    "load_link_tuple",
    "load_property_graph",
    "open_store",
    "parse_query",
    "run_query",
    "__version__",
]
