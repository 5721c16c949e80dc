"""FastAPI service wrapping one Graph.

The service process is the single writer: it holds the store's exclusive
lock for its lifetime and serializes mutations behind a process-wide lock,
so any number of HTTP clients can share one store safely.
"""

from __future__ import annotations

import tempfile
import threading
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import interchange, query, schemas, viz
from .errors import CausalGraphError, NotFoundError, ParseError
from .graph import Graph
from .ontology import is_individual_iri, iri_to_name
from .rdf import Iri, Literal, Term


def term_display(graph: Graph, term: Term) -> str:
    """Short human-readable form of a term for query results."""
    if isinstance(term, Iri):
        if is_individual_iri(term.text):
            return iri_to_name(term.text)
        display = graph.model.class_display(term.text)
        return display if not display.startswith("<") else f"<{term.text}>"
    if isinstance(term, Literal):
        return term.lexical
    return f"_:{term.label}"


def create_app(
    store_path=None,
    *,
    exclusive: bool = True,
    log_file_dir=None,
    logger_level: int = 20,
    external_ontos=(),
    external_graph=None,
) -> FastAPI:
    """Build the service around a (possibly new) graph."""
    graph = Graph(
        store_path,
        exclusive=exclusive,
        log_file_dir=log_file_dir,
        logger_level=logger_level,
        external_ontos=external_ontos,
        external_graph=external_graph,
    )

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        graph.close()

    app = FastAPI(title="causalkg", version="0.1.0", lifespan=lifespan)
    app.state.graph = graph
    write_lock = threading.Lock()

    @app.exception_handler(CausalGraphError)
    async def _domain_error(request: Request, exc: CausalGraphError):
        status = 404 if isinstance(exc, NotFoundError) else 400
        payload = {"detail": str(exc)}
        if isinstance(exc, ParseError) and exc.line:
            payload["line"] = exc.line
            payload["column"] = exc.column
        return JSONResponse(status_code=status, content=payload)

    @app.get("/health", response_model=schemas.HealthOut)
    def health():
        return schemas.HealthOut(
            status="ok",
            store_path=str(graph.store_path) if graph.store_path else None,
            exclusive=graph.exclusive,
            triples=len(graph.store),
            individuals=len(graph.individuals()),
        )

    @app.post("/nodes", response_model=schemas.NameOut)
    def add_node(body: schemas.NodeCreate):
        with write_lock:
            name = graph.add_causal_node(body.name, comment=body.comments or None, creator=body.creator)
        return schemas.NameOut(name=name)

    @app.post("/edges", response_model=schemas.NameOut)
    def add_edge(body: schemas.EdgeCreate):
        with write_lock:
            name = graph.add_causal_edge(
                body.cause,
                body.effect,
                body.name,
                confidence=body.confidence,
                time_lag_s=body.time_lag_s,
                comment=body.comments or None,
                creator=body.creator,
                force_create=body.force_create,
            )
        return schemas.NameOut(name=name)

    @app.post("/individuals", response_model=schemas.NameOut)
    def add_individual(body: schemas.IndividualCreate):
        with write_lock:
            name = graph.add_individual_of_type(body.class_name, body.name, body.props or None)
        return schemas.NameOut(name=name)

    @app.delete("/nodes/{name}", response_model=schemas.RemovedOut)
    def remove_node(name: str):
        with write_lock:
            return schemas.RemovedOut(removed=graph.remove_causal_node(name))

    @app.delete("/edges/{name}", response_model=schemas.RemovedOut)
    def remove_edge(name: str):
        with write_lock:
            return schemas.RemovedOut(removed=graph.remove_causal_edge_by_name(name))

    @app.post("/edges/remove-between", response_model=schemas.CountOut)
    def remove_between(cause: str, effect: str):
        with write_lock:
            return schemas.CountOut(removed=graph.remove_causal_edges_between(cause, effect))

    @app.post("/edges/remove-of-node", response_model=schemas.CountOut)
    def remove_of_node(node: str):
        with write_lock:
            return schemas.CountOut(removed=graph.remove_causal_edges_of_node(node))

    @app.get("/edges/{name}", response_model=schemas.EdgeRecordOut)
    def edge_record(name: str):
        record = graph.get_edge_record(name)
        return schemas.EdgeRecordOut(
            name=record.name,
            cause=record.cause,
            effect=record.effect,
            confidence=record.confidence,
            time_lag_s=record.time_lag_s,
            creator=record.creator,
            comments=list(record.comments),
        )

    @app.get("/individuals", response_model=schemas.IndividualsOut)
    def individuals():
        return schemas.IndividualsOut(
            individuals=[
                schemas.IndividualOut(
                    name=i.name, types=[graph.model.class_display(t) for t in i.types]
                )
                for i in graph.individuals()
            ]
        )

    @app.get("/classes", response_model=schemas.ClassesOut)
    def classes():
        return schemas.ClassesOut(classes=graph.classes())

    @app.post("/query", response_model=schemas.QueryOut)
    def run_query(body: schemas.QueryIn):
        ast = query.parse_query(body.text)
        bindings = query.eval_query(graph, ast)
        rows = [{var: term_display(graph, term) for var, term in b.items()} for b in bindings]
        return schemas.QueryOut(variables=ast.select_vars, rows=rows)

    @app.get("/validate", response_model=schemas.ValidationOut)
    def validate():
        report = graph.validate()
        return schemas.ValidationOut(ok=report.ok, violations=report.violations, cycles=report.cycles)

    @app.post("/export", response_model=schemas.ExportOut)
    def export(body: schemas.ExportIn):
        warnings: list[str] = []
        if body.format == "pgjson":
            content = interchange.export_property_graph(graph).to_json()
        elif body.format == "linktuple":
            doc, warnings = interchange.export_link_tuple(graph, step_s=body.step_s)
            content = doc.to_json()
        elif body.format == "gml":
            content = interchange.export_gml(graph)
        elif body.format == "graphml":
            content = interchange.export_graphml(graph)
        elif body.format == "ntriples":
            content = interchange.export_ntriples(graph)
        elif body.format == "dot":
            content = viz.emit_dot(graph, include_metadata=body.include_metadata)
        else:
            content = viz.emit_html(graph)
        return schemas.ExportOut(format=body.format, content=content, warnings=warnings)

    @app.post("/import-ontology", response_model=schemas.OntologyImportOut)
    def import_ontology(body: schemas.OntologyImportIn):
        suffix = Path(body.filename).suffix or ".ttl"
        with tempfile.NamedTemporaryFile("w", suffix=suffix, encoding="utf-8", delete=False) as handle:
            handle.write(body.content)
            temp_path = Path(handle.name)
        try:
            with write_lock:
                report = graph.import_ontology(temp_path)
        finally:
            temp_path.unlink(missing_ok=True)
        return schemas.OntologyImportOut(**report.to_dict(), message=report.summary())

    @app.post("/load", response_model=schemas.LoadOut)
    def load(body: schemas.LoadIn):
        payload = body.content
        if body.format == "pgjson":
            doc = interchange.PropertyGraphDoc.from_json(payload)
            loaded = interchange.load_property_graph(doc, body.store_path, overwrite=body.overwrite)
        else:
            doc = interchange.LinkTupleDoc.from_json(payload)
            loaded = interchange.load_link_tuple(doc, body.store_path, overwrite=body.overwrite)
        try:
            count = len(loaded.individuals())
        finally:
            loaded.close()
        return schemas.LoadOut(store_path=body.store_path, individuals=count)

    return app
