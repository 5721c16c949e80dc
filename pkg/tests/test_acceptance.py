"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they execute.
"""

from __future__ import annotations

import random
import time

import pytest

from causalkg.errors import GraphError
from causalkg.graph import Graph
from causalkg.interchange import (
    export_gml,
    export_graphml,
    export_link_tuple,
    export_property_graph,
    load_property_graph,
)
from causalkg.query import eval_query
from causalkg.rdf import Iri, Triple
from causalkg.storage import open_store
from causalkg.viz import emit_dot
from conftest import FIXTURES
from helpers import (
    check_dot,
    parse_gml,
    parse_graphml,
    random_graph_trace,
    reference_eval,
    sweep_reification,
)
from test_query import _random_ast, _random_store

N_RANDOM_GRAPHS = 200


def _report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {status}: {name}{suffix}")
    assert ok, f"{name}{suffix}"


@pytest.fixture(scope="module")
def swept_random_graphs():
    """200 random graphs driven through mutation traces with the global
    reification invariant checked after every single step."""
    rng = random.Random(0xC0FFEE)
    graphs: list[Graph] = []
    violations: list[str] = []
    steps = 0

    for _ in range(N_RANDOM_GRAPHS):
        graph = Graph()

        def check(g=graph):
            nonlocal steps
            steps += 1
            violations.extend(sweep_reification(g.store))

        random_graph_trace(rng, graph, max_nodes=30, max_edges=60, on_step=check)
        graphs.append(graph)
    return graphs, violations, steps


def test_listing3_reproduction():
    start = time.perf_counter()
    graph = Graph()
    graph.add_causal_node("Rain")
    graph.add_causal_node("Wet", comment=["some text"])
    graph.add_causal_edge("Rain", "Wet", "Rain->Wet")
    graph.add_causal_edge("Wet", "Slippery", "Wet->Slippery", force_create=True)
    elapsed = time.perf_counter() - start
    individual_set = {i.name for i in graph.individuals()}
    ok = individual_set == {"Rain", "Wet", "Rain->Wet", "Slippery", "Wet->Slippery"} and elapsed < 1.0
    _report("Listing-3 reproduction", ok, f"{elapsed * 1000:.1f} ms, individuals={sorted(individual_set)}")


def test_listing4_metadata():
    graph = Graph()
    graph.add_causal_edge("Rain", "Wet", "Rain->Wet", confidence=0.9, time_lag_s=2.0,
                          comment=["some text"], force_create=True)
    record = graph.get_edge_record("Rain->Wet")
    exact = record.confidence == 0.9 and record.time_lag_s == 2.0
    rejected = 0
    for bad in (0.0, 1.0000001):
        try:
            graph.add_causal_edge("Wet", "Rain", confidence=bad)
        except GraphError:
            rejected += 1
    _report("Listing-4 metadata", exact and rejected == 2,
            f"confidence={record.confidence}, lag={record.time_lag_s}, rejected={rejected}/2")


def test_listing9_promotion():
    graph = Graph()
    graph.import_ontology(FIXTURES / "pizza.ttl")
    graph.add_individual_of_type("Margherita", "margherita_name")
    before = graph.types_display("margherita_name")
    graph.add_causal_edge("margherita_name", "happiness", "my_edge", force_create=True)
    after = graph.types_display("margherita_name")
    ok = (
        before == ["pizza.Margherita"]
        and after == ["pizza.Margherita", "causalgraph.CausalNode"]
    )
    _report("Listing-9 promotion", ok, f"types: {before} -> {after}")


def test_reification_sweep(swept_random_graphs):
    graphs, violations, steps = swept_random_graphs
    ok = len(graphs) >= 200 and steps > 0 and violations == []
    _report("Reification sweep", ok,
            f"{len(graphs)} graphs, {steps} mutation steps, {len(violations)} violations")


def test_lossless_round_trip(swept_random_graphs):
    graphs, _, _ = swept_random_graphs
    mismatches = 0
    for graph in graphs:
        restored = load_property_graph(export_property_graph(graph))
        if restored.dump_ntriples() != graph.dump_ntriples():
            mismatches += 1
    _report("Lossless round-trip", mismatches == 0,
            f"{len(graphs)} graphs, {mismatches} dump mismatches")


def test_lossy_projection(swept_random_graphs):
    graphs, _, _ = swept_random_graphs
    rng = random.Random(4242)
    checked = 0
    stable = True
    lag_bound_ok = True
    for graph in graphs[:60]:
        step_s = rng.choice([0.25, 0.5, 1.0, 3.0])
        original_lags = {
            record.name: record.time_lag_s if record.time_lag_s is not None else 0.0
            for record in graph.edge_records()
        }
        doc, _ = export_link_tuple(graph, step_s=step_s)
        before = doc.to_json()
        # metadata-only mutations must not change the projection
        for name in list(original_lags)[:5]:
            record = graph.get_edge_record(name)
            graph.add_causal_edge(record.cause, record.effect, name,
                                  comment=[f"mut {rng.randrange(99)}"], creator="mutator")
        for node in graph.node_names()[:3]:
            graph.add_causal_node(node)  # idempotent no-op stays a no-op
        after_doc, _ = export_link_tuple(graph, step_s=step_s)
        if after_doc.to_json() != before:
            stable = False
        index = {name: i for i, name in enumerate(after_doc.variables)}
        remaining = list(after_doc.links)
        for record in graph.edge_records():
            lag = original_lags[record.name]
            hit = None
            for link in remaining:
                c, e, steps, _ = link
                if (c, e) == (index[record.cause], index[record.effect]) and abs(
                    steps * step_s - lag
                ) <= step_s / 2 + 1e-12:
                    hit = link
                    break
            if hit is None:
                lag_bound_ok = False
            else:
                remaining.remove(hit)
        if remaining:
            lag_bound_ok = False  # every link must correspond to an edge
        checked += 1
    _report("Lossy projection", stable and lag_bound_ok and checked == 60,
            f"{checked} graphs, byte-stable={stable}, lag residual bounded={lag_bound_ok}")


def test_query_oracle():
    rng = random.Random(0xBEEF)
    mismatches = 0
    for _ in range(30):
        store, triples = _random_store(rng)
        ast = _random_ast(rng, rng.randrange(1, 3))
        if eval_query(store, ast) != reference_eval(triples, ast):
            mismatches += 1
    _report("Query oracle", mismatches == 0, f"30 random queries, {mismatches} mismatches")


def test_crash_recovery(tmp_path):
    rng = random.Random(0xD1CE)
    path = tmp_path / "crash.cstore"
    handle = open_store(path)
    pool = [
        Triple(Iri(f"urn:x:s{i}"), Iri(f"urn:x:p{i % 3}"), Iri(f"urn:x:o{i % 4}"))
        for i in range(14)
    ]
    states = {frozenset()}
    current: set[Triple] = set()
    for _ in range(50):
        retracts = rng.sample(pool, rng.randrange(0, 2))
        asserts = rng.sample(pool, rng.randrange(1, 3))
        for t in retracts:
            if t in current:
                current.discard(t)
                states.add(frozenset(current))
        for t in asserts:
            if t not in current:
                current.add(t)
                states.add(frozenset(current))
        handle.commit(asserts=asserts, retracts=retracts)
    handle.close()
    data = path.read_bytes()

    victim = tmp_path / "victim.cstore"
    bad_cuts = 0
    for cut in range(len(data) + 1):
        victim.write_bytes(data[:cut])
        reopened = open_store(victim, exclusive=True)
        if frozenset(reopened.store.triples()) not in states:
            bad_cuts += 1
        reopened.close()
    _report("Crash recovery", bad_cuts == 0,
            f"{len(data) + 1} byte-boundary truncations of a 50-commit log, {bad_cuts} bad")


def test_format_validity(swept_random_graphs):
    graphs, _, _ = swept_random_graphs
    sample = graphs[::40][:5]

    listing = Graph()
    listing.add_causal_node("Rain")
    listing.add_causal_node("Wet", comment=["some text"])
    listing.add_causal_edge("Rain", "Wet", "Rain->Wet", confidence=0.9, time_lag_s=2.0)
    listing.add_causal_edge("Wet", "Slippery", "Wet->Slippery", force_create=True)
    sample = [listing] + sample

    problems = []
    for i, graph in enumerate(sample):
        n_nodes = len(graph.node_names())
        n_edges = len(graph.edge_names())
        gml_text = export_gml(graph)
        parsed = parse_gml(gml_text)
        if (len(parsed["nodes"]), len(parsed["edges"])) != (n_nodes, n_edges):
            problems.append(f"graph {i}: GML count mismatch")
        graphml_text = export_graphml(graph)
        parsed = parse_graphml(graphml_text)
        if (len(parsed["nodes"]), len(parsed["edges"])) != (n_nodes, n_edges):
            problems.append(f"graph {i}: GraphML count mismatch")
        dot_text = emit_dot(graph)
        try:
            check_dot(dot_text)
        except AssertionError as exc:
            problems.append(f"graph {i}: DOT grammar: {exc}")
        if gml_text != export_gml(graph) or graphml_text != export_graphml(graph) or dot_text != emit_dot(graph):
            problems.append(f"graph {i}: non-deterministic output")
    _report("Format validity", problems == [], f"{len(sample)} graphs; {problems or 'clean'}")
