from __future__ import annotations

import json
import random

import pytest

from causalkg.errors import GraphError
from causalkg.graph import Graph
from causalkg.interchange import (
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
from conftest import build_listing3
from helpers import parse_gml, parse_graphml, random_graph_trace


class TestPropertyGraphExport:
    def test_listing3_counts_and_names(self, listing3):
        doc = export_property_graph(listing3)
        assert [n.name for n in doc.nodes] == ["Rain", "Wet", "Slippery"]
        assert [e.name for e in doc.edges] == ["Rain->Wet", "Wet->Slippery"]
        assert doc.edges[0].cause == "Rain"
        assert doc.edges[0].effect == "Wet"

    def test_empty_graph(self, memory_graph):
        doc = export_property_graph(memory_graph)
        assert doc.nodes == [] and doc.edges == [] and doc.ontology_extras == []

    def test_pizza_types_preserved(self, memory_graph, pizza_ttl):
        memory_graph.import_ontology(pizza_ttl)
        memory_graph.add_individual_of_type("Margherita", "m")
        memory_graph.add_causal_edge("m", "joy", force_create=True)
        doc = export_property_graph(memory_graph)
        m = next(n for n in doc.nodes if n.name == "m")
        assert set(m.types) == {
            "http://example.org/pizza#Margherita",
            "urn:causalgraph:ontology#CausalNode",
        }
        assert doc.ontology_extras  # imported declarations are carried along

    def test_round_trip_listing3(self, listing3, tmp_path):
        doc = export_property_graph(listing3)
        restored = load_property_graph(doc, tmp_path / "copy.cstore")
        assert restored.dump_ntriples() == listing3.dump_ntriples()
        # node order and edge order are each preserved; only their
        # interleaving is not represented in the document
        restored_doc = export_property_graph(restored)
        assert [n.name for n in restored_doc.nodes] == [n.name for n in doc.nodes]
        assert [e.name for e in restored_doc.edges] == [e.name for e in doc.edges]
        restored.close()

    def test_round_trip_with_everything(self, memory_graph, pizza_ttl):
        memory_graph.import_ontology(pizza_ttl)
        memory_graph.add_individual_of_type("Margherita", "m", props={"hasCaloricContent": 700})
        memory_graph.add_causal_node("Rain", comment=["wet stuff"], creator="Alice")
        memory_graph.add_causal_edge(
            "m", "joy", "m->joy", force_create=True, confidence=0.75, time_lag_s=12.5,
            comment=["pizza causes joy"], creator="expert",
        )
        doc = export_property_graph(memory_graph)
        restored = load_property_graph(doc)
        assert restored.dump_ntriples() == memory_graph.dump_ntriples()
        # document serialization is stable end to end
        assert export_property_graph(restored).to_json() == doc.to_json()

    def test_source_graph_untouched(self, listing3):
        before = listing3.dump_ntriples()
        restored = load_property_graph(export_property_graph(listing3))
        restored.add_causal_node("extra")
        assert listing3.dump_ntriples() == before

    def test_dangling_endpoint_rejected(self):
        doc = {
            "nodes": [{"name": "a", "types": ["urn:causalgraph:ontology#CausalNode"], "props": {}}],
            "edges": [{"name": "e", "cause": "a", "effect": "ghost", "props": {}}],
            "ontology_extras": [],
        }
        with pytest.raises(GraphError, match="unlisted node"):
            load_property_graph(doc)

    def test_duplicate_names_rejected(self):
        doc = {
            "nodes": [
                {"name": "a", "types": ["urn:causalgraph:ontology#CausalNode"], "props": {}},
                {"name": "a", "types": ["urn:causalgraph:ontology#CausalNode"], "props": {}},
            ],
            "edges": [],
            "ontology_extras": [],
        }
        with pytest.raises(GraphError, match="duplicate"):
            load_property_graph(doc)

    def test_existing_path_requires_overwrite(self, listing3, tmp_path):
        target = tmp_path / "existing.cstore"
        target.write_text("causalstore-v1\n%%LOG\n", encoding="utf-8")
        doc = export_property_graph(listing3)
        with pytest.raises(GraphError, match="overwrite"):
            load_property_graph(doc, target)
        restored = load_property_graph(doc, target, overwrite=True)
        assert restored.dump_ntriples() == listing3.dump_ntriples()
        restored.close()

    def test_graph_init_external_graph(self, listing3, tmp_path):
        doc_path = tmp_path / "doc.pg.json"
        doc_path.write_text(export_property_graph(listing3).to_json(), encoding="utf-8")
        fresh = Graph(external_graph=doc_path)
        assert len(fresh.individuals()) == 5
        assert fresh.dump_ntriples() == listing3.dump_ntriples()

    def test_random_round_trips(self):
        rng = random.Random(31415)
        for _ in range(25):
            graph = Graph()
            random_graph_trace(rng, graph)
            restored = load_property_graph(export_property_graph(graph))
            assert restored.dump_ntriples() == graph.dump_ntriples()


class TestLinkTuple:
    def make_listing4(self) -> Graph:
        graph = build_listing3(Graph())
        graph.add_causal_edge("Rain", "Wet", "Rain->Wet", confidence=0.9, time_lag_s=2.0,
                              comment=["some text"])
        return graph

    def test_listing4_projection(self):
        doc, warnings = export_link_tuple(self.make_listing4(), step_s=1.0)
        assert doc.variables == ["Rain", "Slippery", "Wet"]
        rain, slippery, wet = 0, 1, 2
        assert (rain, wet, 2, 0.9) in doc.links
        # defaults: absent confidence -> 1.0, absent lag -> 0
        assert (wet, slippery, 0, 1.0) in doc.links
        assert warnings == []

    def test_half_step(self):
        doc, _ = export_link_tuple(self.make_listing4(), step_s=0.5)
        assert (0, 2, 4, 0.9) in doc.links

    def test_rounding_warning(self):
        graph = self.make_listing4()
        doc, warnings = export_link_tuple(graph, step_s=3.0)
        assert (0, 2, 1, 0.9) in doc.links  # 2.0 s -> 1 step of 3 s
        assert any("not a multiple" in w for w in warnings)
        assert all(abs(lag * doc.step_s) >= 0 for _, _, lag, _ in doc.links)

    def test_comments_and_creators_do_not_leak(self):
        graph = self.make_listing4()
        doc, _ = export_link_tuple(graph)
        text = doc.to_json()
        assert "some text" not in text
        before = text
        graph.add_causal_edge("Rain", "Wet", "Rain->Wet", comment=["changed"], creator="bob")
        after_doc, _ = export_link_tuple(graph)
        assert after_doc.to_json() == before

    def test_step_must_be_positive(self):
        with pytest.raises(GraphError, match="step_s"):
            export_link_tuple(self.make_listing4(), step_s=0.0)

    def test_load_reconstructs_lags(self, tmp_path):
        doc, _ = export_link_tuple(self.make_listing4(), step_s=1.0)
        restored = load_link_tuple(doc, tmp_path / "lt.cstore")
        names = restored.edge_names()
        assert names == ["Rain->Wet_1", "Wet->Slippery_1"] or set(names) == {
            "Rain->Wet_1",
            "Wet->Slippery_1",
        }
        record = restored.get_edge_record("Rain->Wet_1")
        assert record.confidence == 0.9
        assert record.time_lag_s == 2.0
        restored.close()

    def test_empty_doc(self):
        restored = load_link_tuple(LinkTupleDoc(variables=[], links=[], step_s=1.0))
        assert restored.individuals() == []

    def test_round_trip_preserves_multiset(self):
        rng = random.Random(999)
        for _ in range(10):
            graph = Graph()
            random_graph_trace(rng, graph, max_nodes=10, max_edges=15)
            doc, _ = export_link_tuple(graph)
            restored = load_link_tuple(doc)
            doc2, _ = export_link_tuple(restored)
            assert doc.to_json() == doc2.to_json()

    def test_malformed_indices(self):
        with pytest.raises(GraphError, match="out of range"):
            LinkTupleDoc.from_dict({"variables": ["a"], "links": [[0, 3, 0, 1.0]], "step_s": 1.0})

    def test_non_causal_individuals_skipped_with_warning(self, memory_graph, pizza_ttl):
        memory_graph.import_ontology(pizza_ttl)
        memory_graph.add_individual_of_type("Margherita", "m")
        memory_graph.add_causal_node("Rain")
        doc, warnings = export_link_tuple(memory_graph)
        assert doc.variables == ["Rain"]
        assert any("skipped non-causal" in w and "'m'" in w for w in warnings)


class TestGmlGraphml:
    def test_gml_counts_and_attributes(self, listing3):
        listing3.add_causal_edge("Rain", "Wet", "Rain->Wet", confidence=0.9, time_lag_s=2.0,
                                 comment=["note"])
        parsed = parse_gml(export_gml(listing3))
        assert len(parsed["nodes"]) == 3
        assert len(parsed["edges"]) == 2
        labels = {n["label"] for n in parsed["nodes"]}
        assert labels == {"Rain", "Wet", "Slippery"}
        edge = next(e for e in parsed["edges"] if e["label"] == "Rain->Wet")
        assert edge["confidence"] == 0.9
        assert edge["time_lag_s"] == 2.0
        assert edge["comment"] == "note"

    def test_gml_escaping_round_trip(self, memory_graph):
        nasty = 'a"b&c<dé'
        memory_graph.add_causal_edge(nasty, "other", "the edge", force_create=True)
        parsed = parse_gml(export_gml(memory_graph))
        assert nasty in {n["label"] for n in parsed["nodes"]}

    def test_graphml_keys_declared_before_use(self, listing3):
        text = export_graphml(listing3)
        assert text.index("<key ") < text.index("<node ")
        parsed = parse_graphml(text)
        assert len(parsed["nodes"]) == 3
        assert len(parsed["edges"]) == 2

    def test_graphml_attributes(self, listing3):
        listing3.add_causal_edge("Rain", "Wet", "Rain->Wet", confidence=0.9, time_lag_s=2.0)
        parsed = parse_graphml(export_graphml(listing3))
        edge = next(e for e in parsed["edges"] if e["name"] == "Rain->Wet")
        assert float(edge["confidence"]) == 0.9
        assert float(edge["time_lag_s"]) == 2.0

    def test_deterministic_output(self, listing3):
        assert export_gml(listing3) == export_gml(listing3)
        assert export_graphml(listing3) == export_graphml(listing3)

    def test_file_writing(self, listing3, tmp_path):
        gml_path = tmp_path / "g.gml"
        export_gml(listing3, gml_path)
        assert parse_gml(gml_path.read_text(encoding="utf-8"))["nodes"]


class TestNtriplesDump:
    def test_dump_is_sorted_and_parseable(self, listing3):
        text = export_ntriples(listing3)
        lines = text.splitlines()
        assert lines == sorted(lines)
        from causalkg.rdf import parse_triple_line

        assert len([parse_triple_line(line) for line in lines]) == len(listing3.store)


class TestDocSerialization:
    def test_json_round_trip(self, listing3):
        doc = export_property_graph(listing3)
        again = PropertyGraphDoc.from_json(doc.to_json())
        assert again.to_json() == doc.to_json()

    def test_keys_sorted(self, listing3):
        payload = json.loads(export_property_graph(listing3).to_json())
        assert list(payload) == sorted(payload)

    def test_script_safe_escaping(self, memory_graph):
        memory_graph.add_causal_node("x</script><b>&amp;")
        text = export_property_graph(memory_graph).to_json()
        assert "</script>" not in text
        assert "<" not in text and ">" not in text and "&" not in text
        assert "x</script><b>&amp;" in json.dumps(
            json.loads(text)["nodes"][0]["name"], ensure_ascii=False
        )
