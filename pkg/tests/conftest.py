from __future__ import annotations

from pathlib import Path

import pytest

from causalkg.graph import Graph

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def pizza_ttl() -> Path:
    return FIXTURES / "pizza.ttl"


@pytest.fixture
def memory_graph() -> Graph:
    return Graph()


@pytest.fixture
def store_path(tmp_path) -> Path:
    return tmp_path / "graph.cstore"


def build_listing3(graph: Graph) -> Graph:
    """Rain/Wet/Slippery demo graph: 3 nodes, 2 named edges."""
    graph.add_causal_node("Rain")
    graph.add_causal_node("Wet", comment=["some text"])
    graph.add_causal_edge("Rain", "Wet", "Rain->Wet")
    graph.add_causal_edge("Wet", "Slippery", "Wet->Slippery", force_create=True)
    return graph


@pytest.fixture
def listing3(memory_graph) -> Graph:
    return build_listing3(memory_graph)
