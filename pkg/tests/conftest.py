from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import strategies as st

from cotree import random_cograph
from graph_core import Graph, from_edge_list


def to_nx(G: Graph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(G.n))
    g.add_edges_from(G.edges())
    return g


@st.composite
def graphs(draw: st.DrawFn, min_n: int = 0, max_n: int = 8) -> Graph:
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return from_edge_list(n, chosen)


@st.composite
def cographs(draw: st.DrawFn, min_n: int = 1, max_n: int = 40):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    bias = draw(st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]))
    seed = draw(st.integers(min_value=0, max_value=10_000))
    return random_cograph(n, bias, seed)


@pytest.fixture
def half8():
    from generators import half_graph

    return half_graph(8)
