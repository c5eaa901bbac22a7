import itertools

import networkx as nx
import pytest

from totalcol.budget import Budget, BudgetExceeded
from totalcol.graph import ColorAssignment, from_edges, verify_edge_coloring, verify_total_coloring
from totalcol.oracle import (brute_total_chromatic, conflict_graph, element_order, independence_lower_bound,
                             max_total_independent_set, vizing_edge_coloring)


def atlas_graphs(max_elements=None):
    for G in nx.graph_atlas_g()[1:]:
        if G.number_of_edges() == 0:
            continue
        n = G.number_of_nodes()
        if max_elements and n + G.number_of_edges() > max_elements:
            continue
        yield from_edges([(a + 1, b + 1) for a, b in G.edges()], n=n)


def naive_chi(g):
    """Smallest k with a total coloring, by plain product enumeration."""
    for k in itertools.count(1):
        for cols in itertools.product(range(1, k + 1), repeat=g.n + g.m):
            ca = ColorAssignment(dict(enumerate(cols[:g.n], 1)), dict(enumerate(cols[g.n:], 1)))
            if verify_total_coloring(g, ca):
                return k


def test_anchor_values(k2, k3, k4):
    assert brute_total_chromatic(k2).chi_total == 3
    assert brute_total_chromatic(k3).chi_total == 3
    res = brute_total_chromatic(k4)
    assert res.chi_total == 5 and res.certificate == "exhausted search with 4 colors"
    assert max_total_independent_set(k4) == 2
    assert independence_lower_bound(k4) == 5


def test_c5():
    c5 = from_edges([(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)])
    assert brute_total_chromatic(c5).chi_total == 4


def test_witness_uses_chi_colors(k4):
    res = brute_total_chromatic(k4)
    assert verify_total_coloring(k4, res.witness)
    assert res.witness.colors_used() == set(range(1, 6))


def test_matches_naive_enumeration():
    for g in atlas_graphs(max_elements=8):
        assert brute_total_chromatic(g).chi_total == naive_chi(g), g.edges


def test_conjecture_range_on_atlas():
    for g in atlas_graphs():
        chi = brute_total_chromatic(g).chi_total
        assert g.delta + 1 <= chi <= g.delta + 2


def test_k_max_and_budget(k4):
    assert brute_total_chromatic(k4, 4).chi_total is None
    with pytest.raises(ValueError):
        brute_total_chromatic(k4, 3)
    with pytest.raises(BudgetExceeded):
        brute_total_chromatic(k4, 5, Budget(3))


def test_element_order_is_permutation(k4):
    elems, adj = conflict_graph(k4)
    order = element_order(k4, adj)
    assert sorted(order) == list(range(len(elems)))
    # a max-degree vertex then its incident edges
    assert elems[order[0]][0] == "v"
    assert all(elems[t][0] == "e" for t in order[1:4])


def test_vizing_examples(p3, k4):
    assert len(set(vizing_edge_coloring(p3).edge_colors.values())) == 2
    c5 = from_edges([(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)])
    assert len(set(vizing_edge_coloring(c5).edge_colors.values())) == 3
    assert len(set(vizing_edge_coloring(k4).edge_colors.values())) == 3


def test_vizing_on_atlas():
    for g in atlas_graphs():
        ec = vizing_edge_coloring(g).edge_colors
        assert verify_edge_coloring(g, ec, range(1, g.delta + 2))
