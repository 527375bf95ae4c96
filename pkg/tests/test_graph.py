import pytest
from hypothesis import given, settings

from indsets.errors import PreconditionError
from indsets.graph import (
    clique, complete_bipartite, cycle, disjoint_union, empty_graph, format_edge_list,
    from_edge_list, gadget, greedy_bound, greedy_independent_set, is_independent, is_regular,
    is_triangle_free, parse_edge_list, path, petersen, random_bounded_degree, random_regular,
    read_edge_list, replicate, write_edge_list,
)
from strategies import graphs


def test_from_edge_list_dedups_and_sorts():
    G = from_edge_list(4, [(2, 0), (0, 2), (1, 0), (3, 2)])
    assert G.num_edges == 3
    assert G.adj == ((1, 2), (0,), (0, 3), (2,))
    assert G.edges() == [(0, 1), (0, 2), (2, 3)]
    assert G.degrees() == [2, 1, 2, 1]


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 5)], [(-1, 2)]])
def test_from_edge_list_rejects_bad_edges(edges):
    with pytest.raises(PreconditionError):
        from_edge_list(3, edges)


def test_petersen():
    G = petersen()
    assert G.n == 10 and G.num_edges == 15
    assert is_regular(G, 3) and is_triangle_free(G)


def test_small_families():
    assert clique(5).num_edges == 10
    assert complete_bipartite(3, 4).num_edges == 12
    assert cycle(6).max_degree == 2 and path(6).num_edges == 5
    assert not is_triangle_free(clique(3))
    with pytest.raises(PreconditionError):
        cycle(2)


def test_gadget_shape():
    H = gadget(1, 3, 3)
    assert H.n == 2 * 3 + 3 * 4
    assert is_regular(H, 3)
    with pytest.raises(PreconditionError):
        gadget(0, 0, 3)


def test_union_and_replicate():
    U = disjoint_union(clique(3), path(2))
    assert U.n == 5 and U.edges() == [(0, 1), (0, 2), (1, 2), (3, 4)]
    R = replicate(path(2), 3)
    assert R.edges() == [(0, 1), (2, 3), (4, 5)]
    assert replicate(path(2), 0).n == 0


def test_random_regular_is_simple_and_reproducible():
    G = random_regular(30, 3, seed=5)
    assert is_regular(G, 3)
    assert G == random_regular(30, 3, seed=5)
    with pytest.raises(PreconditionError):
        random_regular(5, 3)
    with pytest.raises(PreconditionError):
        random_regular(4, 4)


def test_random_bounded_degree_respects_cap():
    G = random_bounded_degree(40, 3, 0.5, seed=1)
    assert G.max_degree <= 3
    assert G == random_bounded_degree(40, 3, 0.5, seed=1)


def test_greedy():
    G = cycle(5)
    assert greedy_independent_set(G, 2) == frozenset({0, 2})
    with pytest.raises(PreconditionError):
        greedy_independent_set(G, 3)
    assert greedy_bound(petersen()) == 3
    assert greedy_bound(empty_graph(0)) == 0


def test_is_independent_rejects_foreign_vertices():
    with pytest.raises(PreconditionError):
        is_independent(path(3), {5})


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_edge_list_round_trip(G):
    assert parse_edge_list(format_edge_list(G)) == G


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_greedy_meets_its_bound(G):
    S = greedy_independent_set(G, greedy_bound(G))
    assert is_independent(G, S)


def test_parse_comments_and_blank_lines(tmp_path):
    text = "# a triangle\n3 3\n\n0 1  # first\n1 2\n2 0\n"
    G = parse_edge_list(text)
    assert G == clique(3)
    f = tmp_path / "g.el"
    write_edge_list(G, f)
    assert read_edge_list(f) == G


@pytest.mark.parametrize("text", ["", "3\n", "3 2\n0 1\n", "2 1\n0 1 2\n", "2 1\n0 0\n"])
def test_parse_errors(text):
    with pytest.raises(PreconditionError):
        parse_edge_list(text)


def test_csr_matches_adjacency():
    G = petersen()
    for v in range(G.n):
        assert tuple(G.indices[G.indptr[v]:G.indptr[v + 1]]) == G.adj[v]
    assert int(G.mask_array[0]) == G.masks[0]
