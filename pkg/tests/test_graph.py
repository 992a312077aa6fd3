import numpy as np
import pytest

from core.errors import GraphParseError, SchemeError, StructuralError
from core.graph import (
    U_SIDE,
    V_SIDE,
    Edge,
    LabeledGraph,
    bipartite_sides,
    build_core_graph,
    core_graph_from,
    deserialize,
    fold,
    from_edges,
    is_bipartite_scheme,
    rank,
    serialize,
    wedge_of_words,
)
from core.words import ABC, Alphabet, parse_word, parse_words

X12 = Alphabet.indexed(2)


def test_single_generator_is_a_loop():
    g = build_core_graph(parse_words(["x1"]), X12)
    assert g.num_vertices == 1
    assert g.edges == (Edge(0, 0, "x1"),)
    assert g.rank == 1


def test_trivial_subgroup():
    g = build_core_graph([], X12)
    assert g.num_vertices == 1 and g.num_edges == 0 and g.rank == 0


def test_folding_collapses_shared_prefixes():
    # x1x2 and x1X2 share the x1 edge; rank stays 2
    g = build_core_graph(parse_words(["x1x2", "x1X2"]), X12)
    assert g.rank == 2
    assert g.contains(parse_word("x1x2"))
    assert g.contains(parse_word("x2x2"))  # (x1X2)^-1 (x1x2)
    assert not g.contains(parse_word("x1"))


def test_hexagon_fixture_graphs(hexagon_pair):
    H, K = hexagon_pair
    assert (H.num_vertices, H.num_edges, H.rank) == (4, 5, 2)
    assert H.edges == (
        Edge(0, 1, "a"),
        Edge(0, 1, "c"),
        Edge(2, 3, "a"),
        Edge(2, 1, "b"),
        Edge(2, 3, "c"),
    )
    assert (K.num_vertices, K.num_edges, K.rank) == (4, 5, 2)
    assert K.contains(parse_word("cBcA"))


def test_basis_generates_same_subgroup(k23_pair):
    H, _ = k23_pair
    basis = H.basis()
    assert len(basis) == H.rank == 4
    assert build_core_graph(basis, ABC) == H


def test_rebase_moves_basepoint_and_trims():
    g = build_core_graph(parse_words(["x1x2X1"]), X12)
    assert g.num_vertices == 2
    moved = g.rebase(1)
    assert moved.num_vertices == 1
    assert moved.contains(parse_word("x2"))


def test_fold_merges_parallel_edges():
    g = LabeledGraph(X12, {0, 1, 2}, [Edge(0, 1, "x1"), Edge(0, 2, "x1")], basepoint=0)
    folded = fold(g)
    assert len(folded.vertices) == 2
    assert folded.is_folded()


def test_rank_of_disconnected_labeled_graph():
    g = LabeledGraph(X12, {0, 1}, [], basepoint=0)
    with pytest.raises(StructuralError):
        rank(g)


def test_serialize_roundtrip(k23_pair):
    H, _ = k23_pair
    text = serialize(H)
    assert text.startswith("alphabet: a b c\nbasepoint 0\n")
    assert deserialize(text) == H


def test_deserialize_accepts_rank_record():
    g = deserialize("basepoint 0\nedge 0 0 x1\nrank 1\n")
    assert g.rank == 1


def test_deserialize_errors():
    with pytest.raises(GraphParseError) as info:
        deserialize("basepoint 0\nedge 0 one x1\n")
    assert info.value.line_number == 2
    with pytest.raises(StructuralError):
        deserialize("basepoint 0\nedge 0 1 x1\nedge 0 2 x1\n")
    with pytest.raises(StructuralError):
        deserialize("basepoint 0\nedge 0 0 x1\nedge 0 1 x2\n")


def test_bipartite_sides(hexagon_pair):
    H, _ = hexagon_pair
    sides = bipartite_sides(H)
    assert sides == {0: U_SIDE, 1: V_SIDE, 2: U_SIDE, 3: V_SIDE}


def test_bipartite_sides_rejects_non_theta_graphs():
    g = from_edges(ABC, [(0, 0, "a")])
    with pytest.raises(SchemeError):
        bipartite_sides(g)
    assert not is_bipartite_scheme(build_core_graph(parse_words(["x1"]), X12))


@pytest.mark.parametrize("seed", range(8))
def test_folding_ignores_edge_and_vertex_order(seed, k23_pair):
    rng = np.random.default_rng(seed)
    H, _ = k23_pair
    generators = H.basis() + [parse_word("cAcB"), parse_word("bCaC")]
    expected = build_core_graph(generators, ABC)

    order = list(rng.permutation(len(generators)))
    wedge = wedge_of_words([generators[i] for i in order], ABC)
    relabel = {v: int(w) for v, w in zip(sorted(wedge.vertices), rng.permutation(len(wedge.vertices)))}
    edges = [Edge(relabel[e.origin], relabel[e.terminus], e.label) for e in wedge.edges]
    shuffled = [edges[i] for i in rng.permutation(len(edges))]
    g = LabeledGraph(ABC, set(relabel.values()), shuffled, basepoint=relabel[wedge.basepoint])

    assert core_graph_from(g) == expected
