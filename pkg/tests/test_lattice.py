import pytest

from core.errors import TheoremViolation
from core.graph import build_core_graph
from core.lattice import PullbackResult, RankProfile, join, profile_of, pullback, pushout, rank_profile
from core.validator import validate_lattice_laws
from core.words import Alphabet, parse_word, parse_words


def test_hexagon_meet(hexagon_pair):
    H, K = hexagon_pair
    pb = pullback(H, K)
    assert pb.meet.num_vertices == 6
    assert pb.meet.num_edges == 6
    assert pb.meet.rank == 1
    assert pb.meet.contains(parse_word("cBcAbA"))
    assert pb.pairs[0] == (0, 0)
    assert sorted(pb.pairs) == [(0, 0), (1, 1), (1, 2), (2, 0), (2, 3), (3, 1)]


def test_meet_projections_respect_labels(hexagon_pair):
    H, K = hexagon_pair
    pb = pullback(H, K)
    for i, e in enumerate(pb.meet.edges):
        assert H.edges[pb.proj_edge("H", i)].label == e.label
        assert K.edges[pb.proj_edge("K", i)].label == e.label


def test_hexagon_join_is_the_theta_rose(hexagon_pair):
    H, K = hexagon_pair
    joined = join(H, K)
    assert joined.rank == 2
    assert joined.num_vertices == 2
    assert sorted(e.label for e in joined.edges) == ["a", "b", "c"]
    assert joined.contains(parse_word("cB"))


def test_hexagon_pushout(hexagon_pair):
    H, K = hexagon_pair
    T = pushout(H, K)
    assert T.num_vertices == 2
    assert T.num_edges == 4
    assert T.label_counts() == {"a": 1, "b": 1, "c": 2}
    assert T.rank == 3
    assert not T.is_folded()


def test_hexagon_profile(hexagon_pair):
    H, K = hexagon_pair
    profile = profile_of(H, K)
    assert profile.as_tuple() == (2, 2, 2, 1)
    assert profile.i == 2


def test_k23_profile(k23_pair):
    H, K = k23_pair
    pb = pullback(H, K)
    assert pb.meet.num_vertices == 15
    assert profile_of(H, K, pb).as_tuple() == (4, 2, 2, 4)
    assert pushout(H, K, pb).rank == 2


def test_rank_profile_from_words():
    profile = rank_profile(parse_words(["x1"]), parse_words(["x2"]))
    assert profile == RankProfile(1, 1, 2, 0)
    nested = rank_profile(parse_words(["x1x1"]), parse_words(["x1"]))
    assert nested.as_tuple() == (1, 1, 1, 1)


def test_lattice_laws_hold(k23_pair):
    H, K = k23_pair
    result = validate_lattice_laws(H, K)
    assert result.ok, result.errors


def test_profile_canonical_swap():
    p = RankProfile(5, 3, 6, 2)
    assert p.canonical() == RankProfile(3, 5, 6, 2)
    assert p.rr_h == 4 and p.rr_c == 1
    assert str(p) == "(5,3;6,2)"


def test_profile_of_flags_hanna_neumann_violations():
    # A corrupted meet rank must surface as a theorem violation.
    alphabet = Alphabet.indexed(2)
    H = build_core_graph(parse_words(["x1", "x2"]), alphabet)
    fake = build_core_graph(parse_words(["x1x1", "x2", "x1x2X1"]), alphabet)
    assert fake.rank == 3
    pb = PullbackResult(H, H, fake, tuple((0, 0) for _ in fake.vertices))
    with pytest.raises(TheoremViolation):
        profile_of(H, H, pb)
