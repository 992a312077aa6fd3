import numpy as np
import pytest

from core.colored import (
    CYAN,
    MAGENTA,
    YELLOW,
    ColoredMultigraph,
    EdgeAdditionCase,
    all_colored_multigraphs,
    classify_edge_addition,
    colored_edge,
    format_colored,
    has_nonmonochromatic_cycle,
    parse_colored_text,
    random_colored_multigraph,
    random_edge_sequence,
    sigma,
)
from core.errors import DomainError, GraphParseError


def graph(n, *edges):
    return ColoredMultigraph(n, frozenset(colored_edge(*e) for e in edges))


def check_sigma_bound(g: ColoredMultigraph) -> None:
    value = sigma(g)
    cycle = has_nonmonochromatic_cycle(g)
    assert value <= g.n, format_colored(g)
    assert (value == g.n) == (not cycle), format_colored(g)


def test_sigma_of_edgeless_graph_is_n():
    assert sigma(ColoredMultigraph(5)) == 5
    assert not has_nonmonochromatic_cycle(ColoredMultigraph(5))


def test_sigma_of_three_colored_triangle():
    g = graph(3, (0, 1, MAGENTA), (1, 2, YELLOW), (2, 0, CYAN))
    assert sigma(g) == 1
    assert has_nonmonochromatic_cycle(g)


def test_monochromatic_cycle_keeps_sigma_at_n():
    g = graph(3, (0, 1, CYAN), (1, 2, CYAN), (0, 2, CYAN))
    assert sigma(g) == 3
    assert not has_nonmonochromatic_cycle(g)


def test_two_colored_digon():
    g = graph(2, (0, 1, MAGENTA), (0, 1, YELLOW))
    assert has_nonmonochromatic_cycle(g)
    assert sigma(g) == 1


def test_validation():
    with pytest.raises(DomainError):
        graph(2, (0, 0, MAGENTA))
    with pytest.raises(DomainError):
        graph(2, (0, 2, MAGENTA))
    with pytest.raises(DomainError):
        graph(2, (0, 1, "red"))


def test_parse_and_format():
    g = parse_colored_text("edge 0 1 magenta\nedge 1 2 yellow\n# note\nedge 2 0 cyan\n")
    assert g.n == 3
    assert format_colored(g) == "vertices 3\nedge 0 1 magenta\nedge 0 2 cyan\nedge 1 2 yellow\n"
    assert parse_colored_text(format_colored(g)) == g
    with pytest.raises(GraphParseError):
        parse_colored_text("edge 0 1 purple\n")


def test_edge_addition_cases():
    path = graph(3, (0, 1, MAGENTA), (1, 2, MAGENTA))
    bent = graph(3, (0, 1, MAGENTA), (1, 2, YELLOW))
    joins = classify_edge_addition(graph(3, (0, 1, MAGENTA)), 1, 2, YELLOW)
    assert joins.case is EdgeAdditionCase.JOINS_COMPONENTS
    both = classify_edge_addition(bent, 0, 2, CYAN)
    assert both.case is EdgeAdditionCase.SEPARATE_IN_BOTH and both.sigma_delta == -2
    assert sigma(bent) == 3 and sigma(bent.with_edge(0, 2, CYAN)) == 1
    # magenta already joins 0 and 2, so only the yellow-cyan subgraph is split
    one = classify_edge_addition(path, 0, 2, CYAN)
    assert one.case is EdgeAdditionCase.SEPARATE_IN_ONE and one.sigma_delta == -1
    assert sigma(path.with_edge(0, 2, CYAN)) == sigma(path) - 1
    one = classify_edge_addition(path, 0, 2, YELLOW)
    assert one.case is EdgeAdditionCase.SEPARATE_IN_ONE and one.sigma_delta == -1
    mono = classify_edge_addition(path, 0, 2, MAGENTA)
    assert mono.case is EdgeAdditionCase.CONNECTED_IN_BOTH
    assert mono.monochromatic_path and not mono.closes_nonmonochromatic_cycle


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sigma_bound_exhaustive_small(n):
    for g in all_colored_multigraphs(n):
        check_sigma_bound(g)


@pytest.mark.slow
def test_sigma_bound_exhaustive_n4():
    for g in all_colored_multigraphs(4):
        check_sigma_bound(g)


def test_sigma_bound_random():
    rng = np.random.default_rng(7)
    for _ in range(2000):
        check_sigma_bound(random_colored_multigraph(int(rng.integers(1, 9)), rng))


@pytest.mark.slow
def test_sigma_bound_random_large_batch():
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        check_sigma_bound(random_colored_multigraph(int(rng.integers(1, 9)), rng))


def test_incremental_deltas_match_prediction():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        g = ColoredMultigraph(n)
        for e in random_edge_sequence(n, int(rng.integers(1, 3 * n)), rng):
            predicted = classify_edge_addition(g, e.u, e.v, e.color)
            after = g.with_edge(e.u, e.v, e.color)
            assert sigma(after) - sigma(g) == predicted.sigma_delta
            assert sigma(after) - sigma(g) in (0, -1, -2)
            if predicted.closes_nonmonochromatic_cycle:
                assert has_nonmonochromatic_cycle(after)
            g = after
