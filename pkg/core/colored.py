from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Tuple

import networkx as nx
import numpy as np
from networkx.utils import UnionFind

from .errors import DomainError, GraphParseError

logger = logging.getLogger(__name__)

MAGENTA = "magenta"
YELLOW = "yellow"
CYAN = "cyan"
COLORS: Tuple[str, ...] = (MAGENTA, YELLOW, CYAN)

# Two-color subgraphs entering Σ: my, yc, mc.
COLOR_PAIRS: Tuple[Tuple[str, str], ...] = ((MAGENTA, YELLOW), (YELLOW, CYAN), (MAGENTA, CYAN))

# Ω_ab -> magenta, Ω_ac -> yellow, Ω_bc -> cyan.
COLOR_OF_LETTERS: Dict[str, str] = {"ab": MAGENTA, "ac": YELLOW, "bc": CYAN}


class ColoredEdge(NamedTuple):
    u: int
    v: int
    color: str


def colored_edge(u: int, v: int, color: str) -> ColoredEdge:
    return ColoredEdge(min(u, v), max(u, v), color)


@dataclass(frozen=True)
class ColoredMultigraph:
    """Loopless multigraph on ``0..n-1`` with at most one edge per color per vertex pair."""

    n: int
    edges: FrozenSet[ColoredEdge] = frozenset()

    def __post_init__(self) -> None:
        normalized = frozenset(colored_edge(*e) for e in self.edges)
        object.__setattr__(self, "edges", normalized)
        for e in normalized:
            if e.u == e.v:
                raise DomainError(f"Loop at vertex {e.u} is not allowed.")
            if not (0 <= e.u < self.n and 0 <= e.v < self.n):
                raise DomainError(f"Edge {e} leaves the vertex range 0..{self.n - 1}.")
            if e.color not in COLORS:
                raise DomainError(f"Unknown color {e.color!r}; expected one of {COLORS}.")

    def with_edge(self, u: int, v: int, color: str) -> "ColoredMultigraph":
        return ColoredMultigraph(self.n, self.edges | {colored_edge(u, v, color)})

    def sorted_edges(self) -> List[ColoredEdge]:
        return sorted(self.edges, key=lambda e: (e.u, e.v, COLORS.index(e.color)))

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.n))
        for e in self.sorted_edges():
            g.add_edge(e.u, e.v, color=e.color)
        return g


def _union_find(g: ColoredMultigraph, colors: Iterable[str]) -> UnionFind:
    allowed = set(colors)
    uf = UnionFind(range(g.n))
    for e in g.edges:
        if e.color in allowed:
            uf.union(e.u, e.v)
    return uf


def _count_components(g: ColoredMultigraph, colors: Iterable[str]) -> int:
    uf = _union_find(g, colors)
    return len({uf[v] for v in range(g.n)})


def sigma(g: ColoredMultigraph) -> int:
    """Σ = sum over components C of val_my(C) + val_yc(C) + val_mc(C) - 2.

    Every two-color component lies inside one full component, so the sum
    collapses to the total two-color component counts minus twice the number
    of components.
    """
    two_color = sum(_count_components(g, pair) for pair in COLOR_PAIRS)
    return two_color - 2 * _count_components(g, COLORS)


def has_nonmonochromatic_cycle(g: ColoredMultigraph) -> bool:
    """True iff some cycle uses at least two colors.

    Edges are subdivided so parallel edges become ordinary cycles; a block of
    the subdivision carrying two colors contains a cycle through both.
    """
    simple = nx.Graph()
    simple.add_nodes_from(range(g.n))
    color_of: Dict[Tuple[str, int], str] = {}
    for idx, e in enumerate(g.sorted_edges()):
        mid = ("e", idx)
        color_of[mid] = e.color
        simple.add_edge(e.u, mid)
        simple.add_edge(mid, e.v)
    for block in nx.biconnected_component_edges(simple):
        colors = {color_of[x if isinstance(x, tuple) else y] for x, y in block}
        if len(colors) > 1:
            return True
    return False


class EdgeAdditionCase(Enum):
    JOINS_COMPONENTS = "joins two components"
    SEPARATE_IN_BOTH = "endpoints separated in both affected two-color subgraphs"
    SEPARATE_IN_ONE = "endpoints separated in exactly one affected two-color subgraph"
    CONNECTED_IN_BOTH = "endpoints already connected in both affected two-color subgraphs"

    @property
    def sigma_delta(self) -> int:
        return {
            EdgeAdditionCase.JOINS_COMPONENTS: 0,
            EdgeAdditionCase.SEPARATE_IN_BOTH: -2,
            EdgeAdditionCase.SEPARATE_IN_ONE: -1,
            EdgeAdditionCase.CONNECTED_IN_BOTH: 0,
        }[self]


@dataclass(frozen=True)
class EdgeAddition:
    case: EdgeAdditionCase
    monochromatic_path: bool  # endpoints already joined by a path in the new edge's color

    @property
    def sigma_delta(self) -> int:
        return self.case.sigma_delta

    @property
    def closes_nonmonochromatic_cycle(self) -> bool:
        return self.case in (EdgeAdditionCase.SEPARATE_IN_BOTH, EdgeAdditionCase.SEPARATE_IN_ONE)


def classify_edge_addition(g: ColoredMultigraph, u: int, v: int, color: str) -> EdgeAddition:
    """Predict the change of Σ when the edge (u, v, color) is added to ``g``."""
    if u == v:
        raise DomainError("Loops are not allowed in colored multigraphs.")
    mono = _union_find(g, [color])
    monochromatic = mono[u] == mono[v]
    full = _union_find(g, COLORS)
    if full[u] != full[v]:
        return EdgeAddition(EdgeAdditionCase.JOINS_COMPONENTS, monochromatic)
    separated = 0
    for pair in COLOR_PAIRS:
        if color not in pair:
            continue
        uf = _union_find(g, pair)
        if uf[u] != uf[v]:
            separated += 1
    case = {
        2: EdgeAdditionCase.SEPARATE_IN_BOTH,
        1: EdgeAdditionCase.SEPARATE_IN_ONE,
        0: EdgeAdditionCase.CONNECTED_IN_BOTH,
    }[separated]
    return EdgeAddition(case, monochromatic)


def possible_edges(n: int) -> List[ColoredEdge]:
    return [ColoredEdge(u, v, c) for u, v in itertools.combinations(range(n), 2) for c in COLORS]


def all_colored_multigraphs(n: int) -> Iterator[ColoredMultigraph]:
    """Every element of C_n (2^(3·n(n-1)/2) graphs)."""
    candidates = possible_edges(n)
    for mask in range(1 << len(candidates)):
        chosen = frozenset(e for bit, e in enumerate(candidates) if mask >> bit & 1)
        yield ColoredMultigraph(n, chosen)


def random_colored_multigraph(n: int, rng: np.random.Generator, density: Optional[float] = None) -> ColoredMultigraph:
    candidates = possible_edges(n)
    p = rng.random() if density is None else density
    keep = rng.random(len(candidates)) < p
    return ColoredMultigraph(n, frozenset(e for e, k in zip(candidates, keep) if k))


def random_edge_sequence(n: int, length: int, rng: np.random.Generator) -> List[ColoredEdge]:
    """Random order of distinct candidate edges, for incremental-edge checks."""
    candidates = possible_edges(n)
    order = rng.permutation(len(candidates))[:length]
    return [candidates[i] for i in order]


def parse_colored_text(text: str) -> ColoredMultigraph:
    """Read ``edge <u> <v> <color>`` lines; an optional ``vertices <n>`` line fixes n."""
    declared: Optional[int] = None
    edges: List[ColoredEdge] = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        try:
            if parts[0] == "vertices" and len(parts) == 2:
                declared = int(parts[1])
            elif parts[0] == "edge" and len(parts) == 4:
                if parts[3] not in COLORS:
                    raise GraphParseError(number, f"unknown color {parts[3]!r}")
                edges.append(colored_edge(int(parts[1]), int(parts[2]), parts[3]))
            else:
                raise GraphParseError(number, f"unrecognized record {stripped!r}")
        except ValueError as e:
            if isinstance(e, GraphParseError):
                raise
            raise GraphParseError(number, f"expected integers in {stripped!r}") from e
    n = declared if declared is not None else max((max(e.u, e.v) for e in edges), default=-1) + 1
    return ColoredMultigraph(n, frozenset(edges))


def format_colored(g: ColoredMultigraph) -> str:
    lines = [f"vertices {g.n}"]
    lines.extend(f"edge {e.u} {e.v} {e.color}" for e in g.sorted_edges())
    return "\n".join(lines) + "\n"


# Quick validation when run directly: python -m core.colored
if __name__ == "__main__":
    triangle = ColoredMultigraph(3, frozenset({colored_edge(0, 1, MAGENTA), colored_edge(1, 2, YELLOW), colored_edge(0, 2, CYAN)}))
    assert sigma(triangle) == 1 and has_nonmonochromatic_cycle(triangle)
    assert sigma(ColoredMultigraph(5)) == 5
    print("✓ Σ validated")
