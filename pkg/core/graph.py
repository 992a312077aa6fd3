from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx
from networkx.utils import UnionFind

from .errors import GraphParseError, SchemeError, StructuralError
from .words import ABC, Alphabet, EMPTY, Word, concat, invert, reduce

logger = logging.getLogger(__name__)

U_SIDE = "u"
V_SIDE = "v"


class Edge(NamedTuple):
    origin: int
    terminus: int
    label: str


@dataclass
class LabeledGraph:
    """Mutable directed labeled graph used while building and folding."""

    alphabet: Alphabet
    vertices: Set[int] = field(default_factory=set)
    edges: List[Edge] = field(default_factory=list)
    basepoint: Optional[int] = None

    def add_vertex(self) -> int:
        v = max(self.vertices, default=-1) + 1
        self.vertices.add(v)
        return v

    def add_edge(self, origin: int, terminus: int, label: str) -> None:
        if label not in self.alphabet:
            raise StructuralError(f"Edge label {label!r} not in alphabet {self.alphabet.letters}")
        if origin not in self.vertices or terminus not in self.vertices:
            raise StructuralError(f"Edge {origin}->{terminus} references a missing vertex")
        self.edges.append(Edge(origin, terminus, label))

    def valences(self) -> Dict[int, int]:
        val = {v: 0 for v in self.vertices}
        for e in self.edges:
            val[e.origin] += 1
            val[e.terminus] += 1
        return val

    def is_folded(self) -> bool:
        out: Set[Tuple[int, str]] = set()
        inc: Set[Tuple[int, str]] = set()
        for e in self.edges:
            if (e.origin, e.label) in out or (e.terminus, e.label) in inc:
                return False
            out.add((e.origin, e.label))
            inc.add((e.terminus, e.label))
        return True

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        for v in self.vertices:
            g.add_node(v, base=(v == self.basepoint))
        for e in self.edges:
            g.add_edge(e.origin, e.terminus, label=e.label)
        return g

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        return nx.is_weakly_connected(self.to_networkx())


@dataclass(frozen=True)
class CoreGraph:
    """Folded, connected, based graph with no hanging trees away from the basepoint.

    Vertices are ``0 .. num_vertices-1`` in canonical breadth-first order, so the
    basepoint is always 0 and equal based graphs compare equal.
    """

    alphabet: Alphabet
    num_vertices: int
    edges: Tuple[Edge, ...]
    basepoint: int = 0

    @cached_property
    def out_map(self) -> Dict[Tuple[int, str], int]:
        return {(e.origin, e.label): i for i, e in enumerate(self.edges)}

    @cached_property
    def in_map(self) -> Dict[Tuple[int, str], int]:
        return {(e.terminus, e.label): i for i, e in enumerate(self.edges)}

    @cached_property
    def valences(self) -> Tuple[int, ...]:
        val = [0] * self.num_vertices
        for e in self.edges:
            val[e.origin] += 1
            val[e.terminus] += 1
        return tuple(val)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(self.num_vertices)

    @property
    def rank(self) -> int:
        return self.num_edges - self.num_vertices + 1

    def valence(self, v: int) -> int:
        return self.valences[v]

    def labels_at(self, v: int) -> frozenset:
        """Labels of the edges incident to ``v``."""
        labels = {l for l in self.alphabet if (v, l) in self.out_map or (v, l) in self.in_map}
        return frozenset(labels)

    def step(self, v: int, letter: str, sign: int) -> Optional[int]:
        if sign > 0:
            i = self.out_map.get((v, letter))
            return None if i is None else self.edges[i].terminus
        i = self.in_map.get((v, letter))
        return None if i is None else self.edges[i].origin

    def trace(self, w: Word, start: Optional[int] = None) -> Optional[int]:
        v = self.basepoint if start is None else start
        for letter, sign in w.syllables:
            v = self.step(v, letter, sign)
            if v is None:
                return None
        return v

    def contains(self, w: Word) -> bool:
        return self.trace(w) == self.basepoint

    def spanning_paths(self) -> Dict[int, Word]:
        """Label of the breadth-first tree path from the basepoint to every vertex."""
        paths: Dict[int, Word] = {self.basepoint: EMPTY}
        queue = deque([self.basepoint])
        while queue:
            v = queue.popleft()
            for letter in self.alphabet:
                for sign in (1, -1):
                    w = self.step(v, letter, sign)
                    if w is not None and w not in paths:
                        paths[w] = reduce(paths[v].syllables + ((letter, sign),))
                        queue.append(w)
        return paths

    def basis(self) -> List[Word]:
        """Free basis read off the breadth-first spanning tree."""
        paths = self.spanning_paths()
        tree: Set[int] = set()
        for v, path in paths.items():
            if path.is_empty():
                continue
            letter, sign = path.syllables[-1]
            prev = self.step(v, letter, -sign)
            if sign > 0:
                tree.add(self.out_map[(prev, letter)])
            else:
                tree.add(self.in_map[(prev, letter)])
        basis = []
        for i, e in enumerate(self.edges):
            if i in tree:
                continue
            basis.append(concat(paths[e.origin], Word(((e.label, 1),)), invert(paths[e.terminus])))
        return basis

    def shortest_path(self, target: int) -> Word:
        return self.spanning_paths()[target]

    def rebase(self, v: int) -> "CoreGraph":
        """Move the basepoint to ``v`` and trim what becomes a hanging tree."""
        g = LabeledGraph(self.alphabet, set(self.vertices), list(self.edges), basepoint=v)
        core, _ = canonicalize(trim(g))
        return core

    def sides(self) -> Dict[int, str]:
        return bipartite_sides(self)

    def to_labeled(self) -> LabeledGraph:
        return LabeledGraph(self.alphabet, set(self.vertices), list(self.edges), basepoint=self.basepoint)

    def to_networkx(self) -> nx.MultiDiGraph:
        return self.to_labeled().to_networkx()

    def is_isomorphic(self, other: "CoreGraph") -> bool:
        # Canonical numbering makes based isomorphism plain equality.
        return self.edges == other.edges and self.num_vertices == other.num_vertices

    @classmethod
    def trivial(cls, alphabet: Alphabet) -> "CoreGraph":
        return cls(alphabet, 1, (), 0)


def fold(g: LabeledGraph, basepoint: Optional[int] = None) -> LabeledGraph:
    """Identify edges sharing a label and an origin (or terminus) until none remain."""
    base = g.basepoint if basepoint is None else basepoint
    uf = UnionFind(g.vertices)
    merging = True
    while merging:
        merging = False
        out: Dict[Tuple[int, str], int] = {}
        inc: Dict[Tuple[int, str], int] = {}
        for e in g.edges:
            o, t = uf[e.origin], uf[e.terminus]
            key = (o, e.label)
            if key in out and uf[out[key]] != t:
                uf.union(out[key], t)
                merging = True
            else:
                out[key] = t
            o, t = uf[e.origin], uf[e.terminus]
            key = (t, e.label)
            if key in inc and uf[inc[key]] != o:
                uf.union(inc[key], o)
                merging = True
            else:
                inc[key] = o
    edges = sorted({Edge(uf[e.origin], uf[e.terminus], e.label) for e in g.edges})
    folded = LabeledGraph(g.alphabet, {uf[v] for v in g.vertices}, edges, basepoint=None if base is None else uf[base])
    logger.debug(f"Folded {len(g.vertices)} vertices/{len(g.edges)} edges into {len(folded.vertices)}/{len(edges)}")
    return folded


def trim(g: LabeledGraph) -> LabeledGraph:
    """Restrict to the basepoint component and strip hanging trees away from the basepoint."""
    base = g.basepoint
    adjacency: Dict[int, List[int]] = {v: [] for v in g.vertices}
    for i, e in enumerate(g.edges):
        adjacency[e.origin].append(i)
        adjacency[e.terminus].append(i)
    seen = {base}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for i in adjacency[v]:
            e = g.edges[i]
            for w in (e.origin, e.terminus):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    alive_edges = {i for i, e in enumerate(g.edges) if e.origin in seen}
    valence = {v: 0 for v in seen}
    for i in alive_edges:
        e = g.edges[i]
        valence[e.origin] += 1
        valence[e.terminus] += 1
    leaves = deque(v for v in seen if v != base and valence[v] <= 1)
    alive = set(seen)
    while leaves:
        v = leaves.popleft()
        if v not in alive:
            continue
        alive.discard(v)
        for i in adjacency[v]:
            if i not in alive_edges:
                continue
            alive_edges.discard(i)
            e = g.edges[i]
            other = e.terminus if e.origin == v else e.origin
            if other in alive:
                valence[other] -= 1
                if other != base and valence[other] <= 1:
                    leaves.append(other)
    return LabeledGraph(g.alphabet, alive, [g.edges[i] for i in sorted(alive_edges)], basepoint=base)


def canonicalize(g: LabeledGraph) -> Tuple[CoreGraph, Dict[int, int]]:
    """Renumber a folded connected graph breadth-first from its basepoint."""
    out: Dict[Tuple[int, str], int] = {}
    inc: Dict[Tuple[int, str], int] = {}
    for e in g.edges:
        out[(e.origin, e.label)] = e.terminus
        inc[(e.terminus, e.label)] = e.origin
    order = {g.basepoint: 0}
    queue = deque([g.basepoint])
    while queue:
        v = queue.popleft()
        for table in (out, inc):
            for letter in g.alphabet:
                w = table.get((v, letter))
                if w is not None and w not in order:
                    order[w] = len(order)
                    queue.append(w)
    if len(order) != len(g.vertices):
        raise StructuralError("Graph is not connected; a core graph must be connected.")
    rank_of = {l: i for i, l in enumerate(g.alphabet)}
    edges = sorted(
        (Edge(order[e.origin], order[e.terminus], e.label) for e in g.edges),
        key=lambda e: (e.origin, rank_of[e.label], e.terminus),
    )
    return CoreGraph(g.alphabet, len(order), tuple(edges), 0), order


def core_graph_from(g: LabeledGraph) -> CoreGraph:
    core, _ = canonicalize(trim(fold(g)))
    return core


def wedge_of_words(generators: Sequence[Word], alphabet: Alphabet) -> LabeledGraph:
    g = LabeledGraph(alphabet, {0}, [], basepoint=0)
    for w in generators:
        if w.is_empty():
            continue
        current = 0
        for pos, (letter, sign) in enumerate(w.syllables):
            nxt = 0 if pos == len(w) - 1 else g.add_vertex()
            if sign > 0:
                g.add_edge(current, nxt, letter)
            else:
                g.add_edge(nxt, current, letter)
            current = nxt
    return g


def build_core_graph(generators: Sequence[Word], alphabet: Alphabet) -> CoreGraph:
    """Stallings construction: wedge of subdivided loops, fold, trim.

    Args:
        generators: reduced words; empty words are skipped
        alphabet: edge labels of the result, which may exceed the letters used

    Returns:
        The canonical CoreGraph, numbered breadth-first from basepoint 0.

    Raises:
        StructuralError: a generator uses a letter outside ``alphabet``.
    """
    core = core_graph_from(wedge_of_words(generators, alphabet))
    logger.debug(f"Built core graph: {core.num_vertices} vertices, {core.num_edges} edges, rank {core.rank}")
    return core


def rank(g: CoreGraph | LabeledGraph) -> int:
    """Free rank of pi_1, i.e. #E - #V + 1 for a connected graph."""
    if isinstance(g, LabeledGraph):
        if not g.is_connected():
            raise StructuralError("rank is only defined for connected graphs.")
        return len(g.edges) - len(g.vertices) + 1
    return g.rank


def contains(g: CoreGraph, w: Word) -> bool:
    return g.contains(w)


def bipartite_sides(g: CoreGraph) -> Dict[int, str]:
    """u/v side of every vertex for a graph over the a/b/c scheme (edges run u -> v)."""
    if not set(g.alphabet.letters) <= set(ABC.letters):
        raise SchemeError(
            f"Graph alphabet {g.alphabet.letters} is not the a/b/c scheme; apply theta_embed first."
        )
    sides: Dict[int, str] = {}
    for e in g.edges:
        if (
            e.origin == e.terminus
            or sides.get(e.origin, U_SIDE) != U_SIDE
            or sides.get(e.terminus, V_SIDE) != V_SIDE
        ):
            raise SchemeError(
                f"Vertex on edge {e.origin}->{e.terminus} is both a source and a sink; "
                "the graph is not a theta-image, apply theta_embed first."
            )
        sides[e.origin] = U_SIDE
        sides[e.terminus] = V_SIDE
    for v in g.vertices:
        sides.setdefault(v, U_SIDE)
    return sides


def is_bipartite_scheme(g: CoreGraph) -> bool:
    try:
        bipartite_sides(g)
    except SchemeError:
        return False
    return True


def serialize(g: CoreGraph) -> str:
    lines = ["alphabet: " + " ".join(g.alphabet.letters), f"basepoint {g.basepoint}"]
    lines.extend(f"edge {e.origin} {e.terminus} {e.label}" for e in g.edges)
    return "\n".join(lines) + "\n"


def parse_graph_text(text: str) -> LabeledGraph:
    alphabet: Optional[Alphabet] = None
    basepoint: Optional[int] = None
    records: List[Tuple[int, int, str, int]] = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.lower().startswith("alphabet:"):
            try:
                alphabet = Alphabet(tuple(stripped.split(":", 1)[1].split()))
            except ValueError as e:
                raise GraphParseError(number, str(e)) from e
            continue
        parts = stripped.split()
        try:
            if parts[0] == "basepoint" and len(parts) == 2:
                basepoint = int(parts[1])
            elif parts[0] == "edge" and len(parts) == 4:
                records.append((int(parts[1]), int(parts[2]), parts[3], number))
            elif parts[0] == "rank" and len(parts) == 2:
                int(parts[1])  # informational; recomputed from the edges
            else:
                raise GraphParseError(number, f"unrecognized record {stripped!r}")
        except ValueError as e:
            if isinstance(e, GraphParseError):
                raise
            raise GraphParseError(number, f"expected integers in {stripped!r}") from e
    if basepoint is None:
        raise GraphParseError(0, "missing 'basepoint' record")
    if alphabet is None:
        alphabet = Alphabet.infer([Word(((label, 1),)) for _, _, label, _ in records]) if records else Alphabet(("a",))
    g = LabeledGraph(alphabet, {basepoint}, [], basepoint=basepoint)
    for origin, terminus, label, number in records:
        if label not in alphabet:
            raise GraphParseError(number, f"label {label!r} not in alphabet {alphabet.letters}")
        g.vertices.update((origin, terminus))
        g.edges.append(Edge(origin, terminus, label))
    return g


def deserialize(text: str) -> CoreGraph:
    g = parse_graph_text(text)
    if not g.is_folded():
        raise StructuralError("Graph file is not folded.")
    if not g.is_connected():
        raise StructuralError("Graph file is not connected.")
    valence = g.valences()
    hanging = [v for v, d in valence.items() if d <= 1 and v != g.basepoint]
    if hanging:
        raise StructuralError(f"Graph file is not a core graph: hanging vertices {sorted(hanging)}")
    core, _ = canonicalize(g)
    return core


def from_edges(alphabet: Alphabet, edges: Iterable[Tuple[int, int, str]], basepoint: int = 0) -> CoreGraph:
    """Core graph from an explicit edge list (folded and trimmed on the way in)."""
    g = LabeledGraph(alphabet, {basepoint}, [], basepoint=basepoint)
    for o, t, l in edges:
        g.vertices.update((o, t))
        g.add_edge(o, t, l)
    return core_graph_from(g)


# Quick validation when run directly: python -m core.graph
if __name__ == "__main__":
    from .words import parse_words

    H = build_core_graph(parse_words(["cA", "cBcAbC"], ABC), ABC)
    assert (H.num_vertices, H.num_edges, H.rank) == (4, 5, 2)
    assert deserialize(serialize(H)) == H
    print("✓ core graph construction validated")
