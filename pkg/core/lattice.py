from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import categorical_multiedge_match, categorical_node_match
from networkx.utils import UnionFind

from .errors import TheoremViolation
from .graph import CoreGraph, Edge, LabeledGraph, canonicalize, core_graph_from, trim, build_core_graph
from .words import Alphabet, Word

logger = logging.getLogger(__name__)

Element = Tuple[str, int]  # ("H" | "K", vertex or edge index)


def reduced_rank(r: int) -> int:
    return max(0, r - 1)


@dataclass(frozen=True)
class RankProfile:
    """(rk H, rk K, rk H∨K, rk H∩K) with derived i = h + k - v."""

    h: int
    k: int
    v: int
    c: int

    @property
    def i(self) -> int:
        return self.h + self.k - self.v

    @property
    def rr_h(self) -> int:
        return reduced_rank(self.h)

    @property
    def rr_k(self) -> int:
        return reduced_rank(self.k)

    @property
    def rr_c(self) -> int:
        return reduced_rank(self.c)

    def canonical(self) -> "RankProfile":
        """Swap so that h <= k."""
        if self.h > self.k:
            return RankProfile(self.k, self.h, self.v, self.c)
        return self

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.h, self.k, self.v, self.c)

    def __str__(self) -> str:
        return f"({self.h},{self.k};{self.v},{self.c})"


@dataclass(frozen=True)
class PullbackResult:
    """Core graph of H∩K; vertex j of ``meet`` is the pair ``pairs[j]`` of (Γ_H, Γ_K) vertices."""

    H: CoreGraph
    K: CoreGraph
    meet: CoreGraph
    pairs: Tuple[Tuple[int, int], ...]

    def proj_vertex(self, side: str, v: int) -> int:
        return self.pairs[v][0 if side == "H" else 1]

    def proj_edge(self, side: str, i: int) -> int:
        e = self.meet.edges[i]
        factor = self.H if side == "H" else self.K
        return factor.out_map[(self.proj_vertex(side, e.origin), e.label)]

    @property
    def proj_H(self) -> Dict[Tuple[str, int], int]:
        return self._projection("H")

    @property
    def proj_K(self) -> Dict[Tuple[str, int], int]:
        return self._projection("K")

    def _projection(self, side: str) -> Dict[Tuple[str, int], int]:
        proj = {("vertex", v): self.proj_vertex(side, v) for v in self.meet.vertices}
        proj.update({("edge", i): self.proj_edge(side, i) for i in range(self.meet.num_edges)})
        return proj


def pullback(H: CoreGraph, K: CoreGraph) -> PullbackResult:
    """Core graph of H∩K as the basepoint component of the product graph.

    The product is explored lazily from (basepoint, basepoint) and trimmed to
    its core afterwards.

    Args:
        H: core graph of the first subgroup
        K: core graph of the second subgroup; alphabets are merged when they differ

    Returns:
        PullbackResult with the canonical meet graph and, per meet vertex, the
        (Γ_H, Γ_K) vertex pair it projects to. A trivial intersection gives the
        one-vertex graph.
    """
    alphabet = H.alphabet if H.alphabet == K.alphabet else H.alphabet.union(K.alphabet)
    start = (H.basepoint, K.basepoint)
    ids: Dict[Tuple[int, int], int] = {start: 0}
    product = LabeledGraph(alphabet, {0}, [], basepoint=0)
    recorded = set()
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        here = ids[pair]
        for letter in alphabet:
            for sign in (1, -1):
                p = H.step(pair[0], letter, sign)
                q = K.step(pair[1], letter, sign)
                if p is None or q is None:
                    continue
                target = (p, q)
                if target not in ids:
                    ids[target] = len(ids)
                    product.vertices.add(ids[target])
                    queue.append(target)
                there = ids[target]
                edge = Edge(here, there, letter) if sign > 0 else Edge(there, here, letter)
                if edge not in recorded:
                    recorded.add(edge)
                    product.edges.append(edge)
    meet, order = canonicalize(trim(product))
    pairs: List[Tuple[int, int]] = [(0, 0)] * meet.num_vertices
    for pair, old in ids.items():
        if old in order:
            pairs[order[old]] = pair
    logger.debug(f"Pullback explored {len(ids)} pairs; core has {meet.num_vertices} vertices, rank {meet.rank}")
    return PullbackResult(H, K, meet, tuple(pairs))


def join(H: CoreGraph, K: CoreGraph) -> CoreGraph:
    """Wedge Γ_H and Γ_K at their basepoints and fold."""
    alphabet = H.alphabet if H.alphabet == K.alphabet else H.alphabet.union(K.alphabet)
    offset = H.num_vertices

    def k_vertex(v: int) -> int:
        return H.basepoint if v == K.basepoint else offset + v

    wedge = LabeledGraph(alphabet, set(H.vertices) | {k_vertex(v) for v in K.vertices}, list(H.edges), basepoint=H.basepoint)
    wedge.edges.extend(Edge(k_vertex(e.origin), k_vertex(e.terminus), e.label) for e in K.edges)
    return core_graph_from(wedge)


@dataclass
class PushoutGraph:
    """Quotient of Γ_H ⊔ Γ_K by the classes generated through the pullback."""

    graph: LabeledGraph
    vclass: Dict[Element, int]
    eclass: Dict[Element, int]

    @property
    def basepoint(self) -> int:
        return self.graph.basepoint

    @property
    def num_vertices(self) -> int:
        return len(self.graph.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.graph.edges)

    @property
    def rank(self) -> int:
        return self.num_edges - self.num_vertices + 1

    def label_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for e in self.graph.edges:
            counts[e.label] = counts.get(e.label, 0) + 1
        return counts

    def vertex_classes(self) -> List[List[Element]]:
        classes: List[List[Element]] = [[] for _ in range(self.num_vertices)]
        for member, cls in sorted(self.vclass.items()):
            classes[cls].append(member)
        return classes

    def is_folded(self) -> bool:
        return self.graph.is_folded()

    def to_networkx(self) -> nx.MultiDiGraph:
        return self.graph.to_networkx()

    def is_isomorphic(self, other: "PushoutGraph") -> bool:
        return nx.is_isomorphic(
            self.to_networkx(),
            other.to_networkx(),
            node_match=categorical_node_match("base", False),
            edge_match=categorical_multiedge_match("label", None),
        )

    def serialize(self) -> str:
        lines = ["alphabet: " + " ".join(self.graph.alphabet.letters), f"basepoint {self.basepoint}"]
        lines.extend(f"edge {e.origin} {e.terminus} {e.label}" for e in self.graph.edges)
        for cls, members in enumerate(self.vertex_classes()):
            lines.append(f"class {cls} " + " ".join(f"{side}{v}" for side, v in members))
        return "\n".join(lines) + "\n"


def _numbered(uf: UnionFind, elements: Sequence[Element]) -> Dict[Element, int]:
    numbering: Dict[Element, int] = {}
    by_root: Dict[Element, int] = {}
    for x in elements:
        root = uf[x]
        if root not in by_root:
            by_root[root] = len(by_root)
        numbering[x] = by_root[root]
    return numbering


def pushout(H: CoreGraph, K: CoreGraph, pb: Optional[PullbackResult] = None) -> PushoutGraph:
    """Topological pushout T; generally not folded, and rank(T) >= rank(join(H, K))."""
    pb = pb or pullback(H, K)
    vertices: List[Element] = [("H", v) for v in H.vertices] + [("K", v) for v in K.vertices]
    edges: List[Element] = [("H", i) for i in range(H.num_edges)] + [("K", i) for i in range(K.num_edges)]
    uf_v = UnionFind(vertices)
    uf_e = UnionFind(edges)
    for p, q in pb.pairs:
        uf_v.union(("H", p), ("K", q))
    for i in range(pb.meet.num_edges):
        uf_e.union(("H", pb.proj_edge("H", i)), ("K", pb.proj_edge("K", i)))
    vclass = _numbered(uf_v, vertices)
    eclass = _numbered(uf_e, edges)
    alphabet = pb.meet.alphabet
    graph = LabeledGraph(alphabet, set(vclass.values()), [], basepoint=vclass[("H", H.basepoint)])
    placed = set()
    for (side, i), cls in eclass.items():
        if cls in placed:
            continue
        placed.add(cls)
        factor = H if side == "H" else K
        e = factor.edges[i]
        graph.edges.append(Edge(vclass[(side, e.origin)], vclass[(side, e.terminus)], e.label))
    return PushoutGraph(graph, vclass, eclass)


def profile_of(H: CoreGraph, K: CoreGraph, pb: Optional[PullbackResult] = None, joined: Optional[CoreGraph] = None) -> RankProfile:
    pb = pb or pullback(H, K)
    joined = joined or join(H, K)
    profile = RankProfile(H.rank, K.rank, joined.rank, pb.meet.rank)
    if profile.rr_c > profile.rr_h * profile.rr_k:
        raise TheoremViolation(
            f"Hanna Neumann bound violated by {profile}",
            {"profile": profile.as_tuple(), "H": [str(w) for w in H.basis()], "K": [str(w) for w in K.basis()]},
        )
    return profile


def rank_profile(H_gens: Sequence[Word], K_gens: Sequence[Word], alphabet: Optional[Alphabet] = None) -> RankProfile:
    """End-to-end (h, k, v, c) for two generator lists."""
    alphabet = alphabet or Alphabet.infer(list(H_gens) + list(K_gens))
    H = build_core_graph(H_gens, alphabet)
    K = build_core_graph(K_gens, alphabet)
    return profile_of(H, K)
