from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Tuple

import networkx as nx

from .dicks import FULL, DicksBundle, format_element, format_labels
from .errors import DomainError, TheoremViolation
from .graph import U_SIDE, V_SIDE

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SigVertex:
    """A copy of K_{s,t} in Ω: its Γ_H-part, its Γ_K-part and the letters x with the copy inside X."""

    side: str
    h_part: Tuple[int, ...]
    k_part: Tuple[int, ...]
    letters: FrozenSet[str]

    @property
    def key(self) -> Tuple[str, Tuple[int, ...], Tuple[int, ...]]:
        return (self.side, self.h_part, self.k_part)

    def __str__(self) -> str:
        h = ",".join(format_element(("H", p)) for p in self.h_part)
        k = ",".join(format_element(("K", q)) for q in self.k_part)
        return f"{self.side}{{{h}|{k}}}[{format_labels(self.letters)}]"


@dataclass
class SigGraph:
    s: int
    t: int
    vertices: List[SigVertex] = field(default_factory=list)
    edges: List[Tuple[int, int, str]] = field(default_factory=list)  # (u-copy, v-copy, letter)

    def valence(self, i: int) -> int:
        return sum((a == i) + (b == i) for a, b, _ in self.edges)

    def valences(self) -> List[int]:
        val = [0] * len(self.vertices)
        for a, b, _ in self.edges:
            val[a] += 1
            val[b] += 1
        return val

    def odd_valence_count(self) -> int:
        return sum(1 for d in self.valences() if d % 2)

    def parity_ok(self) -> bool:
        return self.odd_valence_count() % 2 == 0

    def valence_histogram(self) -> Dict[int, int]:
        hist: Dict[int, int] = {}
        for d in self.valences():
            hist[d] = hist.get(d, 0) + 1
        return dict(sorted(hist.items()))

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(len(self.vertices)))
        for a, b, letter in self.edges:
            g.add_edge(a, b, label=letter)
        return g

    def render(self) -> str:
        lines = [f"SIG(K_{{{self.s},{self.t}}}): {len(self.vertices)} vertices, {len(self.edges)} edges"]
        lines.extend(f"  {i}: {v}" for i, v in enumerate(self.vertices))
        lines.extend(f"  {a} -{letter}-> {b}" for a, b, letter in self.edges)
        lines.append(f"odd-valence vertices: {self.odd_valence_count()}")
        return "\n".join(lines) + "\n"


def _copies(b: DicksBundle, side: str, h_size: int, k_size: int) -> List[SigVertex]:
    omega = b.omega
    h_nodes = sorted(x for x in omega if x[0] == "H" and b.sides[x] == side)
    found: List[SigVertex] = []
    for h_part in itertools.combinations(h_nodes, h_size):
        common = set(omega[h_part[0]])
        for x in h_part[1:]:
            common &= set(omega[x])
        for k_part in itertools.combinations(sorted(common), k_size):
            letters = set(FULL)
            for x in h_part:
                for y in k_part:
                    letters &= b.edge_labels[omega.edges[x, y]["meet"]]
            if letters:
                found.append(SigVertex(side, tuple(p for _, p in h_part), tuple(q for _, q in k_part), frozenset(letters)))
    return found


def build_sig(b: DicksBundle, s: int, t: int) -> SigGraph:
    """Subgraph isomorphism graph of Δ = K_{s,t}.

    A copy sits on one side of Ω with either s vertices from Γ_H and t from
    Γ_K or the other way round. Each u-side copy inside X is carried along its
    outgoing x-edges onto a v-side copy inside X.
    """
    if s < 1 or t < 1:
        raise DomainError(f"K_{{{s},{t}}} needs both parts nonempty")
    sig = SigGraph(s, t)
    shapes = sorted({(s, t), (t, s)})
    for side in (U_SIDE, V_SIDE):
        for h_size, k_size in shapes:
            sig.vertices.extend(_copies(b, side, h_size, k_size))
    index = {v.key: i for i, v in enumerate(sig.vertices)}

    for i, v in enumerate(sig.vertices):
        if v.side != U_SIDE:
            continue
        for letter in sorted(v.letters):
            h_steps = [b.H.step(p, letter, 1) for p in v.h_part]
            k_steps = [b.K.step(q, letter, 1) for q in v.k_part]
            if None in h_steps or None in k_steps:
                raise TheoremViolation(f"SIG: copy {v} lacks an outgoing {letter}-edge", {"copy": str(v)})
            h_image = tuple(sorted(h_steps))
            k_image = tuple(sorted(k_steps))
            j = index.get((V_SIDE, h_image, k_image))
            if j is None or letter not in sig.vertices[j].letters:
                raise TheoremViolation(
                    f"SIG: {letter}-image of copy {v} is not a copy inside {letter.upper()}",
                    {"copy": str(v), "letter": letter, "image": (h_image, k_image)},
                )
            sig.edges.append((i, j, letter))

    for i, d in enumerate(sig.valences()):
        if d != len(sig.vertices[i].letters):
            raise TheoremViolation(
                f"SIG vertex {sig.vertices[i]} has valence {d}, expected {len(sig.vertices[i].letters)}",
                {"vertex": str(sig.vertices[i]), "valence": d},
            )
    if not sig.parity_ok():
        raise TheoremViolation(f"SIG(K_{{{s},{t}}}) has an odd number of odd-valence vertices")
    logger.debug(f"SIG(K_{s},{t}) has {len(sig.vertices)} vertices and {len(sig.edges)} edges")
    return sig
