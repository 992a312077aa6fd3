from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
from networkx.utils import UnionFind

from .colored import COLOR_OF_LETTERS, ColoredMultigraph, colored_edge, has_nonmonochromatic_cycle, sigma
from .errors import PreconditionError, TheoremViolation
from .graph import U_SIDE, V_SIDE, CoreGraph, Edge, LabeledGraph, bipartite_sides
from .lattice import PullbackResult, PushoutGraph, RankProfile, pullback, reduced_rank
from .words import ABC

logger = logging.getLogger(__name__)

Element = Tuple[str, int]  # ("H" | "K", vertex id) for Ω nodes, (side, edge index) for Ω_x nodes
Labels = FrozenSet[str]

LETTERS: Tuple[str, ...] = ABC.letters
PAIR_SUBSETS: Tuple[str, ...] = ("ab", "ac", "bc")
FULL = frozenset(LETTERS)


def format_element(x: Element) -> str:
    return f"{x[0]}{x[1]}"


def format_labels(labels: Iterable[str]) -> str:
    return "".join(sorted(labels)) or "-"


def memberships(labels: Labels) -> Tuple[str, ...]:
    """Which of Ω_ab, Ω_ac, Ω_bc, Ω_abc an element with these labels lies in."""
    tags = tuple(pair for pair in PAIR_SUBSETS if set(pair) <= labels)
    if labels >= FULL:
        tags += ("abc",)
    return tags


@dataclass
class DicksBundle:
    """Ω = Ω_u ⊔ Ω_v and Ω_a, Ω_b, Ω_c for a normalized pair of θ-images.

    Ω nodes are the vertices of Γ_H ⊔ Γ_K, tagged ``("H", p)`` / ``("K", q)``;
    Ω edges are the vertices of Γ_{H∩K}, stored as the ``meet`` edge attribute.
    Ω_x nodes are the x-labeled edges of Γ_H ⊔ Γ_K and Ω_x edges are the
    x-labeled edges of Γ_{H∩K}.
    """

    pb: PullbackResult
    omega: nx.Graph
    omega_x: Dict[str, nx.Graph]
    node_labels: Dict[Element, Labels]
    edge_labels: Dict[int, Labels]  # keyed by pullback vertex
    sides: Dict[Element, str]
    o_vertex: Dict[Element, Element] = field(default_factory=dict)
    t_vertex: Dict[Element, Element] = field(default_factory=dict)
    o_edge: Dict[int, int] = field(default_factory=dict)  # pullback edge -> pullback vertex
    t_edge: Dict[int, int] = field(default_factory=dict)

    @property
    def H(self) -> CoreGraph:
        return self.pb.H

    @property
    def K(self) -> CoreGraph:
        return self.pb.K

    @property
    def omega_u(self) -> nx.Graph:
        return self.side_graph(U_SIDE)

    @property
    def omega_v(self) -> nx.Graph:
        return self.side_graph(V_SIDE)

    @property
    def omega_a(self) -> nx.Graph:
        return self.omega_x["a"]

    @property
    def omega_b(self) -> nx.Graph:
        return self.omega_x["b"]

    @property
    def omega_c(self) -> nx.Graph:
        return self.omega_x["c"]

    def side_graph(self, side: str) -> nx.Graph:
        return self.omega.subgraph([x for x in self.omega if self.sides[x] == side]).copy()

    def omega_edges(self) -> List[Tuple[Element, Element, int]]:
        """Ω edges as (H node, K node, pullback vertex), in pullback order."""
        found = [(a, b, d["meet"]) for a, b, d in self.omega.edges(data=True)]
        found = [(a, b, m) if a[0] == "H" else (b, a, m) for a, b, m in found]
        return sorted(found, key=lambda e: e[2])

    def node_memberships(self, x: Element) -> Tuple[str, ...]:
        return memberships(self.node_labels[x])

    def edge_memberships(self, m: int) -> Tuple[str, ...]:
        return memberships(self.edge_labels[m])

    def region(self, letters: Iterable[str], side: Optional[str] = None) -> nx.Graph:
        """Subgraph of Ω whose nodes and edges all carry ``letters``.

        ``region("ab")`` is Ω_ab; ``region("a")`` is A = Ω_ab ∨ Ω_ac on a
        normalized pair.
        """
        wanted = set(letters)
        g = nx.Graph()
        g.add_nodes_from(
            x for x in sorted(self.omega) if wanted <= self.node_labels[x] and (side is None or self.sides[x] == side)
        )
        for a, b, d in self.omega.edges(data=True):
            if a in g and b in g and wanted <= self.edge_labels[d["meet"]]:
                g.add_edge(a, b, meet=d["meet"])
        return g

    def abc_graph(self) -> nx.Graph:
        return self.region(LETTERS)


def _check_normalized(H: CoreGraph, K: CoreGraph, meet: CoreGraph) -> None:
    for name, g in (("Γ_H", H), ("Γ_K", K), ("Γ_H∩K", meet)):
        hanging = [v for v in g.vertices if g.valence(v) <= 1]
        if hanging:
            raise PreconditionError(
                f"{name} has valence-1 vertices {hanging}; conjugate the pair with normalize_pair first."
            )


def build_dicks(H: CoreGraph, K: CoreGraph, pb: Optional[PullbackResult] = None) -> DicksBundle:
    """Assemble the Dicks graphs of a normalized pair of θ-images.

    Args:
        H: normalized core graph over a/b/c
        K: normalized core graph over a/b/c
        pb: their pullback, computed when omitted

    Returns:
        DicksBundle holding Ω with its u/v sides, Ω_a, Ω_b, Ω_c and the
        label sets of every Ω vertex and edge.

    Raises:
        SchemeError: a graph is not a θ-image.
        PreconditionError: H∩K is trivial or the pair is not normalized.
        TheoremViolation: a pullback vertex pairs vertices from opposite sides.
    """
    sides_H = bipartite_sides(H)
    sides_K = bipartite_sides(K)
    pb = pb or pullback(H, K)
    meet = pb.meet
    if meet.rank == 0:
        raise PreconditionError("Dicks graphs need a nontrivial intersection (H∩K ≠ 1).")
    _check_normalized(H, K, meet)

    omega = nx.Graph()
    node_labels: Dict[Element, Labels] = {}
    sides: Dict[Element, str] = {}
    for tag, g, g_sides in (("H", H, sides_H), ("K", K, sides_K)):
        for v in g.vertices:
            x = (tag, v)
            node_labels[x] = g.labels_at(v)
            sides[x] = g_sides[v]
            omega.add_node(x)

    edge_labels: Dict[int, Labels] = {}
    for m, (p, q) in enumerate(pb.pairs):
        if sides_H[p] != sides_K[q]:
            raise TheoremViolation(
                f"Pullback vertex {m} pairs H{p} ({sides_H[p]}) with K{q} ({sides_K[q]})",
                {"meet_vertex": m, "pair": (p, q)},
            )
        edge_labels[m] = meet.labels_at(m)
        omega.add_edge(("H", p), ("K", q), meet=m)

    omega_x: Dict[str, nx.Graph] = {x: nx.Graph() for x in LETTERS}
    o_vertex: Dict[Element, Element] = {}
    t_vertex: Dict[Element, Element] = {}
    for tag, g in (("H", H), ("K", K)):
        for j, e in enumerate(g.edges):
            omega_x[e.label].add_node((tag, j))
            o_vertex[(tag, j)] = (tag, e.origin)
            t_vertex[(tag, j)] = (tag, e.terminus)
    o_edge: Dict[int, int] = {}
    t_edge: Dict[int, int] = {}
    for i, e in enumerate(meet.edges):
        omega_x[e.label].add_edge(("H", pb.proj_edge("H", i)), ("K", pb.proj_edge("K", i)), meet_edge=i)
        o_edge[i] = e.origin
        t_edge[i] = e.terminus

    bundle = DicksBundle(pb, omega, omega_x, node_labels, edge_labels, sides, o_vertex, t_vertex, o_edge, t_edge)
    logger.debug(
        f"Dicks bundle: Ω has {omega.number_of_nodes()} nodes / {omega.number_of_edges()} edges; "
        + ", ".join(f"Ω_{x}: {g.number_of_nodes()}/{g.number_of_edges()}" for x, g in omega_x.items())
    )
    return bundle


# ---------------------------------------------------------------------------
# Duality between the u- and v-parts of A, B, C
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentPair:
    letter: str
    source: Tuple[Element, ...]  # Ω_x component
    u_part: Tuple[Element, ...]  # õ image
    v_part: Tuple[Element, ...]  # t̃ image


@dataclass
class DualityReport:
    ok: bool
    pairs: Dict[str, List[ComponentPair]]
    component_counts: Dict[str, int]
    errors: List[str] = field(default_factory=list)


def _components(g: nx.Graph) -> List[Tuple[Element, ...]]:
    return sorted(tuple(sorted(c)) for c in nx.connected_components(g))


def _image(b: DicksBundle, letter: str, nodes: Iterable[Element], node_map: Dict, edge_map: Dict) -> Tuple[set, set]:
    nodes = list(nodes)
    sub = b.omega_x[letter].subgraph(nodes)
    image_nodes = {node_map[x] for x in nodes}
    image_edges = {edge_map[d["meet_edge"]] for _, _, d in sub.edges(data=True)}
    return image_nodes, image_edges


def check_duality(b: DicksBundle) -> DualityReport:
    """Pair the u-part and v-part components of A, B and C through Ω_a, Ω_b, Ω_c."""
    errors: List[str] = []
    pairs: Dict[str, List[ComponentPair]] = {}
    counts: Dict[str, int] = {}
    for letter in LETTERS:
        pairs[letter] = []
        targets = {}
        for side in (U_SIDE, V_SIDE):
            region = b.region(letter, side)
            for comp in _components(region):
                sub = region.subgraph(comp)
                edges = frozenset(d["meet"] for _, _, d in sub.edges(data=True))
                targets[(side, frozenset(comp))] = edges
        counts[letter] = len(targets)
        if len(targets) % 2:
            errors.append(f"{letter.upper()} has an odd number of components ({len(targets)})")
        hit = set()
        for comp in _components(b.omega_x[letter]):
            matched: Dict[str, Tuple[Element, ...]] = {}
            for side, node_map, edge_map in ((U_SIDE, b.o_vertex, b.o_edge), (V_SIDE, b.t_vertex, b.t_edge)):
                nodes, edges = _image(b, letter, comp, node_map, edge_map)
                key = (side, frozenset(nodes))
                if len(nodes) != len(comp) or targets.get(key) != frozenset(edges):
                    errors.append(
                        f"{letter.upper()}: image of Ω_{letter} component "
                        f"{[format_element(x) for x in comp]} on the {side}-side is not a component"
                    )
                    continue
                hit.add(key)
                matched[side] = tuple(sorted(nodes))
            if len(matched) == 2:
                pairs[letter].append(ComponentPair(letter, comp, matched[U_SIDE], matched[V_SIDE]))
        missed = set(targets) - hit
        for side, comp in sorted(missed, key=lambda k: (k[0], sorted(k[1]))):
            errors.append(f"{letter.upper()}: {side}-side component {[format_element(x) for x in sorted(comp)]} is unpaired")
    ok = not errors
    if not ok:
        logger.error(f"Duality check failed: {errors}")
    return DualityReport(ok, pairs, counts, errors)


# ---------------------------------------------------------------------------
# Pushout modeled on the Dicks graphs
# ---------------------------------------------------------------------------


def pushout_from_dicks(b: DicksBundle) -> PushoutGraph:
    """Vertices are components of Ω; each component of Ω_x is one x-edge from its õ to its t̃ component."""
    uf = UnionFind(b.omega.nodes)
    for a, c in b.omega.edges:
        uf.union(a, c)
    ordered = sorted(b.omega.nodes)
    vclass: Dict[Element, int] = {}
    by_root: Dict[Element, int] = {}
    # H elements first, then K, matching lattice.pushout numbering.
    for x in ordered:
        root = uf[x]
        if root not in by_root:
            by_root[root] = len(by_root)
        vclass[x] = by_root[root]
    graph = LabeledGraph(b.H.alphabet, set(by_root.values()), [], basepoint=vclass[("H", b.H.basepoint)])
    eclass: Dict[Element, int] = {}
    for letter in LETTERS:
        for comp in _components(b.omega_x[letter]):
            first = comp[0]
            cls = len(graph.edges)
            graph.edges.append(Edge(vclass[b.o_vertex[first]], vclass[b.t_vertex[first]], letter))
            for x in comp:
                eclass[x] = cls
    return PushoutGraph(graph, vclass, eclass)


def same_class_partition(first: PushoutGraph, second: PushoutGraph) -> bool:
    """Both pushouts identify exactly the same vertices and edges of Γ_H ⊔ Γ_K."""

    def blocks(classes: Dict[Element, int]) -> set:
        grouped: Dict[int, set] = {}
        for x, cls in classes.items():
            grouped.setdefault(cls, set()).add(x)
        return {frozenset(g) for g in grouped.values()}

    return blocks(first.vclass) == blocks(second.vclass) and blocks(first.eclass) == blocks(second.eclass)


# ---------------------------------------------------------------------------
# Component connectivity graph and the Ω_abc bounds
# ---------------------------------------------------------------------------


@dataclass
class ComponentConnectivityGraph:
    components: List[Tuple[Element, ...]]
    colored: ColoredMultigraph
    witnesses: Dict[Tuple[int, int, str], Tuple[Element, ...]] = field(default_factory=dict)

    @property
    def sigma(self) -> int:
        return sigma(self.colored)


def abc_components(b: DicksBundle) -> List[Tuple[Element, ...]]:
    return _components(b.abc_graph())


def build_ccg(b: DicksBundle) -> ComponentConnectivityGraph:
    """Vertices are components of Ω_abc; a colored edge joins two of them when a
    path through Ω_ab, Ω_ac or Ω_bc avoids Ω_abc in its interior."""
    components = abc_components(b)
    comp_of: Dict[Element, int] = {x: i for i, comp in enumerate(components) for x in comp}
    edges = set()
    witnesses: Dict[Tuple[int, int, str], Tuple[Element, ...]] = {}

    for pair, color in COLOR_OF_LETTERS.items():
        wanted = set(pair)
        interior = UnionFind(x for x in b.omega if x not in comp_of)
        attached: List[Tuple[Element, Element]] = []
        for a, c, d in b.omega.edges(data=True):
            labels = b.edge_labels[d["meet"]]
            if labels >= FULL or not wanted <= labels:
                continue
            if a in comp_of:
                attached.append((a, c))
            elif c in comp_of:
                attached.append((c, a))
            else:
                interior.union(a, c)
        touching: Dict[Element, set] = {}
        for abc_node, other in attached:
            if other in comp_of:
                i, j = comp_of[abc_node], comp_of[other]
                if i != j:
                    edges.add(colored_edge(i, j, color))
                    witnesses.setdefault((min(i, j), max(i, j), color), (abc_node, other))
                continue
            touching.setdefault(interior[other], set()).add(abc_node)
        for root, abc_nodes in sorted(touching.items(), key=lambda kv: sorted(kv[1])):
            hits = sorted({comp_of[x] for x in abc_nodes})
            for pos, i in enumerate(hits):
                for j in hits[pos + 1:]:
                    edges.add(colored_edge(i, j, color))
                    witnesses.setdefault((i, j, color), (root,))
    return ComponentConnectivityGraph(components, ColoredMultigraph(len(components), frozenset(edges)), witnesses)


def cycles_confined(b: DicksBundle, ccg: Optional[ComponentConnectivityGraph] = None) -> bool:
    """True iff every cycle through Ω_abc components stays in one of Ω_ab, Ω_ac, Ω_bc.

    Cycles are read on the component connectivity graph: each Ω_abc component
    is one vertex and a path of Ω that leaves a component and comes back into
    the same one is not a cycle there. Equality in the Ω_abc component bound
    holds exactly when this graph has no nonmonochromatic cycle.
    """
    ccg = ccg or build_ccg(b)
    return not has_nonmonochromatic_cycle(ccg.colored)


@dataclass
class AbcReport:
    ok: bool
    h_side_abc: int
    k_side_abc: int
    abc_edges: int
    abc_components: int
    pushout_rank: int
    sigma: int
    confined: bool
    errors: List[str] = field(default_factory=list)

    @property
    def two_rr_t(self) -> int:
        return 2 * reduced_rank(self.pushout_rank)

    @property
    def equality(self) -> bool:
        return self.abc_components == self.two_rr_t


def abc_report(b: DicksBundle, profile: RankProfile) -> AbcReport:
    abc = b.abc_graph()
    h_side = sum(1 for x in abc if x[0] == "H")
    k_side = sum(1 for x in abc if x[0] == "K")
    abc_edges = abc.number_of_edges()
    comps = nx.number_connected_components(abc)
    T = pushout_from_dicks(b)
    ccg = build_ccg(b)
    confined = cycles_confined(b, ccg)
    report = AbcReport(True, h_side, k_side, abc_edges, comps, T.rank, ccg.sigma, confined)

    if h_side != 2 * profile.rr_h:
        report.errors.append(f"Ω_abc has {h_side} Γ_H-side vertices, expected 2rr(H) = {2 * profile.rr_h}")
    if k_side != 2 * profile.rr_k:
        report.errors.append(f"Ω_abc has {k_side} Γ_K-side vertices, expected 2rr(K) = {2 * profile.rr_k}")
    if abc_edges != 2 * profile.rr_c:
        report.errors.append(f"Ω_abc has {abc_edges} edges, expected 2rr(H∩K) = {2 * profile.rr_c}")
    if comps < report.two_rr_t:
        report.errors.append(f"Ω_abc has {comps} components, fewer than 2rr(T) = {report.two_rr_t}")
    if report.equality != confined:
        report.errors.append(
            f"Equality {comps} = {report.two_rr_t} is {report.equality} but cycle confinement is {confined}"
        )
    if ccg.sigma != report.two_rr_t:
        report.errors.append(f"Σ(CCG) = {ccg.sigma} differs from 2rr(T) = {report.two_rr_t}")
    report.ok = not report.errors
    if not report.ok:
        logger.error(f"Ω_abc checks failed: {report.errors}")
    return report


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


def _graph_lines(title: str, g: nx.Graph, edge_key: str, edge_labels: Optional[Dict[int, Labels]] = None) -> List[str]:
    nodes = " ".join(format_element(x) for x in sorted(g))
    lines = [f"{title}: {g.number_of_nodes()} vertices, {g.number_of_edges()} edges", f"  vertices: {nodes}"]
    rows = []
    for a, c, d in g.edges(data=True):
        a, c = sorted((a, c))
        suffix = f" [{format_labels(edge_labels[d[edge_key]])}]" if edge_labels is not None else ""
        rows.append((d[edge_key], f"  {edge_key} {d[edge_key]}: {format_element(a)}-{format_element(c)}{suffix}"))
    lines.extend(row for _, row in sorted(rows))
    return lines


def render_dicks_report(b: DicksBundle, profile: RankProfile) -> str:
    """Deterministic plain-text report followed by a ``key=value`` section."""
    duality = check_duality(b)
    thm = abc_report(b, profile)
    ccg = build_ccg(b)
    T = pushout_from_dicks(b)

    lines = [f"profile {profile}"]
    lines.extend(_graph_lines("Omega_u", b.omega_u, "meet", b.edge_labels))
    lines.extend(_graph_lines("Omega_v", b.omega_v, "meet", b.edge_labels))
    for letter in LETTERS:
        lines.extend(_graph_lines(f"Omega_{letter}", b.omega_x[letter], "meet_edge"))
    lines.append("vertex labels: " + " ".join(f"{format_element(x)}:{format_labels(b.node_labels[x])}" for x in sorted(b.omega)))
    for letter in LETTERS:
        lines.append(f"{letter.upper()} pairing ({duality.component_counts[letter]} components):")
        for pair in duality.pairs[letter]:
            u = "-".join(format_element(x) for x in pair.u_part)
            v = "-".join(format_element(x) for x in pair.v_part)
            lines.append(f"  {{{u}}} <-> {{{v}}}")
    lines.append(f"Omega_abc components: {len(ccg.components)}")
    for i, comp in enumerate(ccg.components):
        lines.append(f"  {i}: " + " ".join(format_element(x) for x in comp))
    lines.append("CCG edges:")
    for e in ccg.colored.sorted_edges():
        lines.append(f"  {e.u}-{e.v} {e.color}")
    lines.append(f"pushout: {T.num_vertices} vertices, {T.num_edges} edges, rank {T.rank}")
    for err in duality.errors + thm.errors:
        lines.append(f"VIOLATION {err}")

    summary = {
        "h_side_abc": thm.h_side_abc,
        "k_side_abc": thm.k_side_abc,
        "abc_edges": thm.abc_edges,
        "abc_components": thm.abc_components,
        "pushout_rank": thm.pushout_rank,
        "two_rr_t": thm.two_rr_t,
        "sigma": thm.sigma,
        "equality": str(thm.equality).lower(),
        "cycles_confined": str(thm.confined).lower(),
        "duality_ok": str(duality.ok).lower(),
        "abc_ok": str(thm.ok).lower(),
    }
    for letter in LETTERS:
        summary[f"components_{letter}"] = duality.component_counts[letter]
    lines.append("")
    lines.append("[summary]")
    lines.extend(f"{key}={value}" for key, value in summary.items())
    return "\n".join(lines) + "\n"


def parse_summary(report: str) -> Dict[str, str]:
    """Key-value section of :func:`render_dicks_report`."""
    _, _, tail = report.partition("[summary]\n")
    return dict(line.split("=", 1) for line in tail.splitlines() if "=" in line)
