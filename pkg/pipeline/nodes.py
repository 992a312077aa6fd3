from __future__ import annotations

import logging
from typing import TYPE_CHECKING, List

from core.dicks import build_dicks, render_dicks_report, abc_report
from core.errors import PreconditionError, StallingsError, TheoremViolation
from core.graph import build_core_graph, is_bipartite_scheme
from core.lattice import join, profile_of, pullback, pushout
from core.normalize import normalize_pair
from core.validator import validate_dicks, validate_lattice_laws, validate_profile
from core.words import ABC, Alphabet, XY, format_word, parse_words, theta_embed
from pipeline.errors import handle_node_error

if TYPE_CHECKING:
    from pipeline.state import PairState

logger = logging.getLogger(__name__)


def parse_node(state: "PairState") -> "PairState":
    """Parse generator text into reduced words over one shared alphabet."""
    state["current_step"] = "parse"
    try:
        declared = Alphabet(tuple(state["alphabet_letters"])) if state["alphabet_letters"] else None
        H_words = parse_words(state["H_text"], declared)
        K_words = parse_words(state["K_text"], declared)
        alphabet = declared or Alphabet.infer(H_words + K_words)
        if state["embed_theta"]:
            domain = alphabet if len(alphabet) == 2 else XY
            H_words = [theta_embed(w, domain) for w in H_words]
            K_words = [theta_embed(w, domain) for w in K_words]
            alphabet = ABC
            logger.info(f"Embedded both subgroups into the a/b/c scheme from {domain.letters}")
        state["alphabet"] = alphabet
        state["H_words"] = H_words
        state["K_words"] = K_words
        logger.info(f"Parsed {len(H_words)} + {len(K_words)} generators over {alphabet.letters}")
    except StallingsError as e:
        state = handle_node_error("parse_node", state, e, is_critical=True)
        raise
    return state


def build_node(state: "PairState") -> "PairState":
    state["current_step"] = "build"
    try:
        state["H"] = build_core_graph(state["H_words"], state["alphabet"])
        state["K"] = build_core_graph(state["K_words"], state["alphabet"])
        logger.info(
            f"Core graphs: H has {state['H'].num_vertices} vertices, "
            f"K has {state['K'].num_vertices} vertices"
        )
    except StallingsError as e:
        state = handle_node_error("build_node", state, e, is_critical=True)
        raise
    return state


def lattice_node(state: "PairState") -> "PairState":
    """Meet, join and pushout of the pair, plus the containment laws."""
    state["current_step"] = "lattice"
    H, K = state["H"], state["K"]
    pb = pullback(H, K)
    joined = join(H, K)
    T = pushout(H, K, pb)
    state["pullback"] = pb
    state["join"] = joined
    state["pushout"] = T

    result = validate_lattice_laws(H, K, pb, joined, T)
    state["lattice_validation"] = result
    state["errors"].extend(result.errors)
    logger.info(
        f"Lattice: meet rank {pb.meet.rank}, join rank {joined.rank}, "
        f"pushout {T.num_vertices} vertices / {T.num_edges} edges"
    )
    return state


def profile_node(state: "PairState") -> "PairState":
    state["current_step"] = "profile"
    try:
        profile = profile_of(state["H"], state["K"], state["pullback"], state["join"])
    except TheoremViolation as e:
        state = handle_node_error("profile_node", state, e, is_critical=True)
        raise
    state["profile"] = profile
    checked = validate_profile(profile)
    state["errors"].extend(checked.errors)
    state["warnings"].extend(checked.warnings)
    logger.info(f"Rank profile {profile}")
    return state


def normalize_node(state: "PairState") -> "PairState":
    """Conjugate the pair so that no core graph keeps a valence-1 vertex."""
    state["current_step"] = "normalize"
    try:
        H, K, g = normalize_pair(state["H"], state["K"], state["pullback"])
    except PreconditionError as e:
        state = handle_node_error("normalize_node", state, e, is_critical=False)
        return state
    if not g.is_empty():
        state["H"], state["K"] = H, K
        state["pullback"] = pullback(H, K)
        logger.info(f"Conjugated pair by {format_word(g)}")
    state["conjugator"] = g
    state["normalized"] = True
    return state


def dicks_node(state: "PairState") -> "PairState":
    state["current_step"] = "dicks"
    if not state["normalized"]:
        logger.info("Skipping Dicks graphs: pair is not normalized")
        return state
    try:
        state["bundle"] = build_dicks(state["H"], state["K"], state["pullback"])
    except TheoremViolation as e:
        state = handle_node_error("dicks_node", state, e, is_critical=True)
        raise
    except StallingsError as e:
        state = handle_node_error("dicks_node", state, e, is_critical=False)
    return state


def theorems_node(state: "PairState") -> "PairState":
    """Theorem-backed checks on the Dicks bundle; findings land in ``errors``."""
    state["current_step"] = "theorems"
    if state["bundle"] is None:
        return state
    state["abc_report"] = abc_report(state["bundle"], state["profile"])
    result = validate_dicks(
        state["H"], state["K"], state["profile"], bundle=state["bundle"], report=state["abc_report"]
    )
    state["dicks_validation"] = result
    state["errors"].extend(result.errors)
    state["warnings"].extend(result.warnings)
    if result.ok:
        logger.info("Dicks-layer checks passed")
    else:
        logger.error(f"Dicks-layer checks found {len(result.errors)} errors")
    return state


def report_node(state: "PairState") -> "PairState":
    state["current_step"] = "report"
    pb, T, profile = state["pullback"], state["pushout"], state["profile"]
    lines: List[str] = [
        f"rank H {profile.h}",
        f"rank K {profile.k}",
        f"rank join {profile.v}",
        f"rank meet {profile.c}",
        f"pushout {T.num_vertices} vertices {T.num_edges} edges rank {T.rank}",
    ]
    if state["conjugator"] is not None:
        lines.append(f"conjugator {format_word(state['conjugator']) or '1'}")
    report = "\n".join(lines) + "\n"
    if state["bundle"] is not None:
        report += render_dicks_report(state["bundle"], profile)
    elif not is_bipartite_scheme(state["H"]) or not is_bipartite_scheme(state["K"]):
        report += "dicks skipped: not in the a/b/c scheme\n"
    elif pb.meet.rank == 0:
        report += "dicks skipped: trivial intersection\n"
    else:
        report += "dicks skipped: pair could not be normalized\n"
    state["report"] = report
    logger.info(f"Report assembled with {len(state['errors'])} errors, {len(state['warnings'])} warnings")
    return state
