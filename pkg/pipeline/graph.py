from __future__ import annotations

import logging
from typing import Literal, Optional, Sequence

from langgraph.graph import END, StateGraph

from core.graph import is_bipartite_scheme
from pipeline.nodes import (
    build_node,
    dicks_node,
    lattice_node,
    normalize_node,
    parse_node,
    profile_node,
    report_node,
    theorems_node,
)
from pipeline.state import PairState, create_initial_state

logger = logging.getLogger(__name__)


def check_dicks_scope(state: PairState) -> Literal["dicks", "skip"]:
    """Conditional routing: Dicks graphs need θ-images with a nontrivial intersection."""
    if state.get("profile") is None or state["profile"].c == 0:
        return "skip"
    if is_bipartite_scheme(state["H"]) and is_bipartite_scheme(state["K"]):
        return "dicks"
    return "skip"


def create_pipeline():
    """Create and compile the pair-analysis workflow."""
    workflow = StateGraph(PairState)

    workflow.add_node("parse", parse_node)
    workflow.add_node("build", build_node)
    workflow.add_node("lattice", lattice_node)
    workflow.add_node("profile", profile_node)
    workflow.add_node("normalize", normalize_node)
    workflow.add_node("dicks", dicks_node)
    workflow.add_node("theorems", theorems_node)
    workflow.add_node("report", report_node)

    workflow.set_entry_point("parse")
    workflow.add_edge("parse", "build")
    workflow.add_edge("build", "lattice")
    workflow.add_edge("lattice", "profile")
    workflow.add_conditional_edges(
        "profile",
        check_dicks_scope,
        {
            "dicks": "normalize",
            "skip": "report",
        },
    )
    workflow.add_edge("normalize", "dicks")
    workflow.add_edge("dicks", "theorems")
    workflow.add_edge("theorems", "report")
    workflow.add_edge("report", END)

    graph = workflow.compile()
    logger.debug("Pair pipeline compiled")
    return graph


def run_pipeline(
    H_text: Sequence[str],
    K_text: Sequence[str],
    alphabet_letters: Optional[Sequence[str]] = None,
    embed_theta: bool = False,
    run_id: Optional[str] = None,
) -> PairState:
    """Run one pair end to end and return the final state.

    Critical node failures propagate after being recorded by the failing node.
    """
    initial_state = create_initial_state(H_text, K_text, alphabet_letters, embed_theta, run_id)
    graph = create_pipeline()
    final_state = graph.invoke(initial_state)
    logger.info(f"Pipeline {final_state['run_id']} finished at step {final_state['current_step']}")
    return final_state


# Quick validation when run directly: python -m pipeline.graph
if __name__ == "__main__":
    state = run_pipeline(["cA", "cBcAbC"], ["bA", "cBcA"])
    assert state["profile"].as_tuple() == (2, 2, 2, 1), state["profile"]
    assert state["bundle"] is not None
    print(state["report"])
    print("✓ Pipeline validated successfully!")
