from __future__ import annotations

import uuid
from datetime import datetime
from typing import TypedDict, Optional, List, Sequence

from core.dicks import DicksBundle, AbcReport
from core.graph import CoreGraph
from core.lattice import PullbackResult, PushoutGraph, RankProfile
from core.validator import ValidationResult
from core.words import Alphabet, Word


class PairState(TypedDict):
    """State schema for the pair-analysis pipeline.

    Carries one (H, K) pair from generator text to the final report.
    """

    # Input
    H_text: List[str]  # Generator words of H as typed
    K_text: List[str]  # Generator words of K as typed
    alphabet_letters: Optional[List[str]]  # Declared alphabet, inferred when None
    embed_theta: bool  # Map two-letter input into the a/b/c scheme before building
    run_id: str
    timestamp: datetime

    # Parsed and built
    alphabet: Optional[Alphabet]
    H_words: Optional[List[Word]]
    K_words: Optional[List[Word]]
    H: Optional[CoreGraph]
    K: Optional[CoreGraph]

    # Lattice
    pullback: Optional[PullbackResult]
    join: Optional[CoreGraph]
    pushout: Optional[PushoutGraph]
    profile: Optional[RankProfile]
    lattice_validation: Optional[ValidationResult]

    # Dicks layer (bipartite θ-scheme with nontrivial intersection only)
    normalized: bool
    conjugator: Optional[Word]  # g with H' = g H g^-1
    bundle: Optional[DicksBundle]
    abc_report: Optional[AbcReport]
    dicks_validation: Optional[ValidationResult]

    report: Optional[str]

    # Error tracking
    errors: List[str]
    warnings: List[str]

    # Pipeline control
    current_step: str


def create_initial_state(
    H_text: Sequence[str],
    K_text: Sequence[str],
    alphabet_letters: Optional[Sequence[str]] = None,
    embed_theta: bool = False,
    run_id: Optional[str] = None,
) -> PairState:
    """Initial state for one pair; ``run_id`` is generated when omitted."""
    return PairState(
        H_text=list(H_text),
        K_text=list(K_text),
        alphabet_letters=list(alphabet_letters) if alphabet_letters else None,
        embed_theta=embed_theta,
        run_id=run_id or str(uuid.uuid4()),
        timestamp=datetime.now(),
        alphabet=None,
        H_words=None,
        K_words=None,
        H=None,
        K=None,
        pullback=None,
        join=None,
        pushout=None,
        profile=None,
        lattice_validation=None,
        normalized=False,
        conjugator=None,
        bundle=None,
        abc_report=None,
        dicks_validation=None,
        report=None,
        errors=[],
        warnings=[],
        current_step="initialize",
    )


# Quick validation when run directly: python -m pipeline.state
if __name__ == "__main__":
    state = create_initial_state(["cA", "cBcAbC"], ["bA", "cBcA"])
    assert state["H_text"] == ["cA", "cBcAbC"]
    assert state["profile"] is None
    assert state["errors"] == []
    assert state["current_step"] == "initialize"
    print("✓ State schema validated successfully!")
