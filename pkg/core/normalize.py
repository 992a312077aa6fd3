from __future__ import annotations

import logging
from collections import deque
from typing import Dict, Optional, Tuple

from .errors import PreconditionError
from .graph import CoreGraph
from .lattice import PullbackResult, pullback
from .words import EMPTY, Word, invert, reduce

logger = logging.getLogger(__name__)


def _nearest_branch_vertex(meet: CoreGraph) -> Tuple[int, Word]:
    """Closest vertex of valence >= 3 to the basepoint, with the path label."""
    paths: Dict[int, Word] = {meet.basepoint: EMPTY}
    queue = deque([meet.basepoint])
    while queue:
        v = queue.popleft()
        if meet.valence(v) >= 3:
            return v, paths[v]
        for letter in meet.alphabet:
            for sign in (1, -1):
                w = meet.step(v, letter, sign)
                if w is not None and w not in paths:
                    paths[w] = reduce(paths[v].syllables + ((letter, sign),))
                    queue.append(w)
    raise PreconditionError("Intersection core graph has no vertex of valence 3; it is a single cycle.")


def normalize_pair(
    H: CoreGraph, K: CoreGraph, pb: Optional[PullbackResult] = None
) -> Tuple[CoreGraph, CoreGraph, Word]:
    """Conjugate H and K together so that Γ_H, Γ_K and Γ_{H∩K} lose all valence-1 vertices.

    Returns ``(H', K', g)`` with ``H' = g H g^-1`` and ``K' = g K g^-1``, where
    ``g`` is the inverse of the label of the shortest path from the pullback
    basepoint to a branch vertex. If the pullback basepoint already has valence
    at least 2 the pair is returned unchanged with ``g`` empty.
    """
    pb = pb or pullback(H, K)
    meet = pb.meet
    if meet.rank == 0:
        raise PreconditionError("normalize_pair requires a nontrivial intersection (H∩K ≠ 1).")
    if meet.valence(meet.basepoint) >= 2:
        return H, K, EMPTY
    target, path = _nearest_branch_vertex(meet)
    p, q = pb.pairs[target]
    logger.info(f"Moving basepoints along {path} to pullback vertex {target}")
    return H.rebase(p), K.rebase(q), invert(path)
