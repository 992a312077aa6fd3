from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

from .dicks import (
    FULL,
    AbcReport,
    DicksBundle,
    abc_report,
    build_dicks,
    check_duality,
    pushout_from_dicks,
    same_class_partition,
)
from .errors import StallingsError
from .graph import CoreGraph
from .lattice import PullbackResult, PushoutGraph, RankProfile, join, pullback, pushout
from .sig import build_sig

logger = logging.getLogger(__name__)


@dataclass
class ValidationResult:
    ok: bool
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


def _result(errors: Iterable[str], warnings: Iterable[str]) -> ValidationResult:
    # Deduplicate while preserving order
    errors = list(dict.fromkeys(errors))
    warnings = list(dict.fromkeys(warnings))
    return ValidationResult(ok=not errors, errors=errors, warnings=warnings)


def validate_profile(p: RankProfile) -> ValidationResult:
    """Rank facts every pair of subgroups satisfies."""
    errors: List[str] = []
    warnings: List[str] = []
    if p.rr_c > p.rr_h * p.rr_k:
        errors.append(f"{p}: Hanna Neumann bound rr(c) <= rr(h) rr(k) violated")
    if p.v == p.h + p.k and p.c != 0:
        errors.append(f"{p}: join rank h + k forces a trivial intersection")
    if p.v > p.h + p.k:
        errors.append(f"{p}: join rank exceeds h + k")
    if min(p.h, p.k) < 2:
        warnings.append(f"{p}: rank below 2, outside the classified range")
    return _result(errors, warnings)


def validate_lattice_laws(
    H: CoreGraph,
    K: CoreGraph,
    pb: Optional[PullbackResult] = None,
    joined: Optional[CoreGraph] = None,
    T: Optional[PushoutGraph] = None,
) -> ValidationResult:
    """Containments H∩K <= H, K <= H∨K and rank(T) >= rank(H∨K)."""
    pb = pb or pullback(H, K)
    joined = joined or join(H, K)
    T = T or pushout(H, K, pb)
    errors: List[str] = []
    for w in pb.meet.basis():
        if not (H.contains(w) and K.contains(w)):
            errors.append(f"Intersection generator {w} is missing from H or K")
    for name, g in (("H", H), ("K", K)):
        for w in g.basis():
            if not joined.contains(w):
                errors.append(f"{name} generator {w} is missing from the join")
    if T.rank < joined.rank:
        errors.append(f"Pushout rank {T.rank} is below join rank {joined.rank}")
    return _result(errors, [])


def validate_dicks(
    H: CoreGraph,
    K: CoreGraph,
    profile: RankProfile,
    bundle: Optional[DicksBundle] = None,
    report: Optional[AbcReport] = None,
    sig_shapes=((1, 1), (1, 2)),
) -> ValidationResult:
    """Dicks-layer theorems on a normalized pair of θ-images.

    Args:
        H, K: normalized core graphs over the a/b/c scheme
        profile: rank profile of the pair
        bundle: Dicks graphs already built for (H, K); built here when omitted
        report: Ω_abc report already computed for ``bundle``
        sig_shapes: (s, t) pairs whose SIG(K_{s,t}) must build cleanly

    Returns:
        ValidationResult whose errors name every failed identity.
    """
    errors: List[str] = []
    warnings: List[str] = []
    if bundle is None:
        try:
            bundle = build_dicks(H, K)
        except StallingsError as e:
            return _result([f"Dicks bundle: {e}"], [])
    b = bundle
    pb = b.pb

    for x, labels in b.node_labels.items():
        if len(labels) < 2:
            errors.append(f"Ω vertex {x} lies in none of Ω_ab, Ω_ac, Ω_bc")
        side = b.H if x[0] == "H" else b.K
        if (labels >= FULL) != (side.valence(x[1]) == 3):
            errors.append(f"Ω vertex {x} has labels {sorted(labels)} but valence {side.valence(x[1])}")
    for m, labels in b.edge_labels.items():
        if len(labels) < 2:
            errors.append(f"Ω edge for pullback vertex {m} lies in none of Ω_ab, Ω_ac, Ω_bc")

    duality = check_duality(b)
    errors.extend(duality.errors)

    report = report or abc_report(b, profile)
    errors.extend(report.errors)

    modeled = pushout_from_dicks(b)
    direct = pushout(H, K, pb)
    if not modeled.is_isomorphic(direct):
        errors.append("Pushout modeled on the Dicks graphs is not isomorphic to the quotient pushout")
    if not same_class_partition(modeled, direct):
        errors.append("Dicks pushout and quotient pushout identify different cells")

    for s, t in sig_shapes:
        try:
            build_sig(b, s, t)
        except StallingsError as e:
            errors.append(f"SIG(K_{s},{t}): {e}")

    result = _result(errors, warnings)
    if not result.ok:
        logger.error(f"Dicks validation failed for {profile}: {result.errors}")
    return result
