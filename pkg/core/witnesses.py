from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterator, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd

from pipeline.errors import retry_on_io_error

from .errors import BudgetExhausted, DomainError, SamplingError, TheoremViolation
from .lattice import RankProfile, rank_profile
from .locus import Verdict, classify
from .words import Alphabet, Word, format_word, parse_word, rank2_embed

logger = logging.getLogger(__name__)

PROVENANCES = ("fixture", "base-search", "search", "Ia", "Ib", "II")
STORE_COLUMNS = ["h", "k", "v", "c", "H_words", "K_words", "provenance", "verified"]


@dataclass(frozen=True)
class WitnessRecord:
    profile: RankProfile
    H_gens: Tuple[Word, ...]
    K_gens: Tuple[Word, ...]
    verified: bool = False
    provenance: str = "fixture"

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet.infer(self.H_gens + self.K_gens)

    def swapped(self) -> "WitnessRecord":
        p = self.profile
        return replace(self, profile=RankProfile(p.k, p.h, p.v, p.c), H_gens=self.K_gens, K_gens=self.H_gens)

    def rank2(self) -> "WitnessRecord":
        """Same record replayed inside F(x, y) through x_i -> y^-i x y^i."""
        return replace(
            self,
            H_gens=tuple(rank2_embed(w) for w in self.H_gens),
            K_gens=tuple(rank2_embed(w) for w in self.K_gens),
        )

    def to_json(self) -> Dict[str, object]:
        return {
            "profile": list(self.profile.as_tuple()),
            "H": [format_word(w) for w in self.H_gens],
            "K": [format_word(w) for w in self.K_gens],
            "provenance": self.provenance,
            "verified": self.verified,
        }

    def render(self) -> str:
        lines = [f"profile {self.profile}", f"provenance {self.provenance}", f"verified {str(self.verified).lower()}"]
        lines.extend(f"H {format_word(w) or '1'}" for w in self.H_gens)
        lines.extend(f"K {format_word(w) or '1'}" for w in self.K_gens)
        return "\n".join(lines) + "\n"


def _words(texts: Sequence[str]) -> Tuple[Word, ...]:
    return tuple(parse_word(t) for t in texts)


def verify(record: WitnessRecord) -> WitnessRecord:
    """Recompute ranks from the generators; ``verified`` is set only on an exact match."""
    actual = rank_profile(record.H_gens, record.K_gens, record.alphabet)
    if actual != record.profile:
        logger.debug(f"Witness for {record.profile} reproduces {actual}")
        return replace(record, verified=False)
    return replace(record, verified=True)


FIXTURES: Dict[Tuple[int, int, int, int], WitnessRecord] = {
    r.profile.as_tuple(): r
    for r in (
        WitnessRecord(RankProfile(2, 2, 2, 2), _words(["x1", "x2"]), _words(["x1", "x2"])),
        WitnessRecord(RankProfile(2, 2, 2, 1), _words(["x1", "x2x1X2"]), _words(["X2x1", "x2x1"])),
        WitnessRecord(RankProfile(2, 2, 2, 0), _words(["x1", "x2x1X2"]), _words(["x2", "x1x2x2X1"])),
        WitnessRecord(RankProfile(1, 1, 1, 1), _words(["x1"]), _words(["x1"])),
        WitnessRecord(RankProfile(1, 1, 2, 0), _words(["x1"]), _words(["x2"])),
        WitnessRecord(RankProfile(1, 2, 2, 0), _words(["x1"]), _words(["x2", "x1x2X1"])),
    )
}


class WitnessStore:
    """Append-only TSV of witnesses, one row per record."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._frame: Optional[pd.DataFrame] = None

    @retry_on_io_error()
    def _read(self) -> pd.DataFrame:
        if not self.path.exists():
            return pd.DataFrame(columns=STORE_COLUMNS)
        return pd.read_csv(self.path, sep="\t", dtype=str, keep_default_na=False)

    def frame(self) -> pd.DataFrame:
        if self._frame is None:
            self._frame = self._read()
        return self._frame

    def records(self) -> Iterator[WitnessRecord]:
        for row in self.frame().itertuples(index=False):
            yield WitnessRecord(
                RankProfile(int(row.h), int(row.k), int(row.v), int(row.c)),
                _words([t for t in row.H_words.split(";") if t]),
                _words([t for t in row.K_words.split(";") if t]),
                verified=row.verified.lower() == "true",
                provenance=row.provenance,
            )

    def profiles(self) -> Set[Tuple[int, int, int, int]]:
        return {r.profile.as_tuple() for r in self.records() if r.verified}

    def lookup(self, profile: RankProfile) -> Optional[WitnessRecord]:
        target = profile.as_tuple()
        for record in self.records():
            if record.verified and record.profile.as_tuple() == target:
                return record
        return None

    @retry_on_io_error()
    def _append_row(self, row: Dict[str, str]) -> None:
        header = not self.path.exists()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame([row], columns=STORE_COLUMNS).to_csv(
            self.path, sep="\t", mode="a", header=header, index=False, lineterminator="\n"
        )

    def append(self, record: WitnessRecord) -> None:
        if not record.verified:
            raise DomainError(f"Refusing to store unverified witness for {record.profile}")
        p = record.profile
        row = {
            "h": str(p.h),
            "k": str(p.k),
            "v": str(p.v),
            "c": str(p.c),
            "H_words": ";".join(format_word(w) for w in record.H_gens),
            "K_words": ";".join(format_word(w) for w in record.K_gens),
            "provenance": record.provenance,
            "verified": "true",
        }
        self._append_row(row)
        self._frame = None
        logger.info(f"Stored {record.provenance} witness for {p} in {self.path}")


# ---------------------------------------------------------------------------
# Operations Ia, Ib, II
# ---------------------------------------------------------------------------


def predicted_profile(p: RankProfile, op: str) -> RankProfile:
    if op == "Ia":
        return RankProfile(p.h + 1, p.k, p.v + 1, p.c)
    if op == "Ib":
        return RankProfile(p.h, p.k + 1, p.v + 1, p.c)
    if op == "II":
        return RankProfile(p.h + 1, p.k + 1, p.v + 1, p.c + 1)
    raise DomainError(f"Unknown operation {op!r}; expected Ia, Ib or II")


def apply_operation(w: WitnessRecord, op: str) -> WitnessRecord:
    """Attach a loop on a fresh generator to Γ_H (Ia), Γ_K (Ib) or both (II)."""
    if not w.verified:
        raise DomainError(f"apply_operation needs a verified witness, got {w.profile}")
    target = predicted_profile(w.profile, op)
    fresh = parse_word(w.alphabet.fresh_letter("x"))
    H, K = w.H_gens, w.K_gens
    if op in ("Ia", "II"):
        H = H + (fresh,)
    if op in ("Ib", "II"):
        K = K + (fresh,)
    record = verify(WitnessRecord(target, H, K, provenance=op))
    if not record.verified:
        raise TheoremViolation(
            f"Operation {op} on {w.profile} did not produce {target}",
            {"op": op, "base": w.to_json(), "result": record.to_json()},
        )
    return record


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def base_target(p: RankProfile) -> RankProfile:
    """Smallest base row (v = 2, or a rank-1 seed for i <= 1) reaching ``p`` by Ia/Ib only."""
    i = p.i
    if i == 0:
        return RankProfile(1, 1, 2, 0)
    if i == 1:
        return RankProfile(1, 1, 1, 1) if p.c == 1 else RankProfile(1, 2, 2, 0)
    h0 = min(p.h, (i + 2) // 2)
    return RankProfile(h0, i + 2 - h0, 2, p.c)


def decompositions(p: RankProfile) -> Iterator[Tuple[RankProfile, int, int, int]]:
    """Bases reaching ``p`` with (Ia, Ib, II) counts, fewest operations first.

    ``p`` itself is not listed; at least one operation is always applied.
    """
    found = []
    for gamma in range(0, min(p.h, p.k, p.c) + 1):
        for alpha in range(0, p.h - gamma):
            for beta in range(0, p.k - gamma):
                base = RankProfile(p.h - alpha - gamma, p.k - beta - gamma, p.v - alpha - beta - gamma, p.c - gamma)
                if alpha + beta + gamma and base.h >= 1 and base.k >= 1 and base.v >= 1:
                    found.append((alpha + beta + gamma, base, alpha, beta, gamma))
    for _, base, alpha, beta, gamma in sorted(found, key=lambda t: (t[0], t[1].as_tuple())):
        yield base, alpha, beta, gamma


def replay(base: WitnessRecord, alpha: int, beta: int, gamma: int) -> WitnessRecord:
    record = base
    for op, count in (("II", gamma), ("Ia", alpha), ("Ib", beta)):
        for _ in range(count):
            record = apply_operation(record, op)
    return record


def _known(profile: RankProfile, store: Optional[WitnessStore]) -> Optional[WitnessRecord]:
    fixture = FIXTURES.get(profile.as_tuple())
    if fixture is not None:
        return verify(fixture)
    if store is not None:
        return store.lookup(profile)
    return None


def base_row_search(
    target: RankProfile,
    store: Optional[WitnessStore] = None,
    budget: int = 20000,
    seed: int = 0,
    max_vertices: int = 8,
) -> WitnessRecord:
    """Sample pairs with the target ranks over two letters until one realizes ``target``.

    Every new base-row profile met on the way is cached in the store.
    """
    from .sampler import random_core_graph

    alphabet = Alphabet.indexed(2)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=target.as_tuple()))
    known = store.profiles() if store is not None else set()
    for attempt in range(budget):
        try:
            H = random_core_graph(_vertex_count(rng, target.h, max_vertices), alphabet, rng, rank=target.h)
            K = random_core_graph(_vertex_count(rng, target.k, max_vertices), alphabet, rng, rank=target.k)
        except SamplingError:
            continue
        H_gens, K_gens = tuple(H.basis()), tuple(K.basis())
        actual = rank_profile(H_gens, K_gens, alphabet)
        record = WitnessRecord(actual, H_gens, K_gens, verified=True, provenance="base-search")
        if actual == target:
            logger.info(f"Base row {target} found after {attempt + 1} pairs")
            if store is not None and target.as_tuple() not in known:
                store.append(record)
            return record
        if store is not None and actual.v == 2 and actual.h <= actual.k and actual.as_tuple() not in known:
            store.append(record)
            known.add(actual.as_tuple())
    raise BudgetExhausted(f"No witness for base row {target} within {budget} sampled pairs")


def _vertex_count(rng: np.random.Generator, rank: int, max_vertices: int) -> int:
    # Two letters carry at most 2n arcs, so rank r needs n >= r - 1.
    low = max(1, rank - 1)
    high = max(low, max_vertices)
    return int(rng.integers(low, high + 1))


def construct_witness(
    p: RankProfile,
    store: Optional[WitnessStore] = None,
    budget: int = 20000,
    seed: int = 0,
) -> WitnessRecord:
    """Verified witness for a REALIZABLE profile: stored, replayed from a known base, or searched."""
    if p.h > p.k:
        return construct_witness(p.canonical(), store, budget, seed).swapped()
    verdict = classify(p)
    if verdict.verdict is not Verdict.REALIZABLE:
        raise DomainError(f"{p} is {verdict.verdict.value}; witnesses exist only for REALIZABLE profiles")

    direct = _known(p, store)
    if direct is not None:
        return direct

    for base, alpha, beta, gamma in decompositions(p):
        known = _known(base, store) or (_known(base.canonical(), store) if base.h > base.k else None)
        if known is None:
            continue
        if known.profile != base:
            known = known.swapped()
        logger.info(f"Replaying Ia x{alpha}, Ib x{beta}, II x{gamma} from {base}")
        record = replay(known, alpha, beta, gamma)
        _cache(record, store)
        return record

    base = base_target(p)
    canonical_base = base.canonical()
    found = base_row_search(canonical_base, store, budget, seed)
    if found.profile != base:
        found = found.swapped()
    record = replay(found, p.h - base.h, p.k - base.k, 0)
    _cache(record, store)
    return record


def _cache(record: WitnessRecord, store: Optional[WitnessStore]) -> None:
    if store is not None and store.lookup(record.profile) is None:
        store.append(record)
