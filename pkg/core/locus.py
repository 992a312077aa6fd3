from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import pandas as pd

from .errors import DomainError
from .lattice import RankProfile, reduced_rank

logger = logging.getLogger(__name__)


def _ordered(h: int, k: int, who: str) -> Tuple[int, int]:
    if h > k:
        logger.warning(f"{who}: swapping (h, k) = ({h}, {k}) to ({k}, {h}) so that h <= k")
        h, k = k, h
    if h < 2:
        raise DomainError(f"{who} needs 2 <= h <= k, got h={h}")
    return h, k


def a_term(i: int, h: int, k: int) -> int:
    if i == 0:
        return 0
    if i <= 2 * (h - 1):
        return i * i // 4 + 1
    return (h - 1) * (i - h + 1) + 1


def a_sequence(h: int, k: int) -> List[int]:
    """Largest known-realizable intersection rank c for each i = h + k - v, indices 0..h+k-2."""
    h, k = _ordered(h, k, "a_sequence")
    return [a_term(i, h, k) for i in range(h + k - 1)]


def a_closed_form(i: int) -> int:
    """Quadratic part of the sequence written as ⌊((n+1)/2)²⌋ + 1 with n = i - 1."""
    return ((i * i) // 4) + 1 if i else 0


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


class Verdict(str, Enum):
    REALIZABLE = "REALIZABLE"
    NONREALIZABLE = "NONREALIZABLE"
    UNKNOWN = "UNKNOWN"

    @property
    def code(self) -> str:
        return self.value[0]


RULES: Dict[str, str] = {
    "R1": "Hanna Neumann bound rr(c) <= rr(h) rr(k)",
    "R2": "Hopfian rule: v = h + k forces c = 0",
    "R3": "Ivanov-Dicks inequality rr(c) <= i(i-1)/2",
    "R4": "c = i(i-1)/2 + 1 is not attained for i >= 3",
    "R5": "h = 2: realizable iff c + v <= k + 2",
    "R6": "c <= a_i: realized by the Ia/Ib schedule from base rows",
}

CONJECTURE_NOTE = "conjecturally non-realizable; the known-realizable locus is believed complete"


@dataclass
class Classification:
    profile: RankProfile
    verdict: Verdict
    rules: List[Tuple[str, str]] = field(default_factory=list)
    ivanov_open_question: bool = False
    note: str = ""

    @property
    def rule(self) -> Optional[str]:
        return self.rules[0][0] if self.rules else None

    def cell(self) -> str:
        """Locus-table cell: ``R:R6``, ``N:R4`` or ``U``."""
        return f"{self.verdict.code}:{self.rule}" if self.rule else self.verdict.code

    def __str__(self) -> str:
        text = self.verdict.value
        if self.rule:
            text += f" rule={self.rule}"
        if self.ivanov_open_question:
            text += " ivanov-question"
        return text


def validate_profile_range(p: RankProfile) -> RankProfile:
    p = p.canonical()
    if p.h < 2:
        raise DomainError(f"Classification needs 2 <= h <= k, got {p}")
    if not 2 <= p.v <= p.h + p.k:
        raise DomainError(f"Join rank v must lie in [2, h + k], got {p}")
    if p.c < 0:
        raise DomainError(f"Intersection rank must be nonnegative, got {p}")
    return p


def classify(p: RankProfile) -> Classification:
    """Apply R1..R6 in order; the first deciding rule wins.

    Args:
        p: profile with 2 <= min(h, k) and 2 <= v <= h + k; (h, k) is put in
            canonical order first

    Returns:
        Classification carrying the verdict and the deciding rule. UNKNOWN
        cells have no rule and may carry the Ivanov open-question flag.

    Raises:
        DomainError: the profile lies outside the classified range.
    """
    p = validate_profile_range(p)
    h, k, v, c, i = p.h, p.k, p.v, p.c, p.i

    def decided(verdict: Verdict, rule: str) -> Classification:
        return Classification(p, verdict, [(rule, RULES[rule])])

    if p.rr_c > p.rr_h * p.rr_k:
        return decided(Verdict.NONREALIZABLE, "R1")
    if v == h + k and c != 0:
        return decided(Verdict.NONREALIZABLE, "R2")
    if reduced_rank(c) > i * (i - 1) // 2:
        return decided(Verdict.NONREALIZABLE, "R3")
    if i >= 3 and c == i * (i - 1) // 2 + 1:
        return decided(Verdict.NONREALIZABLE, "R4")
    if h == 2:
        return decided(Verdict.REALIZABLE if c + v <= k + 2 else Verdict.NONREALIZABLE, "R5")
    if c <= a_term(i, h, k):
        return decided(Verdict.REALIZABLE, "R6")
    ivanov = c == (h - 1) * (k - 1) + 1 and v > 2
    return Classification(p, Verdict.UNKNOWN, [], ivanov, CONJECTURE_NOTE)


# ---------------------------------------------------------------------------
# Locus tables
# ---------------------------------------------------------------------------


@dataclass
class LocusTable:
    h: int
    k: int
    cells: Dict[Tuple[int, int], Classification]
    witnessed: Dict[Tuple[int, int], bool] = field(default_factory=dict)

    @property
    def v_range(self) -> range:
        return range(2, self.h + self.k + 1)

    @property
    def c_range(self) -> range:
        return range(0, (self.h - 1) * (self.k - 1) + 2)

    def cell_text(self, v: int, c: int) -> str:
        text = self.cells[(v, c)].cell()
        return text + "+" if self.witnessed.get((v, c)) else text

    def to_frame(self) -> pd.DataFrame:
        rows = list(reversed(self.v_range))
        frame = pd.DataFrame(
            [[self.cell_text(v, c) for c in self.c_range] for v in rows],
            index=pd.Index(rows, name="v\\c"),
            columns=[str(c) for c in self.c_range],
        )
        return frame

    def to_csv(self) -> str:
        return self.to_frame().to_csv(lineterminator="\n")

    def to_ascii(self) -> str:
        return f"page (h,k)=({self.h},{self.k})\n" + self.to_frame().to_string() + "\n"

    def count(self, verdict: Verdict) -> int:
        return sum(1 for cl in self.cells.values() if cl.verdict is verdict)

    def boundary(self) -> Dict[int, int]:
        """Largest REALIZABLE c per row v (-1 when the row has none)."""
        out = {}
        for v in self.v_range:
            realizable = [c for c in self.c_range if self.cells[(v, c)].verdict is Verdict.REALIZABLE]
            out[v] = max(realizable, default=-1)
        return out


def locus_table(h: int, k: int, store=None) -> LocusTable:
    """Classify every (v, c) cell of page (h, k); mark cells with a stored witness."""
    h, k = _ordered(h, k, "locus_table")
    cells: Dict[Tuple[int, int], Classification] = {}
    for v in range(2, h + k + 1):
        for c in range(0, (h - 1) * (k - 1) + 2):
            cells[(v, c)] = classify(RankProfile(h, k, v, c))
    table = LocusTable(h, k, cells)
    if store is not None:
        for key, cl in cells.items():
            table.witnessed[key] = store.lookup(cl.profile) is not None
    return table


# ---------------------------------------------------------------------------
# Operation schedules
# ---------------------------------------------------------------------------

BASE_PAGE = (2, 2)
BASE_SEQUENCE = (0, 1, 2)


def optimal_schedule(h: int, k: int) -> List[str]:
    """Alternate Ib, Ia from (2, 2) up to (h, h), then Ib up to (h, k)."""
    h, k = _ordered(h, k, "optimal_schedule")
    steps: List[str] = []
    for _ in range(2, h):
        steps.extend(["Ib", "Ia"])
    steps.extend(["Ib"] * (k - h))
    return steps


def schedule_sequence(steps: Sequence[str]) -> Tuple[Tuple[int, int], List[int]]:
    """Replay Ia/Ib steps from page (2, 2); each step appends the top value (h-1)(k-1)+1."""
    h, k = BASE_PAGE
    seq = list(BASE_SEQUENCE)
    for step in steps:
        if step == "Ia":
            h += 1
        elif step == "Ib":
            k += 1
        else:
            raise DomainError(f"Unknown schedule step {step!r}; expected Ia or Ib")
        seq.append((h - 1) * (k - 1) + 1)
    return (h, k), seq


def monotone_schedules(h: int, k: int) -> Iterator[Tuple[str, ...]]:
    """Every order of (h-2) Ia steps and (k-2) Ib steps."""
    total = (h - 2) + (k - 2)
    for positions in itertools.combinations(range(total), h - 2):
        chosen = set(positions)
        yield tuple("Ia" if j in chosen else "Ib" for j in range(total))


def best_schedule_sequence(h: int, k: int) -> List[int]:
    """Pointwise maximum of the sequences produced by all monotone schedules to (h, k)."""
    h, k = _ordered(h, k, "best_schedule_sequence")
    best: Optional[List[int]] = None
    for steps in monotone_schedules(h, k):
        _, seq = schedule_sequence(steps)
        best = seq if best is None else [max(a, b) for a, b in zip(best, seq)]
    return best or list(BASE_SEQUENCE)


# ---------------------------------------------------------------------------
# Spanning-edge budget brute force
# ---------------------------------------------------------------------------

Component = Tuple[int, int]


def _component_multisets(budget: int, smallest: Component = (1, 1)) -> Iterator[List[Component]]:
    yield []
    for s in range(smallest[0], budget + 2):
        t_start = smallest[1] if s == smallest[0] else 1
        for t in range(t_start, budget + 2 - s + 1):
            cost = s + t - 1
            if cost > budget:
                break
            for rest in _component_multisets(budget - cost, (s, t)):
                yield [(s, t)] + rest


def spanning_budget_maximizers(m: int) -> Tuple[int, List[List[Component]]]:
    """Bipartite graphs whose components K_{s,t} use at most 2m spanning-tree edges in total.

    Returns the largest attainable edge count and every component multiset
    attaining it.
    """
    if m < 1:
        raise DomainError("Spanning budget needs m >= 1")
    best = -1
    winners: List[List[Component]] = []
    for config in _component_multisets(2 * m):
        if not config:
            continue
        edges = sum(s * t for s, t in config)
        if edges > best:
            best, winners = edges, [config]
        elif edges == best:
            winners.append(config)
    return best, winners


# Quick validation when run directly: python -m core.locus
if __name__ == "__main__":
    assert a_sequence(5, 7) == [0, 1, 2, 3, 5, 7, 10, 13, 17, 21, 25]
    assert str(classify(RankProfile(4, 4, 5, 4))) == "NONREALIZABLE rule=R4"
    print(locus_table(2, 2).to_ascii())
    print("✓ locus validated")
