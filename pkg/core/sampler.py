from __future__ import annotations

import json
import logging
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import DomainError, SamplingError, StallingsError, TheoremViolation
from .graph import CoreGraph, Edge, LabeledGraph, build_core_graph, canonicalize
from .lattice import RankProfile, profile_of, pullback
from .locus import Verdict, classify
from .normalize import normalize_pair
from .validator import validate_dicks, validate_profile
from .words import ABC, XY, Alphabet, theta_embed
from .witnesses import WitnessRecord, verify

logger = logging.getLogger(__name__)

MODES = ("rose", "bipartite")
VERTEX_DISTRIBUTION = "n uniform in [1, max_vertices] per subgroup"


@dataclass(frozen=True)
class SampleConfig:
    seed: int = 0
    pairs: int = 1000
    max_vertices: int = 6
    alphabet_size: int = 2
    mode: str = "rose"
    dicks_fraction: float = 0.1
    jobs: int = 1
    max_attempts: int = 2000

    def __post_init__(self) -> None:
        if self.pairs < 0:
            raise DomainError("pairs must be >= 0")
        if self.max_vertices < 1:
            raise DomainError("max_vertices must be >= 1")
        if self.alphabet_size < 2:
            raise DomainError("alphabet_size must be >= 2")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def alphabet(self) -> Alphabet:
        return XY if self.mode == "bipartite" else Alphabet.indexed(self.alphabet_size)


# ---------------------------------------------------------------------------
# Random core graphs
# ---------------------------------------------------------------------------


def _injection_size(n: int, rng: np.random.Generator) -> int:
    # Partial injections of size m on [n]: C(n, m)^2 * m!
    weights = np.array([math.comb(n, m) ** 2 * math.factorial(m) for m in range(n + 1)], dtype=float)
    return int(rng.choice(n + 1, p=weights / weights.sum()))


def _draw_arcs(n: int, alphabet: Alphabet, rng: np.random.Generator, rank: Optional[int]) -> List[Edge]:
    letters = alphabet.letters
    if rank is None:
        sizes = [_injection_size(n, rng) for _ in letters]
    else:
        total = n + rank - 1
        slots = rng.choice(len(letters) * n, size=total, replace=False)
        sizes = [int(np.sum(slots // n == j)) for j in range(len(letters))]
    edges: List[Edge] = []
    for letter, m in zip(letters, sizes):
        domain = rng.choice(n, size=m, replace=False)
        image = rng.choice(n, size=m, replace=False)
        edges.extend(Edge(int(o), int(t), letter) for o, t in zip(domain, image))
    return edges


def random_core_graph(
    n: int,
    alphabet: Alphabet,
    rng: np.random.Generator,
    rank: Optional[int] = None,
    max_attempts: int = 2000,
) -> CoreGraph:
    """Core graph on exactly ``n`` vertices from random partial injections, one per letter.

    A draw is kept when it is connected and every vertex other than 0 has
    valence at least 2. With ``rank`` the draw uses exactly ``n + rank - 1`` arcs.
    """
    if n < 1:
        raise DomainError("random_core_graph needs n >= 1")
    if rank is not None and not (1 <= n + rank - 1 <= len(alphabet) * n):
        raise SamplingError(f"Rank {rank} on {n} vertices needs between 1 and {len(alphabet) * n} arcs")
    for _ in range(max_attempts):
        edges = _draw_arcs(n, alphabet, rng, rank)
        if not edges:
            continue
        g = LabeledGraph(alphabet, set(range(n)), edges, basepoint=0)
        valence = g.valences()
        if any(d < 2 for v, d in valence.items() if v != 0):
            continue
        if not g.is_connected():
            continue
        core, _ = canonicalize(g)
        return core
    raise SamplingError(
        f"No connected core graph on {n} vertices after {max_attempts} draws; "
        "try a larger vertex count or alphabet"
    )


def pair_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_pair(index: int, cfg: SampleConfig) -> Tuple[CoreGraph, CoreGraph, np.random.Generator]:
    """The ``index``-th pair of the run; depends only on (seed, index)."""
    rng = pair_rng(cfg.seed, index)
    graphs = []
    for _ in range(2):
        n = int(rng.integers(1, cfg.max_vertices + 1))
        graphs.append(random_core_graph(n, cfg.alphabet, rng, max_attempts=cfg.max_attempts))
    H, K = graphs
    if cfg.mode == "bipartite":
        H = build_core_graph([theta_embed(w, XY) for w in H.basis()], ABC)
        K = build_core_graph([theta_embed(w, XY) for w in K.basis()], ABC)
    return H, K, rng


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


@dataclass
class SearchReport:
    tuples: Counter = field(default_factory=Counter)
    violations: List[Tuple[int, WitnessRecord]] = field(default_factory=list)
    invariant_failures: List[Tuple[int, str]] = field(default_factory=list)
    skipped: int = 0
    evaluated: int = 0
    dicks_checked: int = 0
    elapsed: float = 0.0

    @property
    def pairs(self) -> int:
        return self.evaluated

    @property
    def throughput(self) -> float:
        return self.pairs / self.elapsed if self.elapsed > 0 else 0.0

    def merge(self, other: "SearchReport") -> "SearchReport":
        return SearchReport(
            self.tuples + other.tuples,
            sorted(self.violations + other.violations, key=lambda v: v[0]),
            sorted(self.invariant_failures + other.invariant_failures),
            self.skipped + other.skipped,
            self.evaluated + other.evaluated,
            self.dicks_checked + other.dicks_checked,
            max(self.elapsed, other.elapsed),
        )

    def summary_line(self, seed: int) -> str:
        return (
            f"pairs={self.pairs} violations={len(self.violations)} "
            f"failures={len(self.invariant_failures)} seed={seed}"
        )

    def to_text(self, cfg: SampleConfig, timing: bool = False) -> str:
        """Report: header, tuple counts as TSV, violation JSON lines, summary.

        Args:
            cfg: the configuration the report was produced with
            timing: add a ``# throughput=...`` comment line. Without it the text
                is a pure function of ``cfg``.

        Returns:
            Newline-terminated report whose last line is the summary line.
        """
        lines = [
            f"# seed={cfg.seed} pairs={cfg.pairs} max_vertices={cfg.max_vertices} mode={cfg.mode} "
            f"alphabet_size={cfg.alphabet_size}",
            f"# vertex counts: {VERTEX_DISTRIBUTION}",
            f"# skipped={self.skipped} dicks_checked={self.dicks_checked}",
            "h\tk\tv\tc\tcount",
        ]
        for key in sorted(self.tuples):
            lines.append("\t".join(str(x) for x in key) + f"\t{self.tuples[key]}")
        lines.append("# violations")
        for index, record in self.violations:
            lines.append(json.dumps({"index": index, **record.to_json()}, sort_keys=True))
        lines.append("# failures")
        for index, message in self.invariant_failures:
            lines.append(json.dumps({"index": index, "failure": message}, sort_keys=True))
        if timing:
            lines.append(f"# throughput={self.throughput:.1f} pairs/s elapsed={self.elapsed:.2f}s")
        lines.append(self.summary_line(cfg.seed))
        return "\n".join(lines) + "\n"


def _dicks_failures(H: CoreGraph, K: CoreGraph, profile: RankProfile) -> List[str]:
    Hn, Kn, _ = normalize_pair(H, K)
    result = validate_dicks(Hn, Kn, profile)
    return result.errors


def evaluate_pair(index: int, cfg: SampleConfig) -> SearchReport:
    report = SearchReport(evaluated=1)
    try:
        H, K, rng = sample_pair(index, cfg)
    except SamplingError as e:
        logger.warning(f"Pair {index} skipped: {e}")
        report.skipped += 1
        return report

    pb = pullback(H, K)
    try:
        profile = profile_of(H, K, pb)
    except TheoremViolation as e:
        report.invariant_failures.append((index, str(e)))
        return report
    report.tuples[profile.as_tuple()] += 1

    checked = validate_profile(profile)
    report.invariant_failures.extend((index, err) for err in checked.errors)

    canonical = profile.canonical()
    if canonical.h >= 2:
        verdict = classify(canonical)
        if verdict.verdict is Verdict.NONREALIZABLE:
            report.invariant_failures.append((index, f"{profile} classified {verdict}"))
        elif verdict.verdict is Verdict.UNKNOWN:
            record = verify(WitnessRecord(profile, tuple(H.basis()), tuple(K.basis()), provenance="search"))
            logger.warning(f"Pair {index} lands outside the known locus: {profile}")
            report.violations.append((index, record))

    if cfg.mode == "bipartite" and profile.c > 0 and rng.random() < cfg.dicks_fraction:
        report.dicks_checked += 1
        try:
            report.invariant_failures.extend((index, err) for err in _dicks_failures(H, K, profile))
        except StallingsError as e:
            report.invariant_failures.append((index, f"Dicks checks raised {type(e).__name__}: {e}"))
    return report


def _evaluate_range(cfg: SampleConfig, start: int, stop: int) -> SearchReport:
    report = SearchReport()
    for index in range(start, stop):
        report = report.merge(evaluate_pair(index, cfg))
    return report


def _chunks(pairs: int, jobs: int) -> List[Tuple[int, int]]:
    size = max(1, math.ceil(pairs / (jobs * 4))) if pairs else 1
    return [(start, min(pairs, start + size)) for start in range(0, pairs, size)]


def search(cfg: SampleConfig) -> SearchReport:
    """Sample ``cfg.pairs`` pairs, classify every rank profile and collect violations and failures.

    Args:
        cfg: seed, pair count, vertex bound, mode and worker count. The
            merged report does not depend on ``cfg.jobs``.

    Returns:
        SearchReport with profile counts, verified out-of-locus witnesses,
        invariant failures and the elapsed time.

    Raises:
        TheoremViolation: a sampled pair realizes a NONREALIZABLE profile;
            raised after the run has been merged.
    """
    started = time.perf_counter()
    report = SearchReport()
    if cfg.jobs <= 1:
        report = _evaluate_range(cfg, 0, cfg.pairs)
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(_evaluate_range, cfg, a, b) for a, b in _chunks(cfg.pairs, cfg.jobs)]
            for future in futures:
                report = report.merge(future.result())
    report.elapsed = time.perf_counter() - started
    logger.info(
        f"Searched {report.pairs} pairs in {report.elapsed:.2f}s ({report.throughput:.1f} pairs/s); "
        f"{len(report.violations)} violations, {len(report.invariant_failures)} failures"
    )
    nonrealizable = [f for f in report.invariant_failures if "classified NONREALIZABLE" in f[1]]
    if nonrealizable:
        raise TheoremViolation(
            f"Sampled pair {nonrealizable[0][0]} realizes a NONREALIZABLE profile",
            {"failures": nonrealizable, "summary": report.summary_line(cfg.seed)},
        )
    return report
