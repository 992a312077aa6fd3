from __future__ import annotations

import csv
from datetime import datetime
from pathlib import Path
from typing import Optional

from utils.config import get_settings

COLUMNS = [
    "timestamp",
    "seed",
    "pairs",
    "max_vertices",
    "mode",
    "jobs",
    "elapsed_seconds",
    "pairs_per_second",
    "violations",
    "failures",
]


def throughput(pairs: int, elapsed_seconds: float) -> float:
    return pairs / elapsed_seconds if elapsed_seconds > 0 else 0.0


def log_search_metrics(
    seed: int,
    pairs: int,
    max_vertices: int,
    mode: str,
    jobs: int,
    elapsed_seconds: float,
    violations: int,
    failures: int,
    log_file: Optional[Path] = None,
) -> None:
    """Append one search run to the CSV run log."""
    log_file = Path(log_file or get_settings().metrics_log)
    file_exists = log_file.exists()

    with open(log_file, "a", newline="") as f:
        writer = csv.writer(f)
        if not file_exists:
            writer.writerow(COLUMNS)
        writer.writerow([
            datetime.now().isoformat(),
            seed,
            pairs,
            max_vertices,
            mode,
            jobs,
            f"{elapsed_seconds:.3f}",
            f"{throughput(pairs, elapsed_seconds):.1f}",
            violations,
            failures,
        ])
