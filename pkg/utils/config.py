from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

ROOT = Path(__file__).parent.parent

# Load environment variables from .env file
env_path = ROOT / ".env"
load_dotenv(env_path)

DEFAULT_WITNESS_DB = ROOT / "witnesses.tsv"
DEFAULT_METRICS_LOG = ROOT / "metrics_log.csv"


@dataclass(frozen=True)
class Settings:
    witness_db: Path
    search_budget: int
    dicks_fraction: float
    metrics_log: Path
    log_level: str


def _int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}; using {default}")
        return default


def _float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = float(raw)
    except ValueError:
        logger.warning(f"Ignoring non-numeric {name}={raw!r}; using {default}")
        return default
    return min(1.0, max(0.0, value))


def get_settings(witness_db: Optional[str | Path] = None) -> Settings:
    """Current settings; reads the environment on every call so tests can monkeypatch it."""
    db = witness_db or os.getenv("STALLINGS_WITNESS_DB") or DEFAULT_WITNESS_DB
    return Settings(
        witness_db=Path(db),
        search_budget=_int("STALLINGS_SEARCH_BUDGET", 20000),
        dicks_fraction=_float("STALLINGS_DICKS_FRACTION", 0.1),
        metrics_log=Path(os.getenv("STALLINGS_METRICS_LOG") or DEFAULT_METRICS_LOG),
        log_level=(os.getenv("STALLINGS_LOG_LEVEL") or "WARNING").upper(),
    )
