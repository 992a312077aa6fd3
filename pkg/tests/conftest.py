from __future__ import annotations

from pathlib import Path

import pytest

from core.graph import build_core_graph
from core.lattice import pullback
from core.words import read_subgroup_file

FIXTURES = Path(__file__).parent.parent / "fixtures"


def load_pair(stem: str):
    a_H, H_words = read_subgroup_file(FIXTURES / f"{stem}_H.words")
    a_K, K_words = read_subgroup_file(FIXTURES / f"{stem}_K.words")
    alphabet = a_H.union(a_K)
    return build_core_graph(H_words, alphabet), build_core_graph(K_words, alphabet)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def hexagon_pair():
    """Rank-2 θ-images whose intersection core graph is a hexagon."""
    return load_pair("hexagon")


@pytest.fixture
def k23_pair():
    """Rank-4 / rank-2 θ-images; Ω_abc is K_{2,3} plus three isolated vertices."""
    return load_pair("k23")


@pytest.fixture
def hexagon_bundle(hexagon_pair):
    from core.dicks import build_dicks

    H, K = hexagon_pair
    return build_dicks(H, K, pullback(H, K))


@pytest.fixture
def k23_bundle(k23_pair):
    from core.dicks import build_dicks

    H, K = k23_pair
    return build_dicks(H, K)


@pytest.fixture
def witness_store(tmp_path):
    from core.witnesses import WitnessStore

    return WitnessStore(tmp_path / "witnesses.tsv")


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    monkeypatch.setenv("STALLINGS_WITNESS_DB", str(tmp_path / "default_witnesses.tsv"))
    monkeypatch.setenv("STALLINGS_METRICS_LOG", str(tmp_path / "metrics_log.csv"))
