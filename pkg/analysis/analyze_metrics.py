"""Summarize the search run log."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import pandas as pd

from utils.config import ROOT, get_settings

OUTPUT_FILE = ROOT / "analysis_summary.csv"


def summarize(df: pd.DataFrame) -> pd.DataFrame:
    """One row per (mode, max_vertices) with run counts, throughput and violation totals."""
    grouped = df.groupby(["mode", "max_vertices"], sort=True)
    summary = grouped.agg(
        runs=("seed", "count"),
        total_pairs=("pairs", "sum"),
        avg_pairs_per_second=("pairs_per_second", "mean"),
        max_pairs_per_second=("pairs_per_second", "max"),
        total_elapsed_seconds=("elapsed_seconds", "sum"),
        violations=("violations", "sum"),
        failures=("failures", "sum"),
    )
    return summary.reset_index()


def analyze_metrics(log_file: Optional[Path] = None, output_file: Path = OUTPUT_FILE) -> Optional[pd.DataFrame]:
    log_file = Path(log_file or get_settings().metrics_log)
    if not log_file.exists():
        print(f"No log file found at {log_file}")
        print("Run a search first to generate metrics.")
        return None

    df = pd.read_csv(log_file)
    summary_df = summarize(df)
    summary_df.to_csv(output_file, index=False)
    print(f"Analysis complete! Summary saved to {output_file}")
    print("\nSummary Statistics:")
    print("=" * 80)
    print(summary_df.to_string(index=False))

    print("\n" + "=" * 80)
    print("Overall Totals:")
    print(f"Total runs: {len(df)}")
    print(f"Total pairs: {df['pairs'].sum():,}")
    print(f"Total violations: {df['violations'].sum()}")
    print(f"Total invariant failures: {df['failures'].sum()}")
    return summary_df


if __name__ == "__main__":
    analyze_metrics()
