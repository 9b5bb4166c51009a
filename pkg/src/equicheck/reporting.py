"""Batch run summaries as delimited output plus rendered figures.

Given a completed run directory this writes ``summary.csv`` (one row per
pair) next to ``summary.json`` and renders three PNG charts: verdict
counts, analyzer gate-skip rates, and token usage per pair.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analyzers import ANALYZER_ORDER

CSV_COLUMNS = [
    "pair_id",
    "source_language",
    "target_language",
    "verdict",
    "agent_status",
    "patch_validated",
    "gate_skips",
    "gateway_calls",
    "input_tokens",
    "output_tokens",
]


def load_pair_reports(run_dir: Path) -> list[dict]:
    run_dir = Path(run_dir)
    reports = []
    for path in sorted(run_dir.glob("*/report.json")):
        reports.append(json.loads(path.read_text()))
    return reports


def _pair_row(report: dict) -> dict:
    calls = tokens_in = tokens_out = skips = 0
    semantic = report.get("semantic_analysis") or {}
    for name in semantic:
        verdict = semantic[name]
        if verdict.get("skipped_by_gate"):
            skips += 1
        usage = verdict.get("usage", {})
        calls += usage.get("calls", 0)
        tokens_in += usage.get("input_tokens", 0)
        tokens_out += usage.get("output_tokens", 0)
    usage = report["verdict"].get("usage", {})
    calls += usage.get("calls", 0)
    tokens_in += usage.get("input_tokens", 0)
    tokens_out += usage.get("output_tokens", 0)
    return {
        "pair_id": report["pair_id"],
        "source_language": report["source_language"],
        "target_language": report["target_language"],
        "verdict": report["verdict"]["verdict"],
        "agent_status": report["test_repair"]["status"],
        "patch_validated": report["verdict"].get("patch_validated"),
        "gate_skips": skips,
        "gateway_calls": calls,
        "input_tokens": tokens_in,
        "output_tokens": tokens_out,
    }


def write_summary_csv(run_dir: Path) -> Path:
    run_dir = Path(run_dir)
    rows = [_pair_row(r) for r in load_pair_reports(run_dir)]
    out = run_dir / "summary.csv"
    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return out


def render_figures(run_dir: Path) -> list[Path]:
    run_dir = Path(run_dir)
    reports = load_pair_reports(run_dir)
    rows = [_pair_row(r) for r in reports]
    figures_dir = run_dir / "figures"
    figures_dir.mkdir(exist_ok=True)
    written = []

    counts = {"EQ": 0, "NEQ": 0, "VF": 0}
    for row in rows:
        counts[row["verdict"]] = counts.get(row["verdict"], 0) + 1
    fig, ax = plt.subplots(figsize=(4, 3))
    ax.bar(list(counts), list(counts.values()), color=["#2a9d8f", "#e76f51", "#8d99ae"])
    ax.set_ylabel("pairs")
    ax.set_title("Verdicts")
    fig.tight_layout()
    path = figures_dir / "verdict_counts.png"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    skip_counts = dict.fromkeys(ANALYZER_ORDER, 0)
    for report in reports:
        for name, verdict in (report.get("semantic_analysis") or {}).items():
            if verdict.get("skipped_by_gate"):
                skip_counts[name] += 1
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.bar(list(skip_counts), list(skip_counts.values()), color="#457b9d")
    ax.set_ylabel("pairs gated")
    ax.set_title("Gate skips per analyzer")
    ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    path = figures_dir / "gate_skips.png"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(5, 3))
    ids = [row["pair_id"] for row in rows]
    ax.bar(ids, [row["input_tokens"] for row in rows], label="input", color="#264653")
    ax.bar(
        ids,
        [row["output_tokens"] for row in rows],
        bottom=[row["input_tokens"] for row in rows],
        label="output",
        color="#e9c46a",
    )
    ax.set_ylabel("tokens")
    ax.set_title("Token usage per pair")
    ax.tick_params(axis="x", rotation=30)
    ax.legend()
    fig.tight_layout()
    path = figures_dir / "token_usage.png"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)
    return written


def render_table(summary: dict) -> str:
    counts = summary["counts"]
    total = sum(counts.values()) or 1
    lines = ["verdict  count  percent"]
    for key in ("EQ", "NEQ", "VF"):
        lines.append(
            f"{key:<7}  {counts.get(key, 0):>5}  {100.0 * counts.get(key, 0) / total:6.1f}%"
        )
    return "\n".join(lines)
