"""Render the 3x3 break-even grid from a break-even CSV.

Input schema (columns, in order):
    strategy_g1,strategy_g2,delta,n,win_rate,wilson_lo,wilson_hi

Every row is validated before anything is drawn; a malformed row produces a
``SchemaError`` naming the offending line.  Rendering is deterministic:
fixed style, fixed facet layout, and no timestamps in the output file, so
identical inputs give byte-identical images.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "briscola-figures"

import matplotlib.pyplot as plt

POLICY_ORDER = ("G", "H", "C")
POLICY_LABEL = {"G": "greedy", "H": "hoarder", "C": "counter"}

EXPECTED_HEADER = [
    "strategy_g1", "strategy_g2", "delta", "n", "win_rate", "wilson_lo", "wilson_hi",
]


class SchemaError(ValueError):
    """The input CSV does not match the break-even schema."""


@dataclass(frozen=True)
class BreakevenBin:
    strategy_g1: str
    strategy_g2: str
    delta: int
    n: int
    win_rate: float
    wilson_lo: float
    wilson_hi: float


@dataclass(frozen=True)
class FigureSpec:
    input_csv: Path
    output_path: Path


def _fail(line_no: int, reason: str) -> None:
    raise SchemaError(f"line {line_no}: {reason}")


def load_bins(path: Path) -> List[BreakevenBin]:
    """Read and validate a break-even CSV."""
    path = Path(path)
    bins: List[BreakevenBin] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("line 1: empty file, expected the break-even header")
        if header != EXPECTED_HEADER:
            _fail(1, f"bad header {header!r}, expected {EXPECTED_HEADER!r}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 7:
                _fail(line_no, f"expected 7 fields, got {len(row)}")
            s1, s2 = row[0], row[1]
            if s1 not in POLICY_ORDER:
                _fail(line_no, f"unknown strategy_g1 {s1!r}")
            if s2 not in POLICY_ORDER:
                _fail(line_no, f"unknown strategy_g2 {s2!r}")
            try:
                delta = int(row[2])
                n = int(row[3])
                win_rate, lo, hi = (float(v) for v in row[4:7])
            except ValueError:
                _fail(line_no, f"non-numeric fields in {row!r}")
            if not -10 <= delta <= 10:
                _fail(line_no, f"delta {delta} outside -10..10")
            if n < 1:
                _fail(line_no, f"bin count {n} must be positive")
            for name, v in (("win_rate", win_rate), ("wilson_lo", lo), ("wilson_hi", hi)):
                if not 0.0 <= v <= 1.0:
                    _fail(line_no, f"{name} {v} outside [0, 1]")
            if not lo <= win_rate <= hi:
                _fail(
                    line_no,
                    f"win_rate {win_rate} outside its own interval [{lo}, {hi}]",
                )
            bins.append(BreakevenBin(s1, s2, delta, n, win_rate, lo, hi))
    return bins


def build_figure(bins: List[BreakevenBin]) -> plt.Figure:
    """The 3x3 grid: rows index G1's policy, columns G2's policy.

    All nine facets are drawn even when empty; dashed guides mark a zero
    imbalance and the 50% win rate, grey ribbons the confidence bands.
    """
    by_cell: Dict[Tuple[str, str], List[BreakevenBin]] = {}
    for b in bins:
        by_cell.setdefault((b.strategy_g1, b.strategy_g2), []).append(b)

    fig, axes = plt.subplots(
        3, 3, figsize=(9.5, 8.0), sharex=True, sharey=True, constrained_layout=True
    )
    for i, s1 in enumerate(POLICY_ORDER):
        for j, s2 in enumerate(POLICY_ORDER):
            ax = axes[i][j]
            ax.axhline(0.5, color="black", linestyle="--", linewidth=0.8)
            ax.axvline(0.0, color="black", linestyle="--", linewidth=0.8)
            cell = sorted(by_cell.get((s1, s2), []), key=lambda b: b.delta)
            if cell:
                deltas = [b.delta for b in cell]
                rates = [b.win_rate for b in cell]
                los = [b.wilson_lo for b in cell]
                his = [b.wilson_hi for b in cell]
                ax.fill_between(deltas, los, his, color="0.7", alpha=0.6, linewidth=0)
                ax.plot(deltas, rates, color="C0", marker="o", markersize=2.5,
                        linewidth=1.2)
            ax.set_title(
                f"{POLICY_LABEL[s1]} vs {POLICY_LABEL[s2]}", fontsize=9
            )
            ax.set_xlim(-10.5, 10.5)
            ax.set_ylim(0.0, 1.0)
            if i == 2:
                ax.set_xlabel("trump-count imbalance")
            if j == 0:
                ax.set_ylabel("seat-1 win rate")
    return fig


def render_breakeven(spec: FigureSpec) -> Path:
    """Validate the CSV, draw the grid, and write a vector image."""
    bins = load_bins(spec.input_csv)
    fig = build_figure(bins)
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    suffix = out.suffix.lower().lstrip(".") or "pdf"
    # strip volatile metadata so repeated renders are byte-identical
    if suffix == "pdf":
        metadata = {"CreationDate": None, "Producer": "briscola-figures"}
    elif suffix == "svg":
        metadata = {"Date": None}
    else:
        metadata = None
    try:
        fig.savefig(out, format=suffix, metadata=metadata)
    finally:
        plt.close(fig)
    return out
