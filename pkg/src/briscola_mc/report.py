"""Aggregation layer: win-rate table, dominance tests, trump-use profile,
break-even bins, and the combined run report.

All aggregations stream the run's CSV files in a single pass; nothing is
loaded whole except the logistic design matrix (one float row per
non-tied game).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from . import stats
from .cards import POINTS_BY_RANK, RANK_DISPLAY
from .engine import GameSummary
from .policies import PolicyId
from .stats import Interval
from .tournament import GAMES_CSV_NAME, TRICKS_CSV_NAME, load_manifest

POLICY_ORDER = ("G", "H", "C")

_POINTS_BY_NAME = {RANK_DISPLAY[r]: POINTS_BY_RANK[r] for r in range(1, 11)}

BREAKEVEN_COLUMNS = (
    "strategy_g1", "strategy_g2", "delta", "n", "win_rate", "wilson_lo", "wilson_hi",
)

#: Bins smaller than this are dropped from break-even output.
MIN_BIN_GAMES = 50


@dataclass
class MatchupCell:
    strategy_g1: str
    strategy_g2: str
    n_games: int
    n_ties: int
    n_g1_wins: int
    win_rate_nontied: float
    wilson_95: Interval


@dataclass
class DominanceRow:
    strategy_g1: str
    strategy_g2: str
    k: int
    n: int
    p_raw: float
    p_bonferroni: float


@dataclass
class BriscolaUseRow:
    policy: str
    n_played: int
    win_rate: float
    mean_points_per_win: float
    wasted_fraction: float


@dataclass
class BreakevenBin:
    strategy_g1: str
    strategy_g2: str
    delta_briscola: int
    n_games: int
    win_rate: float
    wilson_95: Interval


def iter_games(games_csv: Path) -> Iterator[GameSummary]:
    """Stream games.csv rows as GameSummary values."""
    with open(games_csv, "r", encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        expected = ",".join(
            ("partita_id", "match_id", "strategy_g1", "strategy_g2", "trump_suit",
             "outcome", "final_points_g1", "final_points_g2", "briscole_total_g1",
             "briscole_total_g2", "delta_briscola")
        )
        if header != expected:
            raise ValueError(f"unexpected games.csv header in {games_csv}: {header!r}")
        for line in f:
            p = line.rstrip("\n").split(",")
            yield GameSummary(
                int(p[0]), int(p[1]), p[2], p[3], p[4], p[5],
                int(p[6]), int(p[7]), int(p[8]), int(p[9]), int(p[10]),
            )


def _cell_counts(games: Iterable[GameSummary]) -> Dict[Tuple[str, str], List[int]]:
    """Per-pairing [games, ties, g1 wins] counts."""
    counts: Dict[Tuple[str, str], List[int]] = {}
    for g in games:
        c = counts.setdefault((g.strategy_g1, g.strategy_g2), [0, 0, 0])
        c[0] += 1
        if g.outcome == "Tie":
            c[1] += 1
        elif g.outcome == "G1":
            c[2] += 1
    return counts


def winrate_table(
    games: Iterable[GameSummary], confidence: float = 0.95
) -> List[MatchupCell]:
    """Non-tied G1 win rate with Wilson interval for each of the 9 pairings."""
    counts = _cell_counts(games)
    missing = [
        f"{a}:{b}"
        for a in POLICY_ORDER
        for b in POLICY_ORDER
        if (a, b) not in counts
    ]
    if missing:
        raise ValueError(f"games file does not cover all pairings; missing {missing}")
    cells = []
    for a in POLICY_ORDER:
        for b in POLICY_ORDER:
            n, ties, wins = counts[(a, b)]
            nontied = n - ties
            cells.append(
                MatchupCell(
                    a, b, n, ties, wins,
                    wins / nontied,
                    stats.wilson_interval(wins, nontied, confidence),
                )
            )
    return cells


def dominance_tests(games: Iterable[GameSummary]) -> List[DominanceRow]:
    """Exact binomial test of every non-baseline pairing against the
    greedy-vs-greedy baseline rate, Bonferroni-corrected as one family."""
    counts = _cell_counts(games)
    if ("G", "G") not in counts:
        raise ValueError("baseline pairing G:G is absent from the games file")
    base_n, base_ties, base_wins = counts[("G", "G")]
    p0 = base_wins / (base_n - base_ties)
    rows = []
    for a in POLICY_ORDER:
        for b in POLICY_ORDER:
            if (a, b) == ("G", "G") or (a, b) not in counts:
                continue
            n, ties, wins = counts[(a, b)]
            nontied = n - ties
            rows.append(
                DominanceRow(
                    a, b, wins, nontied,
                    stats.binom_test_two_sided(wins, nontied, p0), 0.0,
                )
            )
    corrected = stats.bonferroni([r.p_raw for r in rows], len(rows))
    for row, p in zip(rows, corrected):
        row.p_bonferroni = p
    return rows


def _card_is_trump(card_name: str, trump_name: str) -> bool:
    return card_name.endswith(trump_name)


def _card_points(card_name: str) -> int:
    return _POINTS_BY_NAME[card_name.split(" di ", 1)[0]]


def briscola_use_profile(tricks_csv: Optional[Path]) -> List[BriscolaUseRow]:
    """Trump-use profile per policy, pooled over matchups and both seats.

    For every trick in which a policy played a trump: how often that play
    won the trick, the mean points collected per winning play, and how
    often the opposing card was worth nothing ("wasted" trumps).
    """
    if tricks_csv is None or not Path(tricks_csv).is_file():
        raise FileNotFoundError(
            "trick-level analysis requires the trick log; rerun simulate with --trick-log"
        )
    played = {p: 0 for p in POLICY_ORDER}
    won = {p: 0 for p in POLICY_ORDER}
    points_won = {p: 0 for p in POLICY_ORDER}
    wasted = {p: 0 for p in POLICY_ORDER}
    with open(tricks_csv, "r", encoding="utf-8") as f:
        f.readline()  # header
        for line in f:
            p = line.rstrip("\n").split(",")
            trump = p[5]
            carta_g1, carta_g2 = p[6], p[7]
            if _card_is_trump(carta_g1, trump):
                pol = p[2]
                played[pol] += 1
                if p[8] == "G1":
                    won[pol] += 1
                    points_won[pol] += int(p[9])
                if _card_points(carta_g2) == 0:
                    wasted[pol] += 1
            if _card_is_trump(carta_g2, trump):
                pol = p[3]
                played[pol] += 1
                if p[8] == "G2":
                    won[pol] += 1
                    points_won[pol] += int(p[9])
                if _card_points(carta_g1) == 0:
                    wasted[pol] += 1
    return [
        BriscolaUseRow(
            pol,
            played[pol],
            won[pol] / played[pol],
            points_won[pol] / won[pol] if won[pol] else 0.0,
            wasted[pol] / played[pol],
        )
        for pol in POLICY_ORDER
        if played[pol] > 0
    ]


def breakeven_bins(
    games: Iterable[GameSummary],
    confidence: float = 0.95,
    min_games: int = MIN_BIN_GAMES,
) -> List[BreakevenBin]:
    """Non-tied G1 win rate per (pairing, trump imbalance) bin."""
    counts: Dict[Tuple[str, str, int], List[int]] = {}
    for g in games:
        if g.outcome == "Tie":
            continue
        c = counts.setdefault((g.strategy_g1, g.strategy_g2, g.delta_briscola), [0, 0])
        c[0] += 1
        if g.outcome == "G1":
            c[1] += 1
    bins = []
    for (a, b, delta) in sorted(counts):
        n, wins = counts[(a, b, delta)]
        if n < min_games:
            continue
        bins.append(
            BreakevenBin(
                a, b, delta, n, wins / n, stats.wilson_interval(wins, n, confidence)
            )
        )
    return bins


def breakeven_crossing(
    bins: List[BreakevenBin], strategy_g1: str, strategy_g2: str
) -> Optional[float]:
    """Interpolated trump imbalance at which G1's win rate crosses 0.5."""
    pts = sorted(
        (b.delta_briscola, b.win_rate)
        for b in bins
        if b.strategy_g1 == strategy_g1 and b.strategy_g2 == strategy_g2
    )
    for (d0, r0), (d1, r1) in zip(pts, pts[1:]):
        if r0 < 0.5 <= r1:
            return d0 + (0.5 - r0) * (d1 - d0) / (r1 - r0)
    return None


def write_breakeven_csv(bins: List[BreakevenBin], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(",".join(BREAKEVEN_COLUMNS) + "\n")
        for b in bins:
            f.write(
                f"{b.strategy_g1},{b.strategy_g2},{b.delta_briscola},{b.n_games},"
                f"{b.win_rate:.10g},{b.wilson_95.lower:.10g},{b.wilson_95.upper:.10g}\n"
            )


# ---------------------------------------------------------------------------
# Full report
# ---------------------------------------------------------------------------


@dataclass
class ReportSection:
    name: str
    status: str  # "ok" | "skipped" | "failed"
    detail: str = ""


def _fmt_p(p: float) -> str:
    if p == 0.0:
        return "<1e-300"
    return f"{p:.3g}"


def full_report(run_dir: Path, out_dir: Optional[Path] = None,
                confidence: float = 0.95) -> List[ReportSection]:
    """Run every analysis against a tournament directory.

    Writes machine-readable CSVs plus ``report.txt`` into ``out_dir``
    (default: the run directory) and returns per-section statuses; a
    failing section is reported and skipped rather than aborting the rest.
    """
    run_dir = Path(run_dir)
    out_dir = Path(out_dir) if out_dir is not None else run_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = load_manifest(run_dir)
    games_csv = run_dir / manifest.get("games_csv", GAMES_CSV_NAME)
    tricks_name = manifest.get("tricks_csv")
    tricks_csv = run_dir / tricks_name if tricks_name else None

    sections: List[ReportSection] = []
    lines: List[str] = []
    lines.append(f"tournament run: {run_dir}")
    lines.append(
        f"seed {manifest['master_seed']}, {manifest['games_per_pairing']} games "
        f"per pairing, {manifest['n_games']} games total"
    )
    lines.append("")

    def section(name: str, fn) -> None:
        try:
            fn()
            sections.append(ReportSection(name, "ok"))
        except FileNotFoundError as exc:
            sections.append(ReportSection(name, "skipped", str(exc)))
            lines.append(f"[{name}] skipped: {exc}")
            lines.append("")
        except Exception as exc:  # keep the remaining sections running
            sections.append(ReportSection(name, "failed", str(exc)))
            lines.append(f"[{name}] FAILED: {exc}")
            lines.append("")

    def majority_section() -> None:
        res = stats.majority_analysis(iter_games(games_csv))
        k, n = res.proportion
        lines.append("== trump-majority analysis (non-tied games, nonzero imbalance) ==")
        lines.append(
            f"majority holder won {k} / {n} = {k / n:.4f}  "
            f"wilson {confidence:.0%} [{res.wilson_95.lower:.4f}, {res.wilson_95.upper:.4f}]"
        )
        lines.append(
            f"chi-square (Yates) vs p=0.5: {res.chisq.statistic:.1f}, "
            f"p {_fmt_p(res.chisq.p_value)}"
        )
        lines.append("")
        with open(out_dir / "majority.csv", "w", encoding="utf-8") as f:
            f.write("k,n,proportion,wilson_lo,wilson_hi,chisq,p_value\n")
            f.write(
                f"{k},{n},{k / n:.10g},{res.wilson_95.lower:.10g},"
                f"{res.wilson_95.upper:.10g},{res.chisq.statistic:.10g},"
                f"{res.chisq.p_value:.10g}\n"
            )

    def winrates_section() -> None:
        cells = winrate_table(iter_games(games_csv), confidence)
        lines.append("== G1 win rates over non-tied games (rows G1, columns G2) ==")
        for a in POLICY_ORDER:
            row = []
            for b in POLICY_ORDER:
                c = next(x for x in cells if (x.strategy_g1, x.strategy_g2) == (a, b))
                row.append(
                    f"{b}: {c.win_rate_nontied:.3f} "
                    f"[{c.wilson_95.lower:.3f}, {c.wilson_95.upper:.3f}]"
                )
            lines.append(f"  {a} vs  " + "   ".join(row))
        lines.append("")
        with open(out_dir / "winrates.csv", "w", encoding="utf-8") as f:
            f.write(
                "strategy_g1,strategy_g2,n_games,n_ties,n_g1_wins,"
                "win_rate_nontied,wilson_lo,wilson_hi\n"
            )
            for c in cells:
                f.write(
                    f"{c.strategy_g1},{c.strategy_g2},{c.n_games},{c.n_ties},"
                    f"{c.n_g1_wins},{c.win_rate_nontied:.10g},"
                    f"{c.wilson_95.lower:.10g},{c.wilson_95.upper:.10g}\n"
                )

    def dominance_section() -> None:
        rows = dominance_tests(iter_games(games_csv))
        lines.append("== exact binomial tests vs the G:G baseline (Bonferroni x8) ==")
        for r in rows:
            lines.append(
                f"  {r.strategy_g1}:{r.strategy_g2}  k={r.k} n={r.n}  "
                f"p_raw {_fmt_p(r.p_raw)}  p_bonf {_fmt_p(r.p_bonferroni)}"
            )
        lines.append("")
        with open(out_dir / "dominance.csv", "w", encoding="utf-8") as f:
            f.write("strategy_g1,strategy_g2,k,n,p_raw,p_bonferroni\n")
            for r in rows:
                f.write(
                    f"{r.strategy_g1},{r.strategy_g2},{r.k},{r.n},"
                    f"{r.p_raw:.10g},{r.p_bonferroni:.10g}\n"
                )

    def logistic_section() -> None:
        X, y = stats.outcome_design_matrix(iter_games(games_csv))
        fit = stats.fit_logistic(X, y, stats.DESIGN_COLUMNS)
        lo, hi = fit.wald_intervals(confidence)
        ors = fit.odds_ratios
        pvals = fit.wald_p_values()
        lines.append(
            f"== outcome regression on {len(y)} non-tied games "
            f"(odds ratios, {confidence:.0%} Wald) =="
        )
        for i, name in enumerate(fit.names):
            lines.append(
                f"  {name:<16} OR {ors[i]:.3f} [{lo[i]:.3f}, {hi[i]:.3f}]  "
                f"p {_fmt_p(pvals[i])}"
            )
        lines.append(
            f"  converged={fit.converged} after {fit.iterations} iterations, "
            f"log-likelihood {fit.log_likelihood:.1f}"
        )
        lines.append("")
        with open(out_dir / "logistic.csv", "w", encoding="utf-8") as f:
            f.write("term,coefficient,std_error,odds_ratio,or_lo,or_hi,p_value\n")
            se = fit.standard_errors
            for i, name in enumerate(fit.names):
                f.write(
                    f"{name},{fit.coefficients[i]:.10g},{se[i]:.10g},"
                    f"{ors[i]:.10g},{lo[i]:.10g},{hi[i]:.10g},{pvals[i]:.10g}\n"
                )

    def briscola_use_section() -> None:
        rows = briscola_use_profile(tricks_csv)
        lines.append("== trump-use profile (pooled across matchups and seats) ==")
        for r in rows:
            lines.append(
                f"  {r.policy}: played {r.n_played}, win rate {r.win_rate:.3f}, "
                f"mean pts/win {r.mean_points_per_win:.2f}, "
                f"wasted {r.wasted_fraction:.3f}"
            )
        lines.append("")
        with open(out_dir / "briscola_use.csv", "w", encoding="utf-8") as f:
            f.write("policy,n_played,win_rate,mean_points_per_win,wasted_fraction\n")
            for r in rows:
                f.write(
                    f"{r.policy},{r.n_played},{r.win_rate:.10g},"
                    f"{r.mean_points_per_win:.10g},{r.wasted_fraction:.10g}\n"
                )

    def breakeven_section() -> None:
        bins = breakeven_bins(iter_games(games_csv), confidence)
        write_breakeven_csv(bins, out_dir / "breakeven.csv")
        lines.append("== break-even imbalance per pairing (win rate crosses 0.5) ==")
        for a in POLICY_ORDER:
            for b in POLICY_ORDER:
                x = breakeven_crossing(bins, a, b)
                lines.append(
                    f"  {a}:{b}  crossing at delta ~ "
                    + (f"{x:+.2f}" if x is not None else "n/a")
                )
        lines.append("")

    def power_section() -> None:
        n = manifest["games_per_pairing"]
        alpha = 0.05 / 8
        pw = stats.power_normal_approx(0.01, n, alpha)
        lines.append("== design power ==")
        lines.append(
            f"power to detect a 0.01 win-rate shift at alpha=0.05/8 with "
            f"n={n}: {pw:.4f}"
        )
        lines.append("")

    section("majority", majority_section)
    section("winrates", winrates_section)
    section("dominance", dominance_section)
    section("logistic", logistic_section)
    section("briscola_use", briscola_use_section)
    section("breakeven", breakeven_section)
    section("power", power_section)

    status_line = ", ".join(f"{s.name}={s.status}" for s in sections)
    lines.append(f"sections: {status_line}")
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return sections
