"""Acceptance suite: every headline number from a fresh full tournament.

Runs the default configuration (seed 42, 111,111 games per ordered pairing,
999,999 games, trick log on) once per session and checks each published
target at its stated tolerance, printing one PASS/FAIL line per criterion
(run with ``pytest -s`` to see them as they happen).

Set BRISCOLA_MC_ACCEPT_DIR to a directory to keep the simulated run between
sessions; the determinism criterion always simulates a second fresh run.
"""

import hashlib
import math
import os
import shutil
from pathlib import Path

import numpy as np
import pytest

from briscola_mc import report as report_mod
from briscola_mc import stats
from briscola_mc.cards import full_deck
from briscola_mc.engine import resolve_trick
from briscola_mc.report import (
    breakeven_bins,
    breakeven_crossing,
    briscola_use_profile,
    dominance_tests,
    iter_games,
    winrate_table,
)
from briscola_mc.stats import (
    binom_test_two_sided,
    chisq_yates,
    fit_logistic,
    majority_analysis,
    outcome_design_matrix,
    power_normal_approx,
    wilson_interval,
)
from briscola_mc.tournament import TournamentConfig, load_manifest, run_tournament

pytestmark = pytest.mark.acceptance

SEED = 42
GAMES_PER_PAIRING = 111_111

# Published targets
TABLE2 = {
    ("G", "G"): 0.490, ("G", "H"): 0.508, ("G", "C"): 0.547,
    ("H", "G"): 0.456, ("H", "H"): 0.483, ("H", "C"): 0.520,
    ("C", "G"): 0.427, ("C", "H"): 0.449, ("C", "C"): 0.488,
}
TABLE5_ODDS = {
    "g1_is_H": 0.853, "g1_is_C": 0.740, "g2_is_H": 1.139, "g2_is_C": 1.349,
}
TABLE6 = {
    # policy: (n_played, win rate, mean pts per win, wasted fraction)
    "G": (3_289_145, 0.881, 5.91, 0.492),
    "H": (3_349_881, 0.805, 7.97, 0.337),
    "C": (3_360_964, 0.808, 8.04, 0.333),
}
MAJORITY_TARGET = 0.6295
TIE_FRACTION_TARGET = (999_999 - 975_263) / 999_999     # ~0.0247
DELTA_NONZERO_TARGET = 693_633 / 975_263                # ~0.711


def criterion(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="session")
def full_run(tmp_path_factory) -> Path:
    env_dir = os.environ.get("BRISCOLA_MC_ACCEPT_DIR")
    if env_dir:
        run_dir = Path(env_dir)
        try:
            manifest = load_manifest(run_dir)
            if (
                manifest["master_seed"] == SEED
                and manifest["games_per_pairing"] == GAMES_PER_PAIRING
                and manifest["trick_log_enabled"]
                and manifest["n_games"] == 999_999
            ):
                return run_dir
        except (FileNotFoundError, KeyError):
            pass
    else:
        run_dir = tmp_path_factory.mktemp("acceptance_run")
    config = TournamentConfig(
        master_seed=SEED,
        games_per_pairing=GAMES_PER_PAIRING,
        trick_log_enabled=True,
        output_directory=run_dir,
    )
    run_tournament(config)
    return run_dir


@pytest.fixture(scope="session")
def games_list(full_run):
    return list(iter_games(full_run / "games.csv"))


@pytest.fixture(scope="session")
def trump_profile(full_run):
    return briscola_use_profile(full_run / "tricks.csv")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 22), b""):
            digest.update(chunk)
    return digest.hexdigest()


# ---------------------------------------------------------------------------
# Criteria that need no simulation
# ---------------------------------------------------------------------------


def test_trick_resolution_oracle():
    def five_case(lead, resp, trump):
        if lead.suit == resp.suit:
            return lead.strength > resp.strength
        if lead.suit == trump:
            return True
        if resp.suit == trump:
            return False
        return True

    deck = full_deck()
    cases = disagreements = 0
    for trump in set(c.suit for c in deck):
        for lead in deck:
            for resp in deck:
                if lead == resp:
                    continue
                cases += 1
                if resolve_trick(lead, resp, trump) != five_case(lead, resp, trump):
                    disagreements += 1
    criterion(
        "trick-resolution oracle", cases == 6240 and disagreements == 0,
        f"{disagreements} disagreements over {cases} (pair, trump) cases",
    )


def test_stats_kernel_oracles():
    lo, hi = wilson_interval(436_627, 693_633, 0.95)
    criterion(
        "wilson fixture", (round(lo, 4), round(hi, 4)) == (0.6283, 0.6306),
        f"[{lo:.6f}, {hi:.6f}] rounds to [{round(lo, 4)}, {round(hi, 4)}]",
    )

    worst = 0.0
    for p0 in (0.5, 0.4905):
        for n in (1, 5, 10, 40, 100):
            for k in range(n + 1):
                pmf = lambda i: math.comb(n, i) * p0**i * (1 - p0) ** (n - i)
                pivot = pmf(k) * (1 + 1e-7)
                brute = min(1.0, sum(pmf(i) for i in range(n + 1) if pmf(i) <= pivot))
                got = binom_test_two_sided(k, n, p0)
                if brute > 0:
                    worst = max(worst, abs(got - brute) / brute)
    criterion(
        "exact binomial vs brute force", worst < 1e-12,
        f"worst relative error {worst:.3e} over all k, n <= 100 spot cases",
    )

    rng = np.random.default_rng(17)
    n = 200
    X = np.column_stack([
        np.ones(n),
        rng.integers(0, 2, n).astype(float),
        rng.integers(0, 2, n).astype(float),
        rng.integers(0, 2, n).astype(float),
        rng.integers(0, 2, n).astype(float),
        rng.integers(-5, 6, n).astype(float),
    ])
    beta_true = np.array([0.1, -0.2, -0.3, 0.15, 0.3, 0.2])
    y = (rng.random(n) < 1 / (1 + np.exp(-(X @ beta_true)))).astype(float)
    fit = fit_logistic(X, y, stats.DESIGN_COLUMNS)
    eta = X @ fit.coefficients
    mu = 1 / (1 + np.exp(-eta))
    score = float(np.max(np.abs(X.T @ (y - mu))))
    criterion("IRLS score vector", score < 1e-6, f"max |score| {score:.2e} at optimum")

    h = 1e-4
    p = X.shape[1]
    hess = np.zeros((p, p))
    for i in range(p):
        for j in range(p):
            steps = []
            for si, sj in ((h, h), (h, -h), (-h, h), (-h, -h)):
                b = fit.coefficients.copy()
                b[i] += si
                b[j] += sj
                steps.append(stats.logistic_log_likelihood(X, y, b))
            hess[i, j] = (steps[0] - steps[1] - steps[2] + steps[3]) / (4 * h * h)
    fisher = np.linalg.inv(fit.covariance)
    rel = float(np.max(np.abs(-hess - fisher)) / np.max(np.abs(fisher)))
    criterion(
        "Fisher information vs finite differences", rel < 1e-4,
        f"relative deviation {rel:.2e} on the 200-row fixture",
    )

    power = power_normal_approx(0.01, 110_000, 0.05 / 8)
    criterion("design power fixture", power > 0.99, f"power {power:.5f} > 0.99")

    fixture = chisq_yates(436_627, 693_633, 0.5)
    rel = abs(fixture.statistic - 46_542) / 46_542
    criterion(
        "chi-square fixture vs published 46542", rel < 0.005,
        f"statistic {fixture.statistic:.1f}, relative deviation {rel:.4%}",
    )


# ---------------------------------------------------------------------------
# Criteria over the full tournament
# ---------------------------------------------------------------------------


def test_structural_totals(full_run, games_list):
    manifest = load_manifest(full_run)
    n_games = len(games_list)
    criterion("total games", n_games == 999_999, f"{n_games} game rows")

    with open(full_run / "tricks.csv", "rb") as f:
        rows = sum(buf.count(b"\n") for buf in iter(lambda: f.read(1 << 22), b""))
    rows -= 1  # header
    criterion("total trick rows", rows == 19_999_980, f"{rows} trick rows")
    criterion(
        "manifest counts", manifest["n_games"] == 999_999
        and manifest["n_trick_rows"] == 19_999_980,
        f"manifest records {manifest['n_games']} games, "
        f"{manifest['n_trick_rows']} trick rows",
    )

    bad_points = sum(
        1 for g in games_list if g.final_points_g1 + g.final_points_g2 != 120
    )
    bad_trumps = sum(
        1 for g in games_list if g.briscole_total_g1 + g.briscole_total_g2 != 10
    )
    criterion(
        "per-game conservation", bad_points == 0 and bad_trumps == 0,
        f"{bad_points} games break the 120-point total, "
        f"{bad_trumps} the 10-trump total",
    )


def test_simulate_determinism(full_run, tmp_path_factory):
    rerun_dir = tmp_path_factory.mktemp("determinism_rerun")
    config = TournamentConfig(
        master_seed=SEED,
        games_per_pairing=GAMES_PER_PAIRING,
        trick_log_enabled=True,
        output_directory=rerun_dir,
    )
    run_tournament(config)
    try:
        same_games = _sha256(full_run / "games.csv") == _sha256(rerun_dir / "games.csv")
        same_tricks = _sha256(full_run / "tricks.csv") == _sha256(rerun_dir / "tricks.csv")
    finally:
        shutil.rmtree(rerun_dir, ignore_errors=True)
    criterion(
        "byte-identical rerun", same_games and same_tricks,
        f"games.csv identical: {same_games}, tricks.csv identical: {same_tricks}",
    )


def test_table2_win_rates(games_list):
    cells = winrate_table(games_list)
    failures = []
    for cell in cells:
        target = TABLE2[(cell.strategy_g1, cell.strategy_g2)]
        diff = cell.win_rate_nontied - target
        ok = abs(diff) <= 0.005
        print(
            f"[{'PASS' if ok else 'FAIL'}] table-2 cell "
            f"{cell.strategy_g1}:{cell.strategy_g2}: "
            f"{cell.win_rate_nontied:.4f} vs {target:.3f} ({diff:+.4f}, tol 0.005)"
        )
        if not ok:
            failures.append((cell.strategy_g1, cell.strategy_g2, diff))
    assert not failures, f"cells outside +-0.005 of the published rates: {failures}"


def test_majority_holder_analysis(games_list):
    res = majority_analysis(games_list)
    k, n = res.proportion
    prop = k / n
    criterion(
        "majority proportion", abs(prop - MAJORITY_TARGET) <= 0.004,
        f"{k}/{n} = {prop:.4f} vs {MAJORITY_TARGET} (tol 0.004)",
    )
    width = res.wilson_95.upper - res.wilson_95.lower
    criterion(
        "majority interval width", width <= 0.0025,
        f"wilson width {width:.5f} <= 0.0025",
    )
    criterion(
        "majority chi-square p-value", res.chisq.p_value < 1e-15,
        f"p = {res.chisq.p_value:.3g} on the rerun",
    )


def test_tie_rates(games_list):
    n = len(games_list)
    ties = sum(1 for g in games_list if g.outcome == "Tie")
    tie_frac = ties / n
    criterion(
        "point-tie fraction", abs(tie_frac - TIE_FRACTION_TARGET) <= 0.003,
        f"{tie_frac:.4f} vs {TIE_FRACTION_TARGET:.4f} (tol 0.003)",
    )
    nontied = [g for g in games_list if g.outcome != "Tie"]
    dz = sum(1 for g in nontied if g.delta_briscola != 0)
    frac = dz / len(nontied)
    criterion(
        "nonzero-imbalance fraction", abs(frac - DELTA_NONZERO_TARGET) <= 0.01,
        f"{frac:.4f} vs {DELTA_NONZERO_TARGET:.4f} (tol 0.01)",
    )


def test_table5_logistic_fit(games_list):
    X, y = outcome_design_matrix(games_list)
    fit = fit_logistic(X, y, stats.DESIGN_COLUMNS)
    criterion(
        "regression converged", fit.converged,
        f"IRLS converged in {fit.iterations} iterations on {len(y)} games",
    )
    eta = X @ fit.coefficients
    mu = np.where(eta >= 0, 1 / (1 + np.exp(-np.abs(eta))),
                  np.exp(-np.abs(eta)) / (1 + np.exp(-np.abs(eta))))
    score = float(np.max(np.abs(X.T @ (y - mu))))
    criterion(
        "full-fit score vector", score < 1e-6, f"max |score| {score:.2e}"
    )
    ors = dict(zip(fit.names, fit.odds_ratios))
    lo, hi = fit.wald_intervals(0.95)
    lo_d, hi_d = dict(zip(fit.names, lo)), dict(zip(fit.names, hi))
    for name, target in TABLE5_ODDS.items():
        criterion(
            f"odds ratio {name}", abs(ors[name] - target) <= 0.02,
            f"{ors[name]:.4f} vs {target} (tol 0.02)",
        )
    criterion(
        "odds ratio delta_briscola", 1.21 <= ors["delta_briscola"] <= 1.23,
        f"{ors['delta_briscola']:.4f} inside [1.21, 1.23]",
    )
    for name in (*TABLE5_ODDS, "delta_briscola"):
        excludes = hi_d[name] < 1.0 or lo_d[name] > 1.0
        criterion(
            f"wald interval {name} excludes 1", excludes,
            f"[{lo_d[name]:.4f}, {hi_d[name]:.4f}]",
        )


def test_table6_trump_profile(trump_profile):
    by_policy = {r.policy: r for r in trump_profile}
    for pol, (n_target, win_target, pts_target, waste_target) in TABLE6.items():
        row = by_policy[pol]
        criterion(
            f"trump plays {pol}",
            abs(row.n_played - n_target) / n_target <= 0.01,
            f"{row.n_played} vs {n_target} (tol 1%)",
        )
        criterion(
            f"trump win rate {pol}", abs(row.win_rate - win_target) <= 0.01,
            f"{row.win_rate:.4f} vs {win_target} (tol 0.01)",
        )
        criterion(
            f"points per trump win {pol}",
            abs(row.mean_points_per_win - pts_target) <= 0.15,
            f"{row.mean_points_per_win:.3f} vs {pts_target} (tol 0.15)",
        )
        criterion(
            f"wasted trumps {pol}",
            abs(row.wasted_fraction - waste_target) <= 0.01,
            f"{row.wasted_fraction:.4f} vs {waste_target} (tol 0.01)",
        )


def test_dominance_pattern(games_list):
    rows = dominance_tests(games_list)
    for r in rows:
        pairing = (r.strategy_g1, r.strategy_g2)
        if pairing == ("C", "C"):
            criterion(
                "dominance C:C not rejected", r.p_bonferroni > 0.05,
                f"corrected p {r.p_bonferroni:.3f} > 0.05",
            )
        else:
            criterion(
                f"dominance {r.strategy_g1}:{r.strategy_g2} rejected",
                r.p_bonferroni < 1e-5,
                f"corrected p {r.p_bonferroni:.3g} < 1e-5",
            )


def test_breakeven_structure(games_list):
    bins = breakeven_bins(games_list)
    gc = breakeven_crossing(bins, "G", "C")
    criterion(
        "break-even G:C", gc is not None and -2.0 <= gc <= 0.0,
        f"win rate crosses 0.5 at delta {gc:+.3f} (expected in [-2, 0])",
    )
    cg = breakeven_crossing(bins, "C", "G")
    criterion(
        "break-even C:G", cg is not None and 1.0 <= cg <= 3.0,
        f"win rate crosses 0.5 at delta {cg:+.3f} (expected in [+1, +3])",
    )
    for a in ("G", "H", "C"):
        for b in ("G", "H", "C"):
            cell = sorted(
                (x.delta_briscola, x.win_rate)
                for x in bins
                if (x.strategy_g1, x.strategy_g2) == (a, b)
            )
            positives = [r for d, r in cell if d > 0]
            negatives = [r for d, r in cell if d < 0]
            ok = positives[-1] > negatives[0] if positives and negatives else False
            criterion(
                f"imbalance endpoints {a}:{b}", ok,
                f"win rate {positives[-1]:.3f} at max delta vs "
                f"{negatives[0]:.3f} at min delta",
            )
