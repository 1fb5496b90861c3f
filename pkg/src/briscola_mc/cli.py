"""Command-line entry points: simulate a tournament, analyze its output."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report as report_mod
from .policies import PolicyId
from .tournament import (
    ALL_PAIRINGS,
    GAMES_CSV_NAME,
    TournamentConfig,
    load_manifest,
    run_tournament,
)


def _parse_pairings(text: str):
    if text == "all":
        return ALL_PAIRINGS
    pairings = []
    for chunk in text.split(","):
        parts = chunk.strip().split(":")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(
                f"bad pairing {chunk!r}; expected e.g. G:H"
            )
        try:
            pairings.append((PolicyId(parts[0]), PolicyId(parts[1])))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"unknown policy in {chunk!r}; policies are G, H, C"
            )
    return tuple(pairings)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="briscola-mc",
        description="Seeded Monte Carlo Briscola tournaments and their analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a tournament and write CSV logs")
    sim.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
    sim.add_argument(
        "--games-per-pairing", type=int, default=111_111,
        help="games per ordered pairing (default 111111)",
    )
    sim.add_argument(
        "--pairings", type=_parse_pairings, default=ALL_PAIRINGS, metavar="LIST",
        help='comma-separated ordered pairings like "G:G,G:H", or "all" (default)',
    )
    sim.add_argument(
        "--trick-log", action=argparse.BooleanOptionalAction, default=True,
        help="write the per-trick CSV log (default on)",
    )
    sim.add_argument("--out-dir", type=Path, required=True, help="output directory")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--run-dir", type=Path, required=True,
                        help="directory holding a simulate run")
    common.add_argument("--out-dir", type=Path, default=None,
                        help="where to write results (default: run dir)")
    common.add_argument("--confidence", type=float, default=0.95,
                        help="confidence level for intervals (default 0.95)")

    sub.add_parser("analyze", parents=[common],
                   help="produce the full analysis report")
    sub.add_parser("winrates", parents=[common], help="9-cell win-rate table")
    sub.add_parser("dominance", parents=[common],
                   help="exact binomial tests against the G:G baseline")
    sub.add_parser("briscola-use", parents=[common],
                   help="per-policy trump-use profile (needs the trick log)")
    sub.add_parser("breakeven", parents=[common],
                   help="win rate by trump-count imbalance, per pairing")
    return parser


def _games_csv(run_dir: Path) -> Path:
    manifest = load_manifest(run_dir)
    return run_dir / manifest.get("games_csv", GAMES_CSV_NAME)


def _tricks_csv(run_dir: Path):
    manifest = load_manifest(run_dir)
    name = manifest.get("tricks_csv")
    return run_dir / name if name else None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "simulate":
        config = TournamentConfig(
            master_seed=args.seed,
            games_per_pairing=args.games_per_pairing,
            pairings=args.pairings,
            trick_log_enabled=args.trick_log,
            output_directory=args.out_dir,
        )
        result = run_tournament(config)
        print(f"wrote {result.n_games} games to {result.games_csv}")
        if result.tricks_csv is not None:
            print(f"wrote {result.n_trick_rows} trick rows to {result.tricks_csv}")
        print(f"manifest: {result.manifest_path}")
        return 0

    out_dir = args.out_dir if args.out_dir is not None else args.run_dir

    if args.command == "analyze":
        sections = report_mod.full_report(args.run_dir, out_dir, args.confidence)
        for s in sections:
            line = f"{s.name}: {s.status}"
            if s.detail:
                line += f" ({s.detail})"
            print(line)
        print(f"report written to {Path(out_dir) / 'report.txt'}")
        return 0 if all(s.status != "failed" for s in sections) else 1

    if args.command == "winrates":
        cells = report_mod.winrate_table(
            report_mod.iter_games(_games_csv(args.run_dir)), args.confidence
        )
        print("strategy_g1,strategy_g2,n_games,n_ties,n_g1_wins,win_rate,wilson_lo,wilson_hi")
        for c in cells:
            print(
                f"{c.strategy_g1},{c.strategy_g2},{c.n_games},{c.n_ties},"
                f"{c.n_g1_wins},{c.win_rate_nontied:.4f},"
                f"{c.wilson_95.lower:.4f},{c.wilson_95.upper:.4f}"
            )
        return 0

    if args.command == "dominance":
        rows = report_mod.dominance_tests(report_mod.iter_games(_games_csv(args.run_dir)))
        print("strategy_g1,strategy_g2,k,n,p_raw,p_bonferroni")
        for r in rows:
            print(
                f"{r.strategy_g1},{r.strategy_g2},{r.k},{r.n},"
                f"{r.p_raw:.6g},{r.p_bonferroni:.6g}"
            )
        return 0

    if args.command == "briscola-use":
        try:
            rows = report_mod.briscola_use_profile(_tricks_csv(args.run_dir))
        except FileNotFoundError as exc:
            print(str(exc), file=sys.stderr)
            return 1
        print("policy,n_played,win_rate,mean_points_per_win,wasted_fraction")
        for r in rows:
            print(
                f"{r.policy},{r.n_played},{r.win_rate:.4f},"
                f"{r.mean_points_per_win:.4f},{r.wasted_fraction:.4f}"
            )
        return 0

    if args.command == "breakeven":
        bins = report_mod.breakeven_bins(
            report_mod.iter_games(_games_csv(args.run_dir)), args.confidence
        )
        out_path = Path(out_dir) / "breakeven.csv"
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        report_mod.write_breakeven_csv(bins, out_path)
        print(f"wrote {len(bins)} bins to {out_path}")
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
