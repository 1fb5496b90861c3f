"""Seeded round-robin tournament: scheduling, shuffling, CSV logging.

Reproducibility contract: a game is identified by (master_seed, match_id,
game_index).  Its deal comes from a private xoshiro256++ stream seeded with
``derive_stream_seed`` of those three values, so any subset of games can be
replayed in any order and the full run is byte-identical between
invocations.  Trick rows use the fixed 15-column schema with Italian
header names; game rows carry one summary line per game.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple

from .cards import SUIT_NAMES
from .engine import GameSummary, TrickRecord, _outcome_label, _play_ids
from .policies import PolicyId
from .rng import Xoshiro256PP, derive_stream_seed, fisher_yates_shuffle

SCHEMA_VERSION = 1

GAMES_CSV_NAME = "games.csv"
TRICKS_CSV_NAME = "tricks.csv"
MANIFEST_NAME = "manifest.json"

TRICK_COLUMNS = (
    "PartitaId", "MatchId", "StrategyG1", "StrategyG2", "Mano",
    "SemeBriscola", "CartaG1", "CartaG2", "VincitoreMano", "PuntiMano",
    "BriscoleTotaliG1", "BriscoleTotaliG2", "VincitorePartita",
    "PuntiFinaliG1", "PuntiFinaliG2",
)

GAME_COLUMNS = (
    "partita_id", "match_id", "strategy_g1", "strategy_g2", "trump_suit",
    "outcome", "final_points_g1", "final_points_g2", "briscole_total_g1",
    "briscole_total_g2", "delta_briscola",
)

#: The nine ordered pairings in schedule (row-major) order.
ALL_PAIRINGS: Tuple[Tuple[PolicyId, PolicyId], ...] = tuple(
    (a, b) for a in (PolicyId.G, PolicyId.H, PolicyId.C)
    for b in (PolicyId.G, PolicyId.H, PolicyId.C)
)


@dataclass
class TournamentConfig:
    master_seed: int = 42
    games_per_pairing: int = 111_111
    pairings: Sequence[Tuple[PolicyId, PolicyId]] = ALL_PAIRINGS
    trick_log_enabled: bool = True
    output_directory: Path = field(default_factory=lambda: Path("run"))

    def __post_init__(self) -> None:
        self.output_directory = Path(self.output_directory)
        self.pairings = tuple(self.pairings)
        if self.games_per_pairing < 1:
            raise ValueError("games_per_pairing must be >= 1")
        if not self.pairings:
            raise ValueError("at least one pairing is required")

    @property
    def total_games(self) -> int:
        return self.games_per_pairing * len(self.pairings)


@dataclass
class TournamentResult:
    games_csv: Path
    tricks_csv: Optional[Path]
    manifest_path: Path
    n_games: int
    n_trick_rows: int


def deal_permutation(master_seed: int, match_id: int, game_index: int) -> List[int]:
    """The deal (as integer card ids) of one fully identified game."""
    rng = Xoshiro256PP(derive_stream_seed(master_seed, match_id, game_index))
    return fisher_yates_shuffle(range(40), rng)


def run_matchup(
    p1: PolicyId,
    p2: PolicyId,
    match_id: int,
    n_games: int,
    master_seed: int,
    *,
    partita_id_start: int = 1,
    trick_log: bool = True,
) -> Iterator[Tuple[GameSummary, Optional[List[TrickRecord]]]]:
    """Play one ordered pairing, yielding games in ascending game index."""
    if n_games < 1:
        raise ValueError("n_games must be >= 1")
    s1, s2 = p1.value, p2.value
    i1, i2 = p1.index, p2.index
    for j in range(1, n_games + 1):
        perm = deal_permutation(master_seed, match_id, j)
        pts1, pts2, b1, b2, trump, tricks = _play_ids(i1, i2, perm)
        outcome = _outcome_label(pts1, pts2)
        pid = partita_id_start + j - 1
        trump_name = SUIT_NAMES[trump]
        summary = GameSummary(
            pid, match_id, s1, s2, trump_name, outcome, pts1, pts2, b1, b2, b1 - b2
        )
        records: Optional[List[TrickRecord]] = None
        if trick_log:
            from .cards import CARD_NAME_OF

            records = [
                TrickRecord(
                    pid, match_id, s1, s2, mano, trump_name,
                    CARD_NAME_OF[cg1], CARD_NAME_OF[cg2],
                    "G1" if won == 0 else "G2", tp, tb1, tb2,
                    outcome, pts1, pts2,
                )
                for mano, cg1, cg2, won, tp, tb1, tb2 in tricks
            ]
        yield summary, records


def _write_manifest(path: Path, config: TournamentConfig, n_games: int, n_trick_rows: int) -> None:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "master_seed": config.master_seed,
        "games_per_pairing": config.games_per_pairing,
        "pairings": [f"{a.value}:{b.value}" for a, b in config.pairings],
        "trick_log_enabled": config.trick_log_enabled,
        "n_games": n_games,
        "n_trick_rows": n_trick_rows,
        "games_csv": GAMES_CSV_NAME,
        "tricks_csv": TRICKS_CSV_NAME if config.trick_log_enabled else None,
        "game_columns": list(GAME_COLUMNS),
        "trick_columns": list(TRICK_COLUMNS),
        "prng": (
            "xoshiro256++ seeded via splitmix64; per-game stream seed = "
            "mix(mix(master_seed + GAMMA*match_id) + GAMMA*game_index)"
        ),
        "card_format": "RankName di Suit (Asso, 2, Tre, 4, 5, 6, 7, Fante, Cavallo, Re)",
    }
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def run_tournament(config: TournamentConfig) -> TournamentResult:
    """Run every configured pairing and write games.csv / tricks.csv / manifest.

    Rows are emitted in ascending PartitaId (schedule order), so identical
    configs produce byte-identical files.  On any failure the partially
    written files are removed.
    """
    out_dir = config.output_directory
    out_dir.mkdir(parents=True, exist_ok=True)
    games_path = out_dir / GAMES_CSV_NAME
    tricks_path = out_dir / TRICKS_CSV_NAME if config.trick_log_enabled else None
    manifest_path = out_dir / MANIFEST_NAME

    created: List[Path] = []
    games_f = tricks_f = None
    n_games = 0
    n_trick_rows = 0
    try:
        games_f = open(games_path, "w", encoding="utf-8", newline="", buffering=1 << 20)
        created.append(games_path)
        games_f.write(",".join(GAME_COLUMNS) + "\n")
        if tricks_path is not None:
            tricks_f = open(tricks_path, "w", encoding="utf-8", newline="", buffering=1 << 20)
            created.append(tricks_path)
            tricks_f.write(",".join(TRICK_COLUMNS) + "\n")

        pid = 1
        for match_id, (p1, p2) in enumerate(config.pairings, start=1):
            for summary, records in run_matchup(
                p1, p2, match_id, config.games_per_pairing, config.master_seed,
                partita_id_start=pid, trick_log=config.trick_log_enabled,
            ):
                games_f.write(",".join(map(str, summary)) + "\n")
                n_games += 1
                if records is not None:
                    tricks_f.write("\n".join(",".join(map(str, r)) for r in records) + "\n")
                    n_trick_rows += len(records)
            pid += config.games_per_pairing

        games_f.close()
        games_f = None
        if tricks_f is not None:
            tricks_f.close()
            tricks_f = None
        _write_manifest(manifest_path, config, n_games, n_trick_rows)
        created.append(manifest_path)
    except BaseException as exc:
        for f in (games_f, tricks_f):
            if f is not None:
                try:
                    f.close()
                except OSError:
                    pass
        for p in created:
            try:
                os.unlink(p)
            except OSError:
                pass
        if isinstance(exc, OSError):
            raise OSError(f"tournament output failed in {out_dir}: {exc}") from exc
        raise

    return TournamentResult(games_path, tricks_path, manifest_path, n_games, n_trick_rows)


def load_manifest(run_dir: Path) -> dict:
    path = Path(run_dir) / MANIFEST_NAME
    if not path.is_file():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {run_dir}")
    return json.loads(path.read_text(encoding="utf-8"))
