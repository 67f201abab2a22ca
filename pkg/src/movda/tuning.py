"""Exhaustive grid search over model hyperparameters, scored by Brier."""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import ConfigurationError, InsufficientDataError
from .games import GameRecord
from .metrics import brier
from .models import ModelConfig, make_model
from .ratings_core import MovdaParams
from .replay import replay_model

LAMBDA_GRID = [0.0] + [round(0.1 * i, 1) for i in range(1, 31)]
K_GRID = [10.0, 15.0, 20.0, 25.0, 30.0]

DEFAULT_GRIDS: dict[str, dict[str, list[float]]] = {
    "elo": {"k": K_GRID},
    "movda": {"lam": LAMBDA_GRID},
    "linear-mov": {"k": K_GRID, "c_mov": [0.05, 0.1, 0.2], "k_max": [1.5, 2.0, 3.0]},
    "glicko2": {"glicko_tau": [0.2, 0.3, 0.5, 0.75, 1.0, 1.2]},
    "trueskill": {"ts_beta": [1.0, 2.0, 3.0, 4.0], "ts_tau": [0.1, 0.2, 0.5, 1.0]},
}


@dataclass
class TuneResult:
    kind: str
    best_config: ModelConfig
    best_brier: float
    names: tuple[str, ...]
    table: list[tuple[tuple[float, ...], float]] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "model": self.kind,
            "best_brier": self.best_brier,
            "best": dict(zip(self.names, self.best_point)),
            "config": self.best_config.to_dict(),
            "table": [dict(zip(self.names, pt), brier=b) for pt, b in self.table],
        }

    @property
    def best_point(self) -> tuple[float, ...]:
        return tuple(getattr(self.best_config, n) for n in self.names)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def table_csv(self) -> str:
        lines = [",".join(self.names + ("brier",))]
        lines += [",".join(repr(v) for v in pt + (b,)) for pt, b in self.table]
        return "\n".join(lines) + "\n"


def check_grid(grid: Mapping[str, Sequence[float]]) -> None:
    if not grid:
        raise ConfigurationError("grid is empty")
    valid = set(ModelConfig().to_dict())
    for name, values in grid.items():
        if name not in valid:
            raise ConfigurationError(f"unknown grid parameter {name!r}")
        if not values:
            raise ConfigurationError(f"grid for {name!r} is empty")
        if list(values) != sorted(values):
            raise ConfigurationError(f"grid for {name!r} must be sorted ascending")


def score_point(kind, config, params, train, tune) -> float:
    """Brier on ``tune`` after warming ratings on ``train`` with the same config."""
    model = make_model(kind, config, params)
    games = list(train) + list(tune)
    result = replay_model(games, model, record_history=False, log_from=len(train))
    return brier(result.log)


def _score_star(args):
    return score_point(*args)


def grid_search(
    kind: str,
    grid: Mapping[str, Sequence[float]] | None,
    train: Sequence[GameRecord],
    tune: Sequence[GameRecord],
    params: MovdaParams | None = None,
    base: ModelConfig = ModelConfig(),
    workers: int = 1,
) -> TuneResult:
    """Evaluate every grid point; ties go to the smallest parameter tuple."""
    if not tune:
        raise InsufficientDataError("tuning split is empty")
    grid = DEFAULT_GRIDS[kind] if grid is None else grid
    check_grid(grid)
    names = tuple(grid)
    points = list(itertools.product(*(grid[n] for n in names)))
    configs = [base.replace(**dict(zip(names, pt))) for pt in points]
    jobs = [(kind, cfg, params, train, tune) for cfg in configs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(_score_star, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        scores = [_score_star(j) for j in jobs]

    table = sorted(zip(points, scores))
    best_pt, best = min(table, key=lambda row: (row[1], row[0]))
    return TuneResult(kind, base.replace(**dict(zip(names, best_pt))), best, names, table)
