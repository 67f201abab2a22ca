"""End-to-end workflows: fit the margin curve, evaluate models, ablate."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import UndefinedMetricError
from .fitting import FitReport, fit_emov
from .games import GameRecord, SplitSpec, check_sorted, split_dataset
from .metrics import (
    DEFAULT_BAND,
    DEFAULT_STABLE_WINDOW,
    EvalReport,
    accuracy,
    brier,
    convergence_speed,
    margin_mae,
)
from .models import MODEL_KINDS, ModelConfig, make_model
from .ratings_core import MovdaParams
from .replay import ReplayResult, replay_model, reset_team_series, warm_book

logger = logging.getLogger(__name__)

RATING_SOURCES = ("train", "whole-dataset")
REPORT_SPLITS = ("holdout", "tune")
CONVERGENCE_SPANS = ("test", "holdout")


def fit_samples(
    games: Sequence[GameRecord],
    split: SplitSpec = SplitSpec(),
    config: ModelConfig = ModelConfig(),
    rating_source: str = "train",
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rating-gap / home / margin triples for the training games.

    Every game contributes its home and its away perspective, so the home
    indicator takes both signs and delta is separable from gamma.
    ``rating_source="train"`` uses standard-ELO pre-match ratings from a
    replay of the training split; ``"whole-dataset"`` uses the final ratings
    of a standard-ELO run over all games for every training game.
    """
    check_sorted(games)
    train, _, _ = split_dataset(games, split)
    elo = make_model("elo", config)
    if rating_source == "train":
        log = replay_model(train, elo, record_history=False).log
        gaps = np.array([e.pre_rating_home - e.pre_rating_away for e in log])
    elif rating_source == "whole-dataset":
        final = warm_book(games, elo).states
        gaps = np.array([final[g.home_team] - final[g.away_team] for g in train])
    else:
        raise ValueError(f"rating_source must be one of {RATING_SOURCES}, got {rating_source!r}")
    home = np.array([g.i_ha for g in train], dtype=float)
    margin = np.array([g.t_mov_home for g in train], dtype=float)
    return (
        np.concatenate([gaps, -gaps]),
        np.concatenate([home, -home]),
        np.concatenate([margin, -margin]),
    )


def fit_from_games(
    games: Sequence[GameRecord],
    split: SplitSpec = SplitSpec(),
    config: ModelConfig = ModelConfig(),
    rating_source: str = "train",
    **fit_options,
) -> FitReport:
    return fit_emov(fit_samples(games, split, config, rating_source), **fit_options)


@dataclass
class ModelEvaluation:
    kind: str
    config: ModelConfig
    report: EvalReport
    replay: ReplayResult
    histories: dict[str, list[float]]


def span_bounds(n: int, split: SplitSpec, span: str) -> tuple[int, int]:
    n_train, n_tune, _ = split.sizes(n)
    if span in ("test", "tune+holdout"):
        return n_train, n
    if span == "holdout":
        return n_train + n_tune, n
    if span == "tune":
        return n_train, n_train + n_tune
    raise ValueError(f"unknown span {span!r}")


def evaluate_model(
    games: Sequence[GameRecord],
    kind: str,
    config: ModelConfig = ModelConfig(),
    params: MovdaParams | None = None,
    split: SplitSpec = SplitSpec(),
    report_on: str = "holdout",
    convergence_on: str = "test",
    band: float = DEFAULT_BAND,
    stable_window: int = DEFAULT_STABLE_WINDOW,
) -> ModelEvaluation:
    """Replay one model over all games and score it on the report split.

    Ratings start at the default for every team and run through the whole
    sequence; metrics use only the predictions of the report split.
    Convergence restarts each team, one at a time, at the start of the
    convergence span with everyone else warm.
    """
    check_sorted(games)
    split_dataset(games, split)  # size validation
    model = make_model(kind, config, params)
    lo, hi = span_bounds(len(games), split, report_on)
    result = replay_model(games, model, params=params, log_from=lo)
    log = result.log[: hi - lo]

    c_lo, c_hi = span_bounds(len(games), split, convergence_on)
    warm = warm_book(games[:c_lo], model)
    histories = reset_team_series(games[c_lo:c_hi], model, warm)
    try:
        conv = convergence_speed(histories, band, stable_window)
    except UndefinedMetricError as exc:
        logger.warning("convergence for %s unavailable: %s", kind, exc)
        conv = None

    report = EvalReport(
        accuracy_pct=accuracy(log),
        brier=brier(log),
        margin_mae=margin_mae(log, params) if params is not None else None,
        convergence_games=conv,
        n_games=len(log),
    )
    return ModelEvaluation(kind, config, report, result, histories)


def evaluate_all(
    games: Sequence[GameRecord],
    configs: Mapping[str, ModelConfig],
    params: MovdaParams,
    kinds: Sequence[str] = MODEL_KINDS,
    **kwargs,
) -> dict[str, ModelEvaluation]:
    return {
        kind: evaluate_model(games, kind, configs.get(kind, ModelConfig()), params, **kwargs)
        for kind in kinds
    }


def ablate(
    games: Sequence[GameRecord],
    config: ModelConfig,
    params: MovdaParams,
    **kwargs,
) -> dict[str, ModelEvaluation]:
    """MOVDA with the margin term switched off (lambda = 0) against the full model."""
    return {
        "no-differential": evaluate_model(games, "movda", config.replace(lam=0.0), params, **kwargs),
        "full": evaluate_model(games, "movda", config, params, **kwargs),
    }
