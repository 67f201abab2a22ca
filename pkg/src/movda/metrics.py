"""Evaluation metrics over a prediction log and per-team rating paths."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

from .errors import ConfigurationError, UndefinedMetricError
from .ratings_core import MovdaParams, expected_mov

logger = logging.getLogger(__name__)

DEFAULT_BAND = 20.0
DEFAULT_STABLE_WINDOW = 200

REPORT_KEYS = ("accuracy_pct", "brier", "margin_mae", "convergence_games", "n_games")


@dataclass
class EvalReport:
    accuracy_pct: float
    brier: float
    margin_mae: float | None
    convergence_games: float | None
    n_games: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _require(log):
    if not log:
        raise UndefinedMetricError("metric is undefined on an empty prediction log")


def accuracy(log) -> float:
    """Percent of games won by the higher pre-rated side; rating ties earn half credit."""
    _require(log)
    credit = 0.0
    for e in log:
        if e.pre_rating_home == e.pre_rating_away:
            credit += 0.5
        elif (e.pre_rating_home > e.pre_rating_away) == (e.actual_margin_home > 0):
            if e.actual_margin_home != 0:
                credit += 1.0
    return 100.0 * credit / len(log)


def brier(log) -> float:
    _require(log)
    return math.fsum((e.p_home_win - e.actual_home_win) ** 2 for e in log) / len(log)


def margin_mae(log, params: MovdaParams | None) -> float:
    """Mean absolute error of the fitted margin curve on each game's pre-match ratings."""
    _require(log)
    if params is None:
        raise ConfigurationError("margin MAE needs fitted expected-margin parameters")
    return math.fsum(
        abs(e.actual_margin_home - expected_mov(e.pre_rating_home - e.pre_rating_away, e.i_ha, params))
        for e in log
    ) / len(log)


def convergence_index(series: Sequence[float], band: float, stable_window: int) -> int:
    """1-based index from which every rating stays within ``band`` of the final-window mean."""
    target = math.fsum(series[-stable_window:]) / stable_window
    g = len(series)
    while g > 0 and abs(series[g - 1] - target) <= band:
        g -= 1
    # g is the last out-of-band position (0 if none); a series that ends
    # outside the band reports len + 1
    return g + 1


def convergence_speed(
    histories: Mapping[str, Sequence[float]],
    band: float = DEFAULT_BAND,
    stable_window: int = DEFAULT_STABLE_WINDOW,
) -> float:
    """Mean games-to-stabilise across teams with enough history."""
    indices = []
    short = []
    for team, series in histories.items():
        if len(series) < stable_window:
            short.append(f"{team} ({len(series)})")
            continue
        indices.append(convergence_index(series, band, stable_window))
    if short:
        logger.warning(
            "excluded from convergence, fewer than %d games in the span: %s",
            stable_window,
            ", ".join(short),
        )
    if not indices:
        raise UndefinedMetricError(
            f"no team has at least {stable_window} games in the convergence span"
        )
    return math.fsum(indices) / len(indices)
