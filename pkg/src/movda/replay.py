"""Chronological game-by-game replay of a rating model."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .games import GameRecord, check_sorted
from .models import RatingBook, RatingModel
from .ratings_core import MovdaParams, expected_mov

logger = logging.getLogger(__name__)


class PredictionLogEntry(NamedTuple):
    game_id: str
    p_home_win: float
    predicted_margin_home: float
    actual_home_win: float
    actual_margin_home: float
    pre_rating_home: float
    pre_rating_away: float
    i_ha: int

    @property
    def pre_ratings(self) -> tuple[float, float]:
        return self.pre_rating_home, self.pre_rating_away


LOG_FIELDS = PredictionLogEntry._fields


class HistoryEntry(NamedTuple):
    game_index: int
    game_id: str
    rating: float


@dataclass
class ReplayResult:
    log: list[PredictionLogEntry]
    history: dict[str, list[HistoryEntry]]
    book: RatingBook
    initial: dict[str, float] = field(default_factory=dict)

    def rating_series(self, team: str) -> list[float]:
        return [h.rating for h in self.history.get(team, ())]


def replay_model(
    games: Sequence[GameRecord],
    model: RatingModel,
    book: RatingBook | None = None,
    params: MovdaParams | None = None,
    record_history: bool = True,
    log_from: int = 0,
) -> ReplayResult:
    """Predict each game from pre-match state, then apply the model's update.

    ``book`` carries warm state in; it is copied, never mutated. Predicted
    margins use ``params`` on the model's ELO-scale ratings and are NaN when
    no params are given. Only games at index ``>= log_from`` are logged.
    """
    check_sorted(games)
    book = book.copy() if book is not None else RatingBook(model)
    initial = book.ratings()
    log: list[PredictionLogEntry] = []
    history: dict[str, list[HistoryEntry]] = {}
    rating = model.rating
    for idx, game in enumerate(games):
        home = book.get(game.home_team)
        away = book.get(game.away_team)
        if idx >= log_from:
            r_home, r_away = rating(home), rating(away)
            margin = (
                expected_mov(r_home - r_away, game.i_ha, params) if params is not None else math.nan
            )
            log.append(
                PredictionLogEntry(
                    game.game_id,
                    model.win_probability(home, away),
                    margin,
                    game.home_outcome,
                    game.t_mov_home,
                    r_home,
                    r_away,
                    game.i_ha,
                )
            )
        new_home, new_away = model.update(home, away, game)
        book.states[game.home_team] = new_home
        book.states[game.away_team] = new_away
        if record_history:
            history.setdefault(game.home_team, []).append(
                HistoryEntry(idx, game.game_id, rating(new_home))
            )
            history.setdefault(game.away_team, []).append(
                HistoryEntry(idx, game.game_id, rating(new_away))
            )
    return ReplayResult(log, history, book, initial)


def warm_book(games: Sequence[GameRecord], model: RatingModel) -> RatingBook:
    """Rating state after replaying ``games`` from scratch."""
    return replay_model(games, model, record_history=False, log_from=len(games)).book


def reset_team_series(
    span: Sequence[GameRecord],
    model: RatingModel,
    warm: RatingBook | None = None,
    teams: Sequence[str] | None = None,
) -> dict[str, list[float]]:
    """Rating path of each team when it alone restarts from the default state.

    For every team appearing in ``span`` the span is replayed from ``warm``
    with only that team reset, and its post-game ratings are collected.
    """
    warm = warm.copy() if warm is not None else RatingBook(model)
    if teams is None:
        seen: dict[str, None] = {}
        for g in span:
            seen.setdefault(g.home_team)
            seen.setdefault(g.away_team)
        teams = list(seen)
    out = {}
    for team in teams:
        book = warm.copy()
        book.reset(team)
        out[team] = _team_path(span, model, book, team)
    return out


def _team_path(span, model, book, team):
    series = []
    states = book.states
    for game in span:
        home = book.get(game.home_team)
        away = book.get(game.away_team)
        new_home, new_away = model.update(home, away, game)
        states[game.home_team] = new_home
        states[game.away_team] = new_away
        if game.home_team == team:
            series.append(model.rating(new_home))
        elif game.away_team == team:
            series.append(model.rating(new_away))
    return series
