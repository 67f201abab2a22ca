"""Synthetic leagues with known latent skills, used as an oracle generator."""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError
from .games import GameRecord
from .ratings_core import MovdaParams, expected_mov

BASE_SCORE = 100
MAX_REDRAWS = 1000


@dataclass(frozen=True)
class StepChange:
    """Shift ``team``'s latent skill by ``delta`` points from game index ``at_game`` on."""

    team: int
    at_game: int
    delta: float


@dataclass(frozen=True)
class SkillSpec:
    """Latent skills in rating points.

    ``initial`` fixes the starting skills; otherwise they are drawn from
    Normal(0, spread) and centred. ``drift`` is the standard deviation of an
    independent random-walk step applied to every team after each round.
    """

    initial: Sequence[float] | None = None
    spread: float = 100.0
    step: StepChange | None = None
    drift: float = 0.0


def round_robin(n_teams: int) -> list[list[tuple[int, int]]]:
    """One single round robin by the circle method; pairs are (first, second)."""
    ids = list(range(n_teams))
    if n_teams % 2:
        ids.append(-1)
    m = len(ids)
    rounds = []
    for _ in range(m - 1):
        pairs = [(ids[i], ids[m - 1 - i]) for i in range(m // 2)]
        rounds.append([(a, b) for a, b in pairs if a >= 0 and b >= 0])
        ids = [ids[0], ids[-1]] + ids[1:-1]
    return rounds


def team_name(i: int, n_teams: int) -> str:
    return f"T{i + 1:0{max(2, len(str(n_teams)))}d}"


def simulate_league(
    n_teams: int,
    n_games: int,
    true_params: MovdaParams,
    skills: SkillSpec = SkillSpec(),
    seed: int = 0,
    integer_scores: bool = False,
    start: dt.date = dt.date(2020, 1, 1),
) -> list[GameRecord]:
    """Generate ``n_games`` games from latent skills.

    Margins are Normal(expected_mov(skill gap, home), sigma2) with the
    home team as the reference side; exact-zero margins are redrawn. With
    ``integer_scores`` the margin is rounded before the zero check, which
    yields a file that passes the strict (no ties, integer) loader.
    """
    if n_teams < 2:
        raise ConfigurationError(f"need at least 2 teams, got {n_teams}")
    if n_games < 0:
        raise ConfigurationError("n_games must be non-negative")
    rng = np.random.default_rng(seed)
    if skills.initial is not None:
        skill = np.asarray(skills.initial, dtype=float)
        if skill.shape != (n_teams,):
            raise ConfigurationError(f"expected {n_teams} initial skills, got {skill.shape}")
    else:
        skill = rng.normal(0.0, skills.spread, n_teams)
        skill -= skill.mean()
    if skills.drift < 0:
        raise ConfigurationError("drift must be non-negative")
    step = skills.step
    if step is not None and not 0 <= step.team < n_teams:
        raise ConfigurationError(f"step-change team {step.team} out of range")

    sigma = math.sqrt(true_params.sigma2)
    rounds = round_robin(n_teams)
    met = {}
    names = [team_name(i, n_teams) for i in range(n_teams)]
    games = []
    day = 0
    while len(games) < n_games:
        for pairs in rounds:
            date = start + dt.timedelta(days=day)
            for seq, (a, b) in enumerate(pairs):
                if len(games) >= n_games:
                    break
                key = (min(a, b), max(a, b))
                count = met.get(key, 0)
                met[key] = count + 1
                home, away = (a, b) if count % 2 == 0 else (b, a)
                if step is not None and len(games) == step.at_game:
                    skill[step.team] += step.delta
                mean = expected_mov(skill[home] - skill[away], 1, true_params)
                margin = _draw_margin(rng, mean, sigma, integer_scores, len(games))
                games.append(
                    GameRecord(
                        game_id=f"G{len(games) + 1:06d}",
                        date=date,
                        season=str(date.year),
                        home_team=names[home],
                        away_team=names[away],
                        home_score=BASE_SCORE + max(margin, 0),
                        away_score=BASE_SCORE + max(-margin, 0),
                        seq=seq,
                    )
                )
            day += 1
            if skills.drift > 0:
                skill += rng.normal(0.0, skills.drift, n_teams)
            if len(games) >= n_games:
                break
    return games


def _draw_margin(rng, mean, sigma, integer_scores, index):
    for _ in range(MAX_REDRAWS):
        m = mean + sigma * rng.standard_normal() if sigma > 0 else mean
        if integer_scores:
            m = int(round(m))
        if m != 0:
            return m
        if sigma == 0:
            break
    raise ConfigurationError(
        f"game {index}: could not draw a non-zero margin (mean {mean}, sigma {sigma})"
    )
