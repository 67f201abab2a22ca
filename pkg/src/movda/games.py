"""Game records and the chronological train/tune/holdout split."""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DataIntegrityError, InsufficientDataError, InvalidArgumentError, OrderingError


@dataclass(frozen=True, slots=True)
class GameRecord:
    game_id: str
    date: dt.date
    season: str
    home_team: str
    away_team: str
    home_score: float
    away_score: float
    neutral_site: bool = False
    seq: int = 0

    def __post_init__(self):
        if self.home_team == self.away_team:
            raise DataIntegrityError("home and away team are the same", game_id=self.game_id)
        if not (self.home_score >= 0 and self.away_score >= 0):
            raise DataIntegrityError("scores must be non-negative", game_id=self.game_id)
        if not (math.isfinite(self.home_score) and math.isfinite(self.away_score)):
            raise DataIntegrityError("scores must be finite", game_id=self.game_id)

    @property
    def t_mov_home(self) -> float:
        return self.home_score - self.away_score

    @property
    def i_ha(self) -> int:
        """Home indicator from the home team's point of view."""
        return 0 if self.neutral_site else 1

    @property
    def home_outcome(self) -> float:
        m = self.t_mov_home
        return 1.0 if m > 0 else (0.0 if m < 0 else 0.5)


def sort_key(game: GameRecord):
    return (game.date, game.seq)


def check_sorted(games: Sequence[GameRecord]) -> None:
    for i in range(1, len(games)):
        if games[i].date < games[i - 1].date:
            raise OrderingError(
                f"games are not in chronological order: {games[i].game_id!r} ({games[i].date}) "
                f"follows {games[i - 1].game_id!r} ({games[i - 1].date})"
            )


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 0.70
    tune_frac: float = 0.20
    holdout_frac: float = 0.10

    def __post_init__(self):
        fracs = (self.train_frac, self.tune_frac, self.holdout_frac)
        if any(not f > 0 for f in fracs):
            raise InvalidArgumentError(f"split fractions must be positive, got {fracs}")
        if sum(Fraction(str(f)) for f in fracs) != 1:
            raise InvalidArgumentError(f"split fractions must sum to 1, got {fracs}")

    @classmethod
    def parse(cls, text: str) -> "SplitSpec":
        try:
            parts = [float(x) for x in text.split(",")]
        except ValueError:
            raise InvalidArgumentError(f"bad split {text!r}; expected e.g. 0.7,0.2,0.1") from None
        if len(parts) != 3:
            raise InvalidArgumentError(f"bad split {text!r}; expected three fractions")
        return cls(*parts)

    def sizes(self, n: int) -> tuple[int, int, int]:
        # exact rational floors so 0.7 * 10 is 7, not 7.000000000000001
        n_train = math.floor(Fraction(str(self.train_frac)) * n)
        n_tune = math.floor(Fraction(str(self.tune_frac)) * n)
        return n_train, n_tune, n - n_train - n_tune


MIN_SPLIT_GAMES = 10


def split_dataset(games: Sequence[GameRecord], spec: SplitSpec = SplitSpec()):
    """Contiguous chronological (train, tune, holdout) partition."""
    n = len(games)
    if n < MIN_SPLIT_GAMES:
        raise InsufficientDataError(f"need at least {MIN_SPLIT_GAMES} games to split, got {n}")
    n_train, n_tune, _ = spec.sizes(n)
    games = list(games)
    return games[:n_train], games[n_train : n_train + n_tune], games[n_train + n_tune :]
