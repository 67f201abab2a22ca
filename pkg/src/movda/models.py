"""Uniform predict/update adapters over the five rating systems.

Each model keeps per-team state in a :class:`RatingBook`. ``rating()`` maps a
state onto the ELO points scale so that accuracy and the shared
expected-margin curve can be evaluated the same way for every model.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Any

from . import baselines as bl
from .errors import ConfigurationError, DataIntegrityError, InvalidArgumentError
from .games import GameRecord
from .ratings_core import (
    DEFAULT_C,
    DEFAULT_K,
    DEFAULT_RATING,
    EloConfig,
    MovdaParams,
    check_margin_consistency,
    elo_update,
    expected_outcome,
    movda_update,
)

logger = logging.getLogger(__name__)

MODEL_KINDS = ("elo", "movda", "linear-mov", "glicko2", "trueskill")


@dataclass(frozen=True)
class ModelConfig:
    """All hyperparameters for every model kind; each kind reads its own."""

    k: float = DEFAULT_K
    c: float = DEFAULT_C
    lam: float = 0.0
    c_mov: float = 0.1
    k_max: float = 2.0
    glicko_tau: float = bl.DEFAULT_GLICKO_TAU
    glicko_rd: float = bl.DEFAULT_GLICKO_RD
    glicko_volatility: float = bl.DEFAULT_GLICKO_VOLATILITY
    ts_mu: float = bl.TS_MU
    ts_sigma: float = bl.TS_SIGMA
    ts_beta: float = bl.TS_BETA
    ts_tau: float = bl.TS_TAU
    initial_rating: float = DEFAULT_RATING
    # ELO points per TrueSkill prior-sigma when putting mu on the ELO scale
    ts_elo_scale: float = bl.GLICKO2_SCALE

    def replace(self, **changes) -> "ModelConfig":
        unknown = set(changes) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ModelConfig":
        return cls().replace(**{k: float(v) for k, v in d.items()})


class RatingModel:
    kind = ""

    def __init__(self, config: ModelConfig = ModelConfig()):
        self.config = config

    def initial_state(self):
        raise NotImplementedError

    def rating(self, state) -> float:
        raise NotImplementedError

    def win_probability(self, home, away) -> float:
        raise NotImplementedError

    def update(self, home, away, game: GameRecord):
        raise NotImplementedError


class EloModel(RatingModel):
    kind = "elo"

    def __init__(self, config: ModelConfig = ModelConfig()):
        super().__init__(config)
        self._cfg = EloConfig(config.k, config.c, 0.0)

    def initial_state(self):
        return self.config.initial_rating

    def rating(self, state):
        return state

    def win_probability(self, home, away):
        return expected_outcome(home - away, self.config.c)

    def update(self, home, away, game):
        t_mov = game.t_mov_home
        s = game.home_outcome
        check_margin_consistency(s, t_mov, game.game_id)
        return elo_update(home, away, s, self._cfg)


class MovdaModel(EloModel):
    kind = "movda"

    def __init__(self, config: ModelConfig = ModelConfig(), params: MovdaParams | None = None):
        super().__init__(config)
        if params is None:
            raise ConfigurationError("MOVDA needs fitted expected-margin parameters")
        self.params = params
        self._cfg = EloConfig(config.k, config.c, config.lam)

    def update(self, home, away, game):
        return movda_update(
            home,
            away,
            game.home_outcome,
            game.t_mov_home,
            game.i_ha,
            self._cfg,
            self.params,
            game.game_id,
        )


class LinearMovModel(EloModel):
    kind = "linear-mov"

    def __init__(self, config: ModelConfig = ModelConfig()):
        super().__init__(config)
        self._lcfg = bl.LinearMovConfig(config.k, config.c, config.c_mov, config.k_max)

    def update(self, home, away, game):
        return bl.linear_mov_update(
            home, away, game.home_outcome, game.t_mov_home, self._lcfg, game.game_id
        )


class Glicko2Model(RatingModel):
    kind = "glicko2"

    def initial_state(self):
        return bl.Glicko2State(
            self.config.initial_rating, self.config.glicko_rd, self.config.glicko_volatility
        )

    def rating(self, state):
        return state.rating

    def win_probability(self, home, away):
        return bl.glicko2_win_probability(home, away)

    def update(self, home, away, game):
        s = game.home_outcome
        check_margin_consistency(s, game.t_mov_home, game.game_id)
        return bl.glicko2_game(home, away, s, self.config.glicko_tau)


class TrueSkillModel(RatingModel):
    kind = "trueskill"

    def initial_state(self):
        return bl.TrueSkillState(self.config.ts_mu, self.config.ts_sigma)

    def rating(self, state):
        cfg = self.config
        return cfg.initial_rating + (state.mu - cfg.ts_mu) * cfg.ts_elo_scale / cfg.ts_sigma

    def win_probability(self, home, away):
        return bl.trueskill_win_probability(home, away, self.config.ts_beta)

    def update(self, home, away, game):
        m = game.t_mov_home
        if m == 0:
            raise DataIntegrityError("TrueSkill is run without draws", game_id=game.game_id)
        return bl.trueskill_two_team_update(
            home, away, "A" if m > 0 else "B", self.config.ts_beta, self.config.ts_tau
        )


_MODELS = {
    "elo": EloModel,
    "linear-mov": LinearMovModel,
    "glicko2": Glicko2Model,
    "trueskill": TrueSkillModel,
}


def make_model(kind: str, config: ModelConfig = ModelConfig(), params: MovdaParams | None = None):
    if kind == "movda":
        return MovdaModel(config, params)
    try:
        return _MODELS[kind](config)
    except KeyError:
        raise InvalidArgumentError(
            f"unknown model {kind!r}; choose from {', '.join(MODEL_KINDS)}"
        ) from None


class RatingBook:
    """Current state per team for one model."""

    def __init__(self, model: RatingModel, states: dict | None = None):
        self.model = model
        self.states = dict(states) if states else {}

    def get(self, team: str):
        state = self.states.get(team)
        if state is None:
            state = self.model.initial_state()
            self.states[team] = state
            logger.debug("initialised %s at default %s rating", team, self.model.kind)
        return state

    def reset(self, team: str) -> None:
        self.states[team] = self.model.initial_state()

    def copy(self) -> "RatingBook":
        return RatingBook(self.model, self.states)

    def ratings(self) -> dict[str, float]:
        return {t: self.model.rating(s) for t, s in self.states.items()}

    def total(self) -> float:
        return math.fsum(self.ratings().values())
