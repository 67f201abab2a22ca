"""MOVDA: margin-of-victory differential ratings with ELO-family baselines."""

from .errors import (
    ConfigurationError,
    DataIntegrityError,
    InsufficientDataError,
    InvalidArgumentError,
    MovdaError,
    NumericalError,
    OrderingError,
    SchemaError,
    UndefinedMetricError,
    UnidentifiableParameterError,
)
from .fitting import FitReport, FitSample, fit_emov
from .games import GameRecord, SplitSpec, split_dataset
from .metrics import EvalReport, accuracy, brier, convergence_speed, margin_mae
from .models import MODEL_KINDS, ModelConfig, RatingBook, make_model
from .pipeline import ablate, evaluate_model, fit_from_games
from .ratings_core import EloConfig, MovdaParams, elo_update, expected_mov, expected_outcome, movda_update
from .replay import PredictionLogEntry, ReplayResult, replay_model
from .simulate import SkillSpec, StepChange, simulate_league
from .tuning import TuneResult, grid_search

__version__ = "0.1.0"
