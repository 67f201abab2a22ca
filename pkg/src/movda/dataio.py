"""Games CSV ingestion, file outputs and run-config parsing."""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import ConfigurationError, DataIntegrityError, SchemaError
from .fitting import FitReport, params_from_dict
from .games import GameRecord, SplitSpec, sort_key
from .models import MODEL_KINDS, ModelConfig
from .ratings_core import MovdaParams
from .replay import LOG_FIELDS, PredictionLogEntry, ReplayResult

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("game_id", "date", "season", "home_team", "away_team", "home_score", "away_score")
OPTIONAL_COLUMNS = ("neutral_site",)


# -- atomic writes -------------------------------------------------------------


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return int(v)
    return v


# -- games ---------------------------------------------------------------------


def _parse_score(text: str, row: int, column: str, integer: bool) -> float:
    s = text.strip()
    try:
        value = int(s) if integer else float(s)
    except ValueError:
        kind = "a non-negative integer" if integer else "a number"
        raise SchemaError(f"expected {kind}, got {text!r}", row=row, column=column) from None
    if not math.isfinite(value) or value < 0:
        raise SchemaError(f"score must be non-negative, got {text!r}", row=row, column=column)
    return value


def _parse_date(text: str, row: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise SchemaError(f"expected yyyy-mm-dd date, got {text!r}", row=row, column="date") from None


def _parse_neutral(text: str | None, row: int) -> bool:
    if text is None or text.strip() == "":
        return False
    s = text.strip()
    if s not in ("0", "1"):
        raise SchemaError(f"expected 0 or 1, got {text!r}", row=row, column="neutral_site")
    return s == "1"


def parse_games(
    text: str, allow_ties: bool = False, integer_scores: bool = True, source: str = "<string>"
) -> list[GameRecord]:
    """Parse and validate games CSV text.

    Row numbers in errors count the header as row 1, so they match what a
    spreadsheet shows. Out-of-order input is sorted by (date, file order).
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SchemaError(f"{source}: file is empty; a header row is required", row=1) from None
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"{source}: missing required column(s) {missing}", row=1, column=missing[0])
    dupes = {h for h in header if header.count(h) > 1}
    if dupes:
        raise SchemaError(f"{source}: duplicate column(s) {sorted(dupes)}", row=1)
    col = {name: header.index(name) for name in header}

    games: list[GameRecord] = []
    seen: dict[str, int] = {}
    for i, values in enumerate(reader):
        row = i + 2
        if not values or all(not v.strip() for v in values):
            continue
        if len(values) != len(header):
            raise SchemaError(f"expected {len(header)} fields, got {len(values)}", row=row)

        def get(name):
            return values[col[name]] if name in col else None

        for name in REQUIRED_COLUMNS:
            if not get(name).strip():
                raise SchemaError("value is empty", row=row, column=name)
        game_id = get("game_id").strip()
        if game_id in seen:
            raise DataIntegrityError(
                f"duplicate game_id (first seen on row {seen[game_id]})", game_id=game_id, row=row
            )
        seen[game_id] = row
        home_score = _parse_score(get("home_score"), row, "home_score", integer_scores)
        away_score = _parse_score(get("away_score"), row, "away_score", integer_scores)
        if home_score == away_score and not allow_ties:
            raise DataIntegrityError(
                f"tied score {get('home_score').strip()}-{get('away_score').strip()} is not allowed",
                game_id=game_id,
                row=row,
            )
        home, away = get("home_team").strip(), get("away_team").strip()
        if home == away:
            raise DataIntegrityError("home and away team are the same", game_id=game_id, row=row)
        games.append(
            GameRecord(
                game_id=game_id,
                date=_parse_date(get("date"), row),
                season=get("season").strip(),
                home_team=home,
                away_team=away,
                home_score=home_score,
                away_score=away_score,
                neutral_site=_parse_neutral(get("neutral_site"), row),
                seq=i,
            )
        )
    ordered = sorted(games, key=sort_key)
    if ordered != games:
        logger.info("%s: input was not in date order; sorted %d games", source, len(games))
    logger.info("%s: loaded %d games", source, len(ordered))
    return ordered


def load_games(path: str | os.PathLike, allow_ties: bool = False, integer_scores: bool = True) -> list[GameRecord]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except FileNotFoundError:
        raise ConfigurationError(f"games file not found: {path}") from None
    return parse_games(text, allow_ties, integer_scores, source=str(path))


def _score_text(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def games_csv(games: Sequence[GameRecord]) -> str:
    header = REQUIRED_COLUMNS + OPTIONAL_COLUMNS
    rows = (
        (
            g.game_id,
            g.date.isoformat(),
            g.season,
            g.home_team,
            g.away_team,
            _score_text(g.home_score),
            _score_text(g.away_score),
            int(g.neutral_site),
        )
        for g in games
    )
    return _csv_text(header, rows)


def write_games(path, games: Sequence[GameRecord]) -> None:
    atomic_write_text(path, games_csv(games))


# -- params --------------------------------------------------------------------


def write_params(path, fit: FitReport | MovdaParams) -> None:
    d = fit.to_dict()
    atomic_write_text(path, json.dumps(d, indent=2) + "\n")


def load_params(path) -> MovdaParams:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"params file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"params file {path} is not valid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise ConfigurationError(f"params file {path} must hold a JSON object")
    return params_from_dict(d)


# -- logs ----------------------------------------------------------------------


def log_csv(log: Sequence[PredictionLogEntry]) -> str:
    return _csv_text(LOG_FIELDS, log)


def history_csv(result: ReplayResult) -> str:
    rows = []
    for team in sorted(result.history):
        rows.extend((team, h.game_index, h.game_id, h.rating) for h in result.history[team])
    return _csv_text(("team", "game_index", "game_id", "rating"), rows)


def write_json(path, obj: Any) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")


# -- run config ----------------------------------------------------------------


@dataclass
class RunConfig:
    model: str = "movda"
    config: ModelConfig = ModelConfig()
    split: SplitSpec = SplitSpec()
    data: str | None = None
    params: str | None = None
    out: str | None = None
    seed: int = 0
    extra: dict[str, Any] = field(default_factory=dict)

    def check_paths(self) -> None:
        for name in ("data", "params"):
            p = getattr(self, name)
            if p is not None and not Path(p).exists():
                raise ConfigurationError(f"{name} file not found: {p}")


_CONFIG_ALIASES = {"lambda": "lam", "K": "k"}


def _coerce(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_run_config(text: str) -> RunConfig:
    """Read a run config from JSON or from ``key = value`` lines (``#`` starts a comment)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"run config is not valid JSON: {exc}") from None
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"run config line {lineno}: expected key=value, got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            raw[key] = _coerce(value)
    return run_config_from_mapping(raw)


def run_config_from_mapping(raw: Mapping[str, Any]) -> RunConfig:
    rc = RunConfig()
    model_fields = set(ModelConfig().to_dict())
    overrides = {}
    for key, value in raw.items():
        key = _CONFIG_ALIASES.get(key, key).replace("-", "_")
        if key == "model":
            if value not in MODEL_KINDS:
                raise ConfigurationError(f"unknown model {value!r}; choose from {MODEL_KINDS}")
            rc.model = value
        elif key == "split":
            rc.split = SplitSpec.parse(value) if isinstance(value, str) else SplitSpec(*value)
        elif key in ("data", "params", "out"):
            setattr(rc, key, str(value))
        elif key == "seed":
            rc.seed = int(value)
        elif key in model_fields:
            try:
                overrides[key] = float(value)
            except (TypeError, ValueError):
                raise ConfigurationError(f"config value for {key!r} must be numeric, got {value!r}") from None
        else:
            rc.extra[key] = value
    rc.config = ModelConfig().replace(**overrides)
    return rc


def load_run_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigurationError(f"run config not found: {path}") from None
    return parse_run_config(text)


def load_model_config(path) -> ModelConfig:
    """Model config from a tune result JSON (``config`` key) or a flat mapping."""
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from None
    if isinstance(d, dict) and isinstance(d.get("config"), dict):
        d = d["config"]
    if not isinstance(d, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object")
    return ModelConfig.from_dict(d)
