"""Command-line interface: ``movda <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import dataio
from .errors import ConfigurationError, MovdaError
from .fitting import FitReport
from .games import SplitSpec, split_dataset
from .metrics import DEFAULT_BAND, DEFAULT_STABLE_WINDOW, REPORT_KEYS
from .models import MODEL_KINDS, ModelConfig
from .pipeline import (
    CONVERGENCE_SPANS,
    RATING_SOURCES,
    REPORT_SPLITS,
    ablate,
    evaluate_model,
    fit_samples,
    fit_from_games,
)
from .plotdata import CONTEXTS, export_fit_plot_data, export_margin_histogram
from .ratings_core import MovdaParams
from .simulate import SkillSpec, StepChange, simulate_league
from .tuning import DEFAULT_GRIDS, grid_search

logger = logging.getLogger("movda")

MODEL_LABELS = {
    "elo": "Standard ELO",
    "movda": "MOVDA",
    "linear-mov": "Linear-MOV ELO",
    "glicko2": "Glicko-2",
    "trueskill": "TrueSkill",
}

# flag name -> ModelConfig field
CONFIG_FLAGS = {
    "k": "k",
    "c": "c",
    "lam": "lam",
    "c_mov": "c_mov",
    "k_max": "k_max",
    "glicko_tau": "glicko_tau",
    "ts_beta": "ts_beta",
    "ts_tau": "ts_tau",
}


# -- formatting ----------------------------------------------------------------


def fmt6(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, bool) or isinstance(v, int):
        return str(v)
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    return f"{v:.6g}"


def markdown_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    for row in rows:
        lines.append("| " + " | ".join(c if isinstance(c, str) else fmt6(c) for c in row) + " |")
    return "\n".join(lines) + "\n"


REPORT_HEADER = ("Model", "Acc (%)", "Brier", "Margin MAE", "Conv (games)", "Games")


def report_rows(reports: dict) -> list[list]:
    return [[label] + [r[k] for k in REPORT_KEYS] for label, r in reports.items()]


# -- argument plumbing -----------------------------------------------------------


def _add_data(p, params=False, params_required=False):
    p.add_argument("--data", required=True, help="games CSV")
    p.add_argument("--allow-ties", action="store_true", help="accept tied scores (non-NBA data)")
    p.add_argument("--split", default=None, help="train,tune,holdout fractions (default 0.7,0.2,0.1)")
    if params:
        p.add_argument("--params", required=params_required, help="fitted expected-margin params JSON")


def _add_model_flags(p, model=True):
    if model:
        p.add_argument("--model", choices=MODEL_KINDS, default=None)
    p.add_argument("--config", help="model config JSON (a tune result or a flat mapping)")
    p.add_argument("--run-config", help="run config file (key=value lines or JSON)")
    p.add_argument("--k", type=float, help="K factor")
    p.add_argument("--c", type=float, help="logistic scale (default 400)")
    p.add_argument("--lambda", dest="lam", type=float, help="weight of the margin-differential term")
    p.add_argument("--c-mov", type=float, help="linear-MOV multiplier slope")
    p.add_argument("--k-max", type=float, help="linear-MOV multiplier cap")
    p.add_argument("--glicko-tau", type=float, help="Glicko-2 volatility constraint")
    p.add_argument("--ts-beta", type=float, help="TrueSkill performance noise")
    p.add_argument("--ts-tau", type=float, help="TrueSkill dynamics noise")


def _add_eval_flags(p):
    p.add_argument("--band", type=float, default=DEFAULT_BAND)
    p.add_argument("--stable-window", type=int, default=DEFAULT_STABLE_WINDOW)
    p.add_argument("--report-on", choices=REPORT_SPLITS, default="holdout")
    p.add_argument("--convergence-on", choices=CONVERGENCE_SPANS, default="test")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--seed", type=int, default=None, help="seed for every stochastic path")
    parser = argparse.ArgumentParser(prog="movda", description="Margin-of-victory rating engine.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("fit", parents=[common], help="fit the expected-margin curve on the training split")
    _add_data(p)
    p.add_argument("--k", type=float, help="K of the ELO run that supplies rating gaps")
    p.add_argument("--c", type=float)
    p.add_argument("--rating-source", choices=RATING_SOURCES, default="train")
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--out", required=True, help="params JSON to write")

    p = sub.add_parser("tune", parents=[common], help="grid-search one model's hyperparameters by Brier score")
    _add_data(p, params=True)
    _add_model_flags(p)
    p.add_argument("--grid", help='JSON object of parameter -> ascending values, e.g. {"k": [10, 20]}')
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--table", help="also write the full grid table as CSV")
    p.add_argument("--out", required=True, help="tune result JSON to write")

    p = sub.add_parser("replay", parents=[common], help="replay one model and write its prediction log and report")
    _add_data(p, params=True)
    _add_model_flags(p)
    _add_eval_flags(p)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("evaluate", parents=[common], help="compare all five models on the report split")
    _add_data(p, params=True, params_required=True)
    _add_eval_flags(p)
    p.add_argument("--configs", help="JSON object of model -> config (or tune result) path")
    p.add_argument("--tune", action="store_true", help="grid-search every model before evaluating")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("ablate", parents=[common], help="MOVDA with and without the margin-differential term")
    _add_data(p, params=True, params_required=True)
    _add_model_flags(p, model=False)
    _add_eval_flags(p)
    p.add_argument("--tune", action="store_true", help="pick lambda by grid search first")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("simulate", parents=[common], help="generate a synthetic league as a games CSV")
    p.add_argument("--teams", type=int, default=10)
    p.add_argument("--games", type=int, default=10000)
    p.add_argument("--alpha", type=float, default=12.0)
    p.add_argument("--beta", type=float, default=0.004)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=2.5)
    p.add_argument("--sigma", type=float, default=11.0, help="margin noise standard deviation")
    p.add_argument("--spread", type=float, default=100.0, help="std of initial latent skills")
    p.add_argument("--drift", type=float, default=0.0, help="per-round random-walk std of skills")
    p.add_argument("--step-team", type=int, help="0-based team index for a skill step change")
    p.add_argument("--step-at", type=int, help="game index at which the step happens")
    p.add_argument("--step-delta", type=float, default=150.0)
    p.add_argument("--start", default="2020-01-01", help="date of the first round")
    p.add_argument("--out", required=True, help="games CSV to write")

    p = sub.add_parser("plot-data", parents=[common], help="export the numbers behind the curve and histogram figures")
    _add_data(p, params=True, params_required=True)
    p.add_argument("--k", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--rating-source", choices=RATING_SOURCES, default="train")
    p.add_argument("--bin-width", type=float, default=25.0)
    p.add_argument("--hist-bin-width", type=float, default=2.0)
    p.add_argument("--out", required=True, help="output directory")
    return parser


def _run_config(args):
    if getattr(args, "run_config", None):
        return dataio.load_run_config(args.run_config)
    return None


def resolve_split(args, rc=None) -> SplitSpec:
    if args.split is not None:
        return SplitSpec.parse(args.split)
    return rc.split if rc is not None else SplitSpec()


def resolve_config(args, rc=None) -> ModelConfig:
    """Base config, then run-config values, then the --config file, then explicit flags."""
    cfg = rc.config if rc is not None else ModelConfig()
    if getattr(args, "config", None):
        cfg = cfg.replace(**dataio.load_model_config(args.config).to_dict())
    flags = {field: getattr(args, flag) for flag, field in CONFIG_FLAGS.items() if getattr(args, flag, None) is not None}
    return cfg.replace(**flags)


def resolve_model(args, rc=None) -> str:
    if getattr(args, "model", None):
        return args.model
    return rc.model if rc is not None else "movda"


def _load_games(args):
    return dataio.load_games(args.data, allow_ties=args.allow_ties)


def _params(args, required: bool) -> MovdaParams | None:
    if getattr(args, "params", None):
        return dataio.load_params(args.params)
    if required:
        raise ConfigurationError("this command needs --params (run `movda fit` first)")
    return None


def _eval_kwargs(args, split):
    return dict(
        split=split,
        report_on=args.report_on,
        convergence_on=args.convergence_on,
        band=args.band,
        stable_window=args.stable_window,
    )


def _out_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


# -- subcommands -----------------------------------------------------------------


def cmd_fit(args) -> int:
    games = _load_games(args)
    split = resolve_split(args)
    cfg = ModelConfig().replace(**{k: v for k, v in (("k", args.k), ("c", args.c)) if v is not None})
    report: FitReport = fit_from_games(games, split, cfg, args.rating_source, max_iter=args.max_iter)
    dataio.write_params(args.out, report)
    p = report.params
    print(
        markdown_table(
            ("alpha", "beta", "gamma", "delta", "sigma2", "n", "converged"),
            [(p.alpha, p.beta, p.gamma, p.delta, p.sigma2, report.n, str(report.converged))],
        ),
        end="",
    )
    if not report.converged:
        logger.warning("fit did not converge in %d iterations", report.iterations)
    return 0


def _parse_grid(text):
    if text is None:
        return None
    try:
        grid = json.loads(Path(text).read_text() if os.path.exists(text) else text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"--grid is not valid JSON: {exc}") from None
    if not isinstance(grid, dict):
        raise ConfigurationError("--grid must be a JSON object")
    return {("lam" if k == "lambda" else k): [float(v) for v in vals] for k, vals in grid.items()}


def cmd_tune(args) -> int:
    rc = _run_config(args)
    games = _load_games(args)
    split = resolve_split(args, rc)
    kind = resolve_model(args, rc)
    params = _params(args, required=kind == "movda")
    train, tune, _ = split_dataset(games, split)
    result = grid_search(
        kind, _parse_grid(args.grid), train, tune, params, resolve_config(args, rc), workers=args.workers
    )
    dataio.write_json(args.out, result.to_dict())
    if args.table:
        dataio.atomic_write_text(args.table, result.table_csv())
    best = dict(zip(result.names, result.best_point))
    print(markdown_table(tuple(best) + ("brier",), [tuple(best.values()) + (result.best_brier,)]), end="")
    return 0


def cmd_replay(args) -> int:
    rc = _run_config(args)
    games = _load_games(args)
    split = resolve_split(args, rc)
    kind = resolve_model(args, rc)
    params = _params(args, required=kind == "movda")
    ev = evaluate_model(games, kind, resolve_config(args, rc), params, **_eval_kwargs(args, split))
    out = _out_dir(args.out)
    dataio.write_json(out / "report.json", ev.report.to_dict())
    dataio.atomic_write_text(out / "log.csv", dataio.log_csv(ev.replay.log))
    dataio.atomic_write_text(out / "history.csv", dataio.history_csv(ev.replay))
    print(markdown_table(REPORT_HEADER, report_rows({MODEL_LABELS[kind]: ev.report.to_dict()})), end="")
    return 0


def _tuned_configs(args, games, split, params) -> dict[str, ModelConfig]:
    configs = {kind: ModelConfig() for kind in MODEL_KINDS}
    if args.configs:
        try:
            mapping = json.loads(Path(args.configs).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read --configs {args.configs}: {exc}") from None
        for kind, path in mapping.items():
            if kind not in MODEL_KINDS:
                raise ConfigurationError(f"--configs names unknown model {kind!r}")
            configs[kind] = dataio.load_model_config(path)
    if args.tune:
        train, tune, _ = split_dataset(games, split)
        for kind in MODEL_KINDS:
            res = grid_search(kind, None, train, tune, params, configs[kind], workers=args.workers)
            configs[kind] = res.best_config
            logger.info("tuned %s: %s (Brier %.6g)", kind, dict(zip(res.names, res.best_point)), res.best_brier)
    return configs


def cmd_evaluate(args) -> int:
    games = _load_games(args)
    split = resolve_split(args)
    params = _params(args, required=True)
    configs = _tuned_configs(args, games, split, params)
    if configs["movda"].lam == 0:
        logger.warning("MOVDA runs with lambda = 0 and will match standard ELO; pass --tune or --configs")
    reports = {}
    for kind in MODEL_KINDS:
        ev = evaluate_model(games, kind, configs[kind], params, **_eval_kwargs(args, split))
        reports[kind] = ev.report.to_dict()
    out = _out_dir(args.out)
    payload = {
        "split": vars(split),
        "report_on": args.report_on,
        "models": {k: {"config": configs[k].to_dict(), "report": r} for k, r in reports.items()},
    }
    dataio.write_json(out / "comparison.json", payload)
    table = markdown_table(REPORT_HEADER, report_rows({MODEL_LABELS[k]: r for k, r in reports.items()}))
    dataio.atomic_write_text(out / "comparison.md", table)
    print(table, end="")
    return 0


def cmd_ablate(args) -> int:
    rc = _run_config(args)
    games = _load_games(args)
    split = resolve_split(args, rc)
    params = _params(args, required=True)
    cfg = resolve_config(args, rc)
    if args.tune:
        train, tune, _ = split_dataset(games, split)
        cfg = grid_search("movda", {"lam": DEFAULT_GRIDS["movda"]["lam"]}, train, tune, params, cfg).best_config
    res = ablate(games, cfg, params, **_eval_kwargs(args, split))
    labels = {"no-differential": "Standard ELO (no differential)", "full": "MOVDA (full)"}
    rows = [
        (labels[k], ev.config.lam, ev.report.accuracy_pct, ev.report.brier, ev.report.convergence_games)
        for k, ev in res.items()
    ]
    out = _out_dir(args.out)
    dataio.write_json(
        out / "ablation.json",
        {k: {"lambda": ev.config.lam, "config": ev.config.to_dict(), "report": ev.report.to_dict()} for k, ev in res.items()},
    )
    table = markdown_table(("Variant", "lambda", "Acc (%)", "Brier", "Conv (games)"), rows)
    dataio.atomic_write_text(out / "ablation.md", table)
    print(table, end="")
    return 0


def cmd_simulate(args) -> int:
    import datetime as dt

    try:
        start = dt.date.fromisoformat(args.start)
    except ValueError:
        raise ConfigurationError(f"--start must be yyyy-mm-dd, got {args.start!r}") from None
    true = MovdaParams(args.alpha, args.beta, args.gamma, args.delta, args.sigma**2)
    step = None
    if args.step_team is not None:
        at = args.step_at if args.step_at is not None else args.games // 2
        step = StepChange(args.step_team, at, args.step_delta)
    elif args.step_at is not None:
        raise ConfigurationError("--step-at needs --step-team")
    games = simulate_league(
        args.teams,
        args.games,
        true,
        SkillSpec(spread=args.spread, step=step, drift=args.drift),
        seed=args.seed if args.seed is not None else 0,
        integer_scores=True,
        start=start,
    )
    dataio.write_games(args.out, games)
    print(f"wrote {len(games)} games to {args.out}")
    return 0


def cmd_plot_data(args) -> int:
    games = _load_games(args)
    split = resolve_split(args)
    params = _params(args, required=True)
    cfg = ModelConfig().replace(**{k: v for k, v in (("k", args.k), ("c", args.c)) if v is not None})
    samples = fit_samples(games, split, cfg, args.rating_source)
    fit_data = export_fit_plot_data(samples, params, args.bin_width)
    train, _, _ = split_dataset(games, split)
    hists = {ctx: export_margin_histogram(train, ctx, args.hist_bin_width) for ctx in CONTEXTS}

    out = _out_dir(args.out)
    header, rows = fit_data.bins_csv_rows()
    dataio.atomic_write_text(out / "fit_bins.csv", dataio._csv_text(header, rows))
    curve_rows = [(ctx, x, y) for ctx, pts in fit_data.curve.items() for x, y in pts]
    dataio.atomic_write_text(out / "fit_curve.csv", dataio._csv_text(("context", "delta_r", "expected_mov"), curve_rows))
    for ctx, h in hists.items():
        rows = [(lo, hi, n) for lo, hi, n in zip(h.bin_edges[:-1], h.bin_edges[1:], h.counts)]
        dataio.atomic_write_text(out / f"hist_{ctx}.csv", dataio._csv_text(("lo", "hi", "count"), rows))
    dataio.write_json(
        out / "plot_data.json",
        {"fit": fit_data.to_dict(), "histograms": {c: h.to_dict() for c, h in hists.items()}},
    )
    print(f"wrote plot data to {out}")
    return 0


COMMANDS = {
    "fit": cmd_fit,
    "tune": cmd_tune,
    "replay": cmd_replay,
    "evaluate": cmd_evaluate,
    "ablate": cmd_ablate,
    "simulate": cmd_simulate,
    "plot-data": cmd_plot_data,
}


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (MovdaError, ValueError, OSError) as exc:
        print(f"movda {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
