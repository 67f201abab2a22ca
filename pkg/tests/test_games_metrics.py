import datetime as dt
import math

import pytest
from hypothesis import given, strategies as st

from movda.errors import (
    DataIntegrityError,
    InsufficientDataError,
    InvalidArgumentError,
    OrderingError,
    UndefinedMetricError,
)
from movda.games import GameRecord, SplitSpec, check_sorted, split_dataset
from movda.metrics import accuracy, brier, convergence_index, convergence_speed, margin_mae
from movda.ratings_core import MovdaParams
from movda.replay import PredictionLogEntry


def entry(p=0.5, margin=1.0, rh=1500.0, ra=1500.0, pred=math.nan, home=1):
    win = 1.0 if margin > 0 else (0.0 if margin < 0 else 0.5)
    return PredictionLogEntry("g", p, pred, win, margin, rh, ra, home)


def game(i, day=1, hs=100, as_=90, **kw):
    return GameRecord(f"g{i}", dt.date(2021, 1, day), "2021", "A", "B", hs, as_, seq=i, **kw)


# -- game records and split ------------------------------------------------------


def test_game_properties():
    g = game(0, hs=95, as_=101)
    assert g.t_mov_home == -6 and g.home_outcome == 0.0 and g.i_ha == 1
    assert game(1, neutral_site=True).i_ha == 0


@pytest.mark.parametrize("kw", [{"home_score": -1}, {"away_score": math.inf}, {"away_team": "A"}])
def test_game_validation(kw):
    base = dict(game_id="x", date=dt.date(2021, 1, 1), season="s", home_team="A", away_team="B",
                home_score=1, away_score=0)
    with pytest.raises(DataIntegrityError):
        GameRecord(**{**base, **kw})


def test_check_sorted():
    check_sorted([game(0, 1), game(1, 1), game(2, 2)])
    with pytest.raises(OrderingError):
        check_sorted([game(0, 2), game(1, 1)])


def test_split_sizes():
    assert SplitSpec().sizes(10) == (7, 2, 1)
    assert SplitSpec().sizes(13_619) == (9533, 2723, 1363)


@given(st.integers(10, 5000))
def test_split_partitions(n):
    games = [game(i) for i in range(n)]
    tr, tu, ho = split_dataset(games)
    assert tr + tu + ho == games
    assert len(tr) == math.floor(0.7 * n + 1e-9)


def test_split_needs_ten_games():
    with pytest.raises(InsufficientDataError):
        split_dataset([game(i) for i in range(9)])


@pytest.mark.parametrize("text", ["0.7,0.2", "0.7,0.2,0.2", "a,b,c", "1,0,0"])
def test_split_parse_errors(text):
    with pytest.raises(InvalidArgumentError):
        SplitSpec.parse(text)


def test_split_parse():
    assert SplitSpec.parse("0.6,0.3,0.1") == SplitSpec(0.6, 0.3, 0.1)


# -- metrics ---------------------------------------------------------------------


def test_accuracy_all_correct():
    log = [entry(rh=1600, ra=1500, margin=5), entry(rh=1400, ra=1500, margin=-2)]
    assert accuracy(log) == 100.0


def test_accuracy_three_of_four():
    log = [entry(rh=1600, margin=5)] * 3 + [entry(rh=1600, margin=-5)]
    assert accuracy(log) == 75.0


def test_accuracy_tied_ratings_half_credit():
    assert accuracy([entry(margin=m) for m in (3, -4, 8, -1, 2)]) == 50.0


def test_brier_constant_half_is_quarter():
    assert brier([entry(0.5, m) for m in (3, -1, 7, -2, 9)]) == 0.25


def test_brier_values():
    assert brier([entry(1.0, 3), entry(0.0, -3)]) == 0.0
    assert brier([entry(0.8, 3), entry(0.6, -3)]) == pytest.approx(0.20, abs=1e-15)


def test_margin_mae():
    p = MovdaParams(10, 0.005)
    assert margin_mae([entry(margin=0)], p) == 0.0
    log = [entry(margin=m, rh=1500, ra=1500, home=0) for m in (3, -4, 8)]
    assert margin_mae(log, p) == pytest.approx(5.0)
    # predicted +5 vs actual +12 gives 7
    p5 = MovdaParams(10, 0.005, gamma=5.0)
    assert margin_mae([entry(margin=12, home=0)], p5) == 7.0


def test_metrics_reject_empty():
    for fn in (accuracy, brier):
        with pytest.raises(UndefinedMetricError):
            fn([])


def brute_force_index(series, band, window):
    target = sum(series[-window:]) / window
    for g in range(1, len(series) + 2):
        if all(abs(x - target) <= band for x in series[g - 1:]):
            return g


def test_convergence_constant():
    assert convergence_index([1500.0] * 300, 20, 200) == 1


def test_convergence_monotone_entry():
    series = [1500.0 + 10 * i for i in range(7)] + [1580.0] * 200
    assert convergence_index(series, 20, 200) == brute_force_index(series, 20, 200) == 7
    series = [1400 + 10 * i for i in range(20)] + [1600.0] * 200
    assert convergence_index(series, 20, 200) == brute_force_index(series, 20, 200)


def test_convergence_exit_and_reentry():
    series = [1500.0] * 5 + [1540.0] * 5 + [1470.0] + [1500.0] * 300
    assert convergence_index(series, 20, 200) == 12 == brute_force_index(series, 20, 200)


@given(st.lists(st.floats(1300, 1700), min_size=5, max_size=80), st.floats(1, 100), st.integers(1, 5))
def test_convergence_matches_brute_force(series, band, window):
    assert convergence_index(series, band, window) == brute_force_index(series, band, window)


def test_convergence_speed_excludes_short(caplog):
    hist = {"A": [1500.0] * 300, "B": [1400.0] + [1500.0] * 299, "C": [1500.0] * 10}
    assert convergence_speed(hist, 20, 200) == 1.5
    assert "C (10)" in caplog.text


def test_convergence_speed_undefined():
    with pytest.raises(UndefinedMetricError):
        convergence_speed({"A": [1500.0] * 10}, 20, 200)
