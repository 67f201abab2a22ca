import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from movda.errors import DataIntegrityError, InvalidArgumentError
from movda.ratings_core import (
    EloConfig,
    MovdaParams,
    elo_update,
    expected_mov,
    expected_outcome,
    mov_differential,
    movda_update,
)

ratings = st.floats(min_value=0, max_value=3000, allow_nan=False)
gaps = st.floats(min_value=-2000, max_value=2000, allow_nan=False)
params = st.builds(
    MovdaParams,
    alpha=st.floats(0.1, 40),
    beta=st.floats(1e-4, 0.05),
    gamma=st.floats(-5, 5),
    delta=st.floats(-5, 5),
)


def mp_expected(delta_r, c=400):
    return 1 / (1 + mpmath.power(10, -mpmath.mpf(delta_r) / c))


class TestExpectedOutcome:
    def test_even(self):
        assert expected_outcome(0, 400) == 0.5

    def test_400_points(self):
        assert expected_outcome(400, 400) == pytest.approx(10 / 11, abs=1e-15)
        assert expected_outcome(-400, 400) == pytest.approx(1 / 11, abs=1e-15)

    @given(gaps, st.floats(50, 1000))
    def test_matches_high_precision(self, d, c):
        with mpmath.workdps(40):
            assert expected_outcome(d, c) == pytest.approx(float(mp_expected(d, c)), rel=1e-13, abs=1e-300)

    @given(gaps)
    def test_complement(self, d):
        assert expected_outcome(d) + expected_outcome(-d) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("c", [0.0, -1.0, math.inf, math.nan])
    def test_bad_scale(self, c):
        with pytest.raises(InvalidArgumentError):
            expected_outcome(0.0, c)


class TestEloUpdate:
    def test_even_win(self):
        assert elo_update(1500, 1500, 1, EloConfig(k=20)) == (1510, 1490)

    def test_favourite_loses(self):
        # a 200-point gap: E = 1 / (1 + 10**-0.5), not 10/11 (that is the 400-point value)
        a, b = elo_update(1600, 1400, 0, EloConfig(k=20))
        with mpmath.workdps(40):
            change = 20 * (0 - mp_expected(200))
            assert a == pytest.approx(float(1600 + change), abs=1e-11)
            assert b == pytest.approx(float(1400 - change), abs=1e-11)
        assert a == pytest.approx(1584.80506, abs=1e-5)

    def test_400_point_favourite_loses(self):
        a, b = elo_update(1700, 1300, 0, EloConfig(k=20))
        exact = Fraction(20) * (0 - Fraction(10, 11))
        assert a == pytest.approx(float(1700 + exact), abs=1e-11)
        assert b == pytest.approx(float(1300 - exact), abs=1e-11)

    def test_no_surprise_no_change(self):
        assert elo_update(1500, 1500, 0.5, EloConfig()) == (1500, 1500)

    @given(ratings, ratings, st.sampled_from([0, 0.5, 1]))
    def test_zero_sum(self, a, b, s):
        na, nb = elo_update(a, b, s, EloConfig())
        assert na + nb == pytest.approx(a + b, abs=1e-9)

    def test_rejects_bad_score(self):
        with pytest.raises(InvalidArgumentError):
            elo_update(1500, 1500, 0.3, EloConfig())

    @pytest.mark.parametrize("kw", [{"k": 0}, {"k": -5}, {"c": 0}, {"lam": -0.1}, {"k": math.nan}])
    def test_config_validation(self, kw):
        with pytest.raises(InvalidArgumentError):
            EloConfig(**kw)


class TestExpectedMov:
    def test_zero_gap_neutral(self):
        assert expected_mov(0, 0, MovdaParams(10, 0.005, 1.25, 3)) == 1.25

    def test_worked_value(self):
        with mpmath.workdps(30):
            oracle = float(10 * mpmath.tanh(1) + 3)
        assert expected_mov(200, 1, MovdaParams(10, 0.005, 0, 3)) == pytest.approx(oracle, abs=1e-13)
        assert oracle == pytest.approx(10.615941, abs=1e-6)

    @given(gaps, st.sampled_from([-1, 0, 1]), params)
    def test_antisymmetry(self, d, h, p):
        assert expected_mov(-d, -h, p) == pytest.approx(2 * p.gamma - expected_mov(d, h, p), abs=1e-9)

    @given(gaps, params)
    def test_bounded(self, d, p):
        e = expected_mov(d, 0, p)
        assert abs(e - p.gamma) <= p.alpha + 1e-12

    @pytest.mark.parametrize("kw", [{"alpha": 0}, {"beta": -1}, {"sigma2": -1}, {"gamma": math.inf}])
    def test_params_validation(self, kw):
        base = dict(alpha=10, beta=0.005)
        with pytest.raises(InvalidArgumentError):
            MovdaParams(**{**base, **kw})


def test_mov_differential():
    assert mov_differential(12, 12) == 0
    assert mov_differential(12, 5) == 7
    assert mov_differential(-4, 5) == -9


class TestMovdaUpdate:
    P = MovdaParams(10, 0.005, 0, 3)

    def test_worked_example(self):
        a, b = movda_update(1500, 1500, 1, 20, 1, EloConfig(k=20, lam=0.1), self.P)
        assert a == pytest.approx(1511.7, abs=1e-12)
        assert b == pytest.approx(1488.3, abs=1e-12)

    @given(ratings, ratings, st.floats(-60, 60).filter(lambda m: m != 0), st.sampled_from([-1, 0, 1]), params,
           st.floats(1, 60))
    def test_lambda_zero_is_elo_bitwise(self, a, b, m, h, p, k):
        s = 1.0 if m > 0 else 0.0
        cfg = EloConfig(k=k, lam=0.0)
        assert movda_update(a, b, s, m, h, cfg, p) == elo_update(a, b, s, cfg)

    @given(ratings, ratings, st.floats(-60, 60).filter(lambda m: m != 0), st.sampled_from([-1, 0, 1]), params,
           st.floats(0, 3))
    def test_zero_sum(self, a, b, m, h, p, lam):
        na, nb = movda_update(a, b, 1.0 if m > 0 else 0.0, m, h, EloConfig(lam=lam), p)
        assert na + nb == pytest.approx(a + b, abs=1e-9)

    def test_loser_beating_expectation_gains(self):
        # a heavy underdog losing by less than expected moves up when lambda is large
        a, _ = movda_update(1200, 1800, 0, -1, 0, EloConfig(k=1, lam=3.0), self.P)
        assert a > 1200

    def test_inconsistent_margin(self):
        with pytest.raises(DataIntegrityError):
            movda_update(1500, 1500, 1, -3, 1, EloConfig(), self.P, game_id="g1")

    def test_bad_home_indicator(self):
        with pytest.raises(InvalidArgumentError):
            movda_update(1500, 1500, 1, 3, 2, EloConfig(), self.P)
