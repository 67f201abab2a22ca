"""Comparison rating systems: linear-MOV ELO, Glicko-2 and two-team TrueSkill.

Glicko-2 follows Glickman's published step-by-step procedure, with every
game treated as its own rating period. TrueSkill is the closed-form
two-player special case with draw probability fixed at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.special import erfcx

from .errors import InvalidArgumentError, NumericalError
from .ratings_core import (
    DEFAULT_C,
    DEFAULT_K,
    check_margin_consistency,
    check_score,
    expected_outcome,
)

# Glicko-2 internal scale factor (400 / ln 10).
GLICKO2_SCALE = 173.7178
GLICKO_Q = math.log(10) / 400.0

DEFAULT_GLICKO_RATING = 1500.0
DEFAULT_GLICKO_RD = 350.0
DEFAULT_GLICKO_VOLATILITY = 0.06
DEFAULT_GLICKO_TAU = 0.5

VOLATILITY_TOL = 1e-6
VOLATILITY_MAX_ITER = 100

TS_MU = 25.0
TS_SIGMA = 8.333
TS_BETA = 2.0
TS_TAU = 0.2

_SQRT_2 = math.sqrt(2.0)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


# -- linear margin-scaled ELO ------------------------------------------------


@dataclass(frozen=True)
class LinearMovConfig:
    k: float = DEFAULT_K
    c: float = DEFAULT_C
    c_mov: float = 0.1
    k_max: float = 2.0

    def __post_init__(self):
        if not (self.k > 0 and self.c > 0 and self.c_mov > 0):
            raise InvalidArgumentError("k, c and c_mov must all be > 0")
        if not self.k_max >= 1:
            raise InvalidArgumentError(f"k_max must be >= 1, got {self.k_max}")


def linear_mov_multiplier(t_mov: float, c_mov: float, k_max: float) -> float:
    return max(1.0, min(k_max, c_mov * abs(t_mov)))


def linear_mov_update(
    r_a: float, r_b: float, s_a: float, t_mov: float, cfg: LinearMovConfig, game_id=None
) -> tuple[float, float]:
    """ELO update with ``K' = K * max(1, min(k_max, c_mov*|margin|))``."""
    if not (math.isfinite(r_a) and math.isfinite(r_b) and math.isfinite(t_mov)):
        raise InvalidArgumentError("ratings and margin must be finite")
    s_a = check_score(s_a)
    check_margin_consistency(s_a, t_mov, game_id)
    k_eff = cfg.k * linear_mov_multiplier(t_mov, cfg.c_mov, cfg.k_max)
    change = k_eff * (s_a - expected_outcome(r_a - r_b, cfg.c))
    return r_a + change, r_b - change


# -- Glicko-2 ----------------------------------------------------------------


@dataclass(frozen=True)
class Glicko2State:
    rating: float = DEFAULT_GLICKO_RATING
    deviation: float = DEFAULT_GLICKO_RD
    volatility: float = DEFAULT_GLICKO_VOLATILITY

    def __post_init__(self):
        if not math.isfinite(self.rating):
            raise InvalidArgumentError("rating must be finite")
        if not (self.deviation > 0 and self.volatility > 0):
            raise InvalidArgumentError("deviation and volatility must be > 0")


def _g(phi: float) -> float:
    return 1.0 / math.sqrt(1.0 + 3.0 * phi * phi / (math.pi * math.pi))


def _solve_volatility(phi: float, sigma: float, delta: float, v: float, tau: float) -> float:
    """Illinois iteration for the new volatility (Glickman, step 5)."""
    a = math.log(sigma * sigma)
    phi2 = phi * phi
    delta2 = delta * delta
    tau2 = tau * tau

    def f(x):
        ex = math.exp(x)
        denom = phi2 + v + ex
        return ex * (delta2 - phi2 - v - ex) / (2.0 * denom * denom) - (x - a) / tau2

    big_a = a
    if delta2 > phi2 + v:
        big_b = math.log(delta2 - phi2 - v)
    else:
        k = 1
        while f(a - k * tau) < 0:
            k += 1
            if k > VOLATILITY_MAX_ITER:
                raise NumericalError("could not bracket the volatility root")
        big_b = a - k * tau

    f_a = f(big_a)
    f_b = f(big_b)
    for _ in range(VOLATILITY_MAX_ITER):
        if abs(big_b - big_a) <= VOLATILITY_TOL:
            return math.exp(big_a / 2.0)
        big_c = big_a + (big_a - big_b) * f_a / (f_b - f_a)
        f_c = f(big_c)
        if f_c * f_b <= 0:
            big_a, f_a = big_b, f_b
        else:
            f_a /= 2.0
        big_b, f_b = big_c, f_c
    if abs(big_b - big_a) <= VOLATILITY_TOL:
        return math.exp(big_a / 2.0)
    raise NumericalError(
        f"volatility iteration did not converge within {VOLATILITY_MAX_ITER} iterations"
    )


def glicko2_update(
    player: Glicko2State,
    opponents: Sequence[tuple[Glicko2State, float]],
    tau: float = DEFAULT_GLICKO_TAU,
) -> Glicko2State:
    """Rate ``player`` against the games of one rating period."""
    if not opponents:
        raise InvalidArgumentError("at least one opponent is required")
    if not tau > 0:
        raise InvalidArgumentError(f"tau must be > 0, got {tau}")

    mu = (player.rating - DEFAULT_GLICKO_RATING) / GLICKO2_SCALE
    phi = player.deviation / GLICKO2_SCALE
    sigma = player.volatility

    v_inv = 0.0
    improvement = 0.0
    for opp, score in opponents:
        score = check_score(score)
        mu_j = (opp.rating - DEFAULT_GLICKO_RATING) / GLICKO2_SCALE
        g_j = _g(opp.deviation / GLICKO2_SCALE)
        e_j = 1.0 / (1.0 + math.exp(-g_j * (mu - mu_j)))
        v_inv += g_j * g_j * e_j * (1.0 - e_j)
        improvement += g_j * (score - e_j)
    v = 1.0 / v_inv
    delta = v * improvement

    new_sigma = _solve_volatility(phi, sigma, delta, v, tau)
    phi_star = math.sqrt(phi * phi + new_sigma * new_sigma)
    new_phi = 1.0 / math.sqrt(1.0 / (phi_star * phi_star) + 1.0 / v)
    new_mu = mu + new_phi * new_phi * improvement

    return Glicko2State(
        rating=GLICKO2_SCALE * new_mu + DEFAULT_GLICKO_RATING,
        deviation=GLICKO2_SCALE * new_phi,
        volatility=new_sigma,
    )


def glicko2_win_probability(a: Glicko2State, b: Glicko2State) -> float:
    """Win probability of ``a`` with the combined-deviation attenuation."""
    rd = math.sqrt(a.deviation ** 2 + b.deviation ** 2)
    g = 1.0 / math.sqrt(1.0 + 3.0 * GLICKO_Q ** 2 * rd ** 2 / math.pi ** 2)
    return 1.0 / (1.0 + 10.0 ** (-g * (a.rating - b.rating) / 400.0))


# -- TrueSkill ---------------------------------------------------------------


@dataclass(frozen=True)
class TrueSkillState:
    mu: float = TS_MU
    sigma: float = TS_SIGMA

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise InvalidArgumentError("mu must be finite")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise InvalidArgumentError("sigma must be finite and > 0")


def _v_w(t: float) -> tuple[float, float]:
    # pdf(t)/cdf(t) written with the scaled complementary error function so
    # the far lower tail does not underflow to 0/0.
    v = _SQRT_2_OVER_PI / float(erfcx(-t / _SQRT_2))
    w = v * (v + t)
    return v, min(max(w, 0.0), 1.0)


def trueskill_two_team_update(
    a: TrueSkillState,
    b: TrueSkillState,
    winner: str,
    beta_ts: float = TS_BETA,
    tau_ts: float = TS_TAU,
) -> tuple[TrueSkillState, TrueSkillState]:
    """Two-player TrueSkill update with no draws; ``winner`` is ``"A"`` or ``"B"``."""
    if winner not in ("A", "B"):
        raise InvalidArgumentError(f"winner must be 'A' or 'B', got {winner!r}")
    var_a = a.sigma * a.sigma + tau_ts * tau_ts
    var_b = b.sigma * b.sigma + tau_ts * tau_ts
    c2 = 2.0 * beta_ts * beta_ts + var_a + var_b
    c = math.sqrt(c2)

    if winner == "A":
        mu_w, var_w, mu_l, var_l = a.mu, var_a, b.mu, var_b
    else:
        mu_w, var_w, mu_l, var_l = b.mu, var_b, a.mu, var_a

    v, w = _v_w((mu_w - mu_l) / c)
    new_mu_w = mu_w + var_w / c * v
    new_mu_l = mu_l - var_l / c * v
    new_sigma_w = math.sqrt(var_w * (1.0 - var_w / c2 * w))
    new_sigma_l = math.sqrt(var_l * (1.0 - var_l / c2 * w))

    new_w = TrueSkillState(new_mu_w, new_sigma_w)
    new_l = TrueSkillState(new_mu_l, new_sigma_l)
    return (new_w, new_l) if winner == "A" else (new_l, new_w)


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT_2)


def trueskill_win_probability(
    a: TrueSkillState, b: TrueSkillState, beta_ts: float = TS_BETA
) -> float:
    denom = math.sqrt(2.0 * beta_ts * beta_ts + a.sigma ** 2 + b.sigma ** 2)
    return normal_cdf((a.mu - b.mu) / denom)


def glicko2_game(
    a: Glicko2State, b: Glicko2State, s_a: float, tau: float = DEFAULT_GLICKO_TAU
) -> tuple[Glicko2State, Glicko2State]:
    """Simultaneous single-game rating period for both sides."""
    return glicko2_update(a, [(b, s_a)], tau), glicko2_update(b, [(a, 1.0 - s_a)], tau)
