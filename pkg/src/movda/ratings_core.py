"""ELO and MOVDA expectation/update math.

Everything here is a pure function of its arguments. Ratings are plain
floats on the usual ELO scale; the home indicator is +1 when competitor A
is at home, -1 when B is at home and 0 on a neutral site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DataIntegrityError, InvalidArgumentError

DEFAULT_RATING = 1500.0
DEFAULT_K = 20.0
DEFAULT_C = 400.0

_VALID_SCORES = (0.0, 0.5, 1.0)
_VALID_HOME = (-1, 0, 1)


@dataclass(frozen=True)
class MovdaParams:
    """Parameters of the tanh expected-margin curve.

    Attributes:
        alpha: asymptotic skill-driven margin, in points.
        beta: steepness per rating point.
        gamma: baseline margin offset, in points.
        delta: home-advantage magnitude, in points.
        sigma2: residual margin variance (diagnostic only).
    """

    alpha: float
    beta: float
    gamma: float = 0.0
    delta: float = 0.0
    sigma2: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta", "sigma2"):
            _check_finite(getattr(self, name), name)
        if self.alpha <= 0:
            raise InvalidArgumentError(f"alpha must be > 0, got {self.alpha}")
        if self.beta <= 0:
            raise InvalidArgumentError(f"beta must be > 0, got {self.beta}")
        if self.sigma2 < 0:
            raise InvalidArgumentError(f"sigma2 must be >= 0, got {self.sigma2}")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "delta": self.delta,
            "sigma2": self.sigma2,
        }


@dataclass(frozen=True)
class EloConfig:
    """K-factor, logistic scale and margin-differential weight."""

    k: float = DEFAULT_K
    c: float = DEFAULT_C
    lam: float = 0.0

    def __post_init__(self):
        for name in ("k", "c", "lam"):
            _check_finite(getattr(self, name), name)
        if self.k <= 0:
            raise InvalidArgumentError(f"k must be > 0, got {self.k}")
        if self.c <= 0:
            raise InvalidArgumentError(f"c must be > 0, got {self.c}")
        if self.lam < 0:
            raise InvalidArgumentError(f"lambda must be >= 0, got {self.lam}")


def _check_finite(x, name):
    if not math.isfinite(x):
        raise InvalidArgumentError(f"{name} must be finite, got {x!r}")


def check_score(s_a: float) -> float:
    if s_a not in _VALID_SCORES:
        raise InvalidArgumentError(f"outcome score must be one of 0, 0.5, 1; got {s_a!r}")
    return float(s_a)


def check_home(i_ha: int) -> int:
    if i_ha not in _VALID_HOME:
        raise InvalidArgumentError(f"home indicator must be -1, 0 or +1; got {i_ha!r}")
    return i_ha


def check_margin_consistency(s_a: float, t_mov: float, game_id=None) -> None:
    """Raise if the margin sign disagrees with the recorded outcome."""
    if t_mov > 0:
        ok = s_a == 1.0
    elif t_mov < 0:
        ok = s_a == 0.0
    else:
        ok = s_a == 0.5
    if not ok:
        raise DataIntegrityError(
            f"margin {t_mov!r} is inconsistent with outcome {s_a!r}", game_id=game_id
        )


def outcome_from_margin(t_mov: float) -> float:
    if t_mov > 0:
        return 1.0
    if t_mov < 0:
        return 0.0
    return 0.5


def expected_outcome(delta_r: float, c: float = DEFAULT_C) -> float:
    """Logistic win probability for the side that is ``delta_r`` points ahead."""
    _check_finite(delta_r, "delta_r")
    _check_finite(c, "c")
    if c <= 0:
        raise InvalidArgumentError(f"c must be > 0, got {c}")
    return 1.0 / (1.0 + 10.0 ** (-delta_r / c))


def elo_update(r_a: float, r_b: float, s_a: float, cfg: EloConfig) -> tuple[float, float]:
    """Standard ELO update; ``cfg.lam`` is ignored."""
    _check_finite(r_a, "r_a")
    _check_finite(r_b, "r_b")
    s_a = check_score(s_a)
    e_a = expected_outcome(r_a - r_b, cfg.c)
    change = cfg.k * (s_a - e_a)
    return r_a + change, r_b - change


def expected_mov(delta_r: float, i_ha: int, p: MovdaParams) -> float:
    """Expected margin for A: ``alpha*tanh(beta*dR) + gamma + delta*I_HA``."""
    return p.alpha * math.tanh(p.beta * delta_r) + p.gamma + p.delta * i_ha


def mov_differential(t_mov: float, e_mov: float) -> float:
    """Observed minus expected margin."""
    return t_mov - e_mov


def movda_update(
    r_a: float,
    r_b: float,
    s_a: float,
    t_mov: float,
    i_ha: int,
    cfg: EloConfig,
    p: MovdaParams,
    game_id=None,
) -> tuple[float, float]:
    """One MOVDA update.

    The arithmetic follows a fixed order (rating gap, win expectancy,
    expected margin, differential, combined change) so that ``lam == 0``
    reproduces :func:`elo_update` bit for bit. Note that the differential
    term is applied unconditionally: a loser who beats the margin
    expectation gains rating.
    """
    _check_finite(r_a, "r_a")
    _check_finite(r_b, "r_b")
    _check_finite(t_mov, "t_mov")
    s_a = check_score(s_a)
    check_home(i_ha)
    check_margin_consistency(s_a, t_mov, game_id)

    delta_r = r_a - r_b
    e_a = expected_outcome(delta_r, cfg.c)
    e_mov = expected_mov(delta_r, i_ha, p)
    d_mov = mov_differential(t_mov, e_mov)
    change = cfg.k * (s_a - e_a) + cfg.lam * d_mov
    return r_a + change, r_b - change
