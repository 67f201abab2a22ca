"""Nonlinear least-squares fit of the tanh expected-margin curve.

The solver is a plain Levenberg-Marquardt loop with an analytic Jacobian.
Internally alpha and beta are optimised on a log scale so they stay
positive without clipping.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InsufficientDataError, InvalidArgumentError, UnidentifiableParameterError
from .ratings_core import MovdaParams

logger = logging.getLogger(__name__)

N_PARAMS = 4
DAMPING_START = 1e-3
DAMPING_UP = 10.0
DAMPING_DOWN = 0.1
DAMPING_MAX = 1e16
POLISH_STEPS = 3


class FitSample(NamedTuple):
    delta_r: float
    i_ha: int
    t_mov: float


@dataclass
class FitReport:
    params: MovdaParams
    sse: float
    iterations: int
    converged: bool
    n: int
    gradient_norm: float
    sse_history: list[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = self.params.to_dict()
        d.update(sse=self.sse, n=self.n, converged=self.converged)
        return d


def emov_jacobian(sample: FitSample, p: MovdaParams) -> np.ndarray:
    """Partial derivatives of the expected margin w.r.t. (alpha, beta, gamma, delta)."""
    x = p.beta * sample.delta_r
    sech2 = 1.0 / math.cosh(x) ** 2 if abs(x) < 350 else 0.0
    return np.array(
        [math.tanh(x), p.alpha * sample.delta_r * sech2, 1.0, float(sample.i_ha)]
    )


def _as_arrays(samples) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(samples, tuple) and len(samples) == 3 and not isinstance(samples[0], FitSample):
        dr, ih, tm = (np.asarray(a, dtype=float) for a in samples)
    else:
        arr = np.asarray([tuple(s) for s in samples], dtype=float).reshape(-1, 3)
        dr, ih, tm = arr[:, 0], arr[:, 1], arr[:, 2]
    if not (dr.shape == ih.shape == tm.shape):
        raise InvalidArgumentError("delta_r, i_ha and t_mov must have the same length")
    if not (np.all(np.isfinite(dr)) and np.all(np.isfinite(tm))):
        raise InvalidArgumentError("fit samples must be finite")
    if not np.all(np.isin(ih, (-1.0, 0.0, 1.0))):
        raise InvalidArgumentError("home indicators must be -1, 0 or +1")
    return dr, ih, tm


def initial_guess(delta_r: np.ndarray, i_ha: np.ndarray, t_mov: np.ndarray) -> MovdaParams:
    """Moment-matching starting point for the solver."""
    home = t_mov[i_ha > 0]
    away = t_mov[i_ha < 0]
    if home.size and away.size:
        delta0 = (home.mean() - away.mean()) / 2.0
    else:
        var_i = i_ha.var()
        delta0 = float(np.mean((i_ha - i_ha.mean()) * t_mov) / var_i) if var_i > 0 else 0.0
    gamma0 = t_mov.mean() - delta0 * i_ha.mean()
    spread = np.abs(t_mov - gamma0 - delta0 * i_ha)
    alpha0 = 0.9 * float(np.percentile(spread, 95))
    if not alpha0 > 0:
        alpha0 = 1.0
    beta0 = 1.0 / (2.0 * float(delta_r.std()))
    return MovdaParams(alpha0, beta0, float(gamma0), float(delta0))


def _model(theta, dr, ih):
    alpha, beta = math.exp(theta[0]), math.exp(theta[1])
    return alpha * np.tanh(beta * dr) + theta[2] + theta[3] * ih


def _internal_jacobian(theta, dr, ih):
    alpha, beta = math.exp(theta[0]), math.exp(theta[1])
    th = np.tanh(beta * dr)
    jac = np.empty((dr.size, N_PARAMS))
    jac[:, 0] = alpha * th
    jac[:, 1] = alpha * beta * dr * (1.0 - th * th)
    jac[:, 2] = 1.0
    jac[:, 3] = ih
    return jac


def _scaled_gradient_norm(jac: np.ndarray, grad: np.ndarray, sse: float) -> float:
    # Largest |J_j . r| / (|J_j| * sqrt(SSE + n)): dimensionless, and its
    # floating-point floor is about sqrt(eps) whatever the noise level.
    col = np.sqrt(np.einsum("ij,ij->j", jac, jac))
    col[col == 0] = 1.0
    return float(np.max(np.abs(grad) / col)) / math.sqrt(sse + jac.shape[0])


def _sse(r: np.ndarray) -> float:
    # numpy's sum is pairwise, which keeps this order-stable
    return float(np.sum(r * r))


def fit_emov(
    samples,
    max_iter: int = 500,
    grad_tol: float = 1e-7,
    initial: MovdaParams | None = None,
) -> FitReport:
    """Fit (alpha, beta, gamma, delta) by minimising the squared margin error.

    ``samples`` is either an iterable of :class:`FitSample` or a tuple of
    three equal-length arrays ``(delta_r, i_ha, t_mov)``. Convergence is
    declared when the column-scaled gradient of the squared error (see
    :func:`_scaled_gradient_norm`) drops to ``grad_tol``. Running out of
    iterations yields ``converged=False`` rather than an exception.
    """
    dr, ih, tm = _as_arrays(samples)
    n = dr.size
    if n < N_PARAMS:
        raise InsufficientDataError(f"need at least {N_PARAMS} samples, got {n}")
    if np.ptp(dr) == 0:
        raise UnidentifiableParameterError("beta", "all rating differences are identical")
    if np.ptp(ih) == 0:
        raise UnidentifiableParameterError(
            "delta", "home indicator never varies, so it is confounded with gamma"
        )

    start = initial if initial is not None else initial_guess(dr, ih, tm)
    theta = np.array([math.log(start.alpha), math.log(start.beta), start.gamma, start.delta])

    r = tm - _model(theta, dr, ih)
    sse = _sse(r)
    history = [sse]
    damping = DAMPING_START
    converged = False
    grad_norm = math.inf
    it = 0
    jac = _internal_jacobian(theta, dr, ih)
    grad = jac.T @ r
    while it < max_iter:
        grad_norm = _scaled_gradient_norm(jac, grad, sse)
        if grad_norm <= grad_tol:
            converged = True
            break
        it += 1
        hess = jac.T @ jac
        diag = np.diag(hess).copy()
        diag[diag <= 0] = 1e-12
        try:
            step = np.linalg.solve(hess + damping * np.diag(diag), grad)
        except np.linalg.LinAlgError:
            damping *= DAMPING_UP
            continue
        trial = theta + step
        if not np.all(np.isfinite(trial)) or abs(trial[0]) > 700 or abs(trial[1]) > 700:
            damping *= DAMPING_UP
            continue
        r_new = tm - _model(trial, dr, ih)
        sse_new = _sse(r_new)
        if sse_new < sse:
            theta, r, sse = trial, r_new, sse_new
            history.append(sse)
            damping = max(damping * DAMPING_DOWN, 1e-15)
            jac = _internal_jacobian(theta, dr, ih)
            grad = jac.T @ r
        else:
            damping *= DAMPING_UP
            if damping > DAMPING_MAX:
                break
    else:
        grad_norm = _scaled_gradient_norm(jac, grad, sse)
        converged = grad_norm <= grad_tol

    if converged:
        # a few extra steps are nearly free once inside the quadratic basin
        snapshot = (theta, r, sse, jac, grad, grad_norm, len(history))
        for _ in range(POLISH_STEPS):
            hess = jac.T @ jac
            try:
                step = np.linalg.solve(hess + damping * np.diag(np.diag(hess)), grad)
            except np.linalg.LinAlgError:
                break
            trial = theta + step
            r_new = tm - _model(trial, dr, ih)
            sse_new = _sse(r_new)
            if not sse_new < sse:
                break
            theta, r, sse = trial, r_new, sse_new
            history.append(sse)
            jac = _internal_jacobian(theta, dr, ih)
            grad = jac.T @ r
        grad_norm = _scaled_gradient_norm(jac, grad, sse)
        if grad_norm > grad_tol:
            theta, r, sse, jac, grad, grad_norm, keep = snapshot
            del history[keep:]
    else:
        logger.warning(
            "E_MOV fit stopped after %d iterations without converging (gradient %.3g)",
            it,
            grad_norm,
        )
    params = MovdaParams(
        alpha=math.exp(theta[0]),
        beta=math.exp(theta[1]),
        gamma=float(theta[2]),
        delta=float(theta[3]),
        sigma2=sse / max(n - N_PARAMS, 1),
    )
    return FitReport(params, sse, it, converged, n, grad_norm, history)


# -- params file ---------------------------------------------------------------

PARAM_KEYS = ("alpha", "beta", "gamma", "delta", "sigma2", "sse", "n", "converged")


def params_to_json(report: FitReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def params_from_dict(d: dict) -> MovdaParams:
    try:
        return MovdaParams(
            alpha=float(d["alpha"]),
            beta=float(d["beta"]),
            gamma=float(d.get("gamma", 0.0)),
            delta=float(d.get("delta", 0.0)),
            sigma2=float(d.get("sigma2", 0.0)),
        )
    except KeyError as exc:
        raise InvalidArgumentError(f"params file is missing key {exc.args[0]!r}") from None


def samples_from_arrays(
    delta_r: Sequence[float], i_ha: Sequence[int], t_mov: Sequence[float]
) -> list[FitSample]:
    return [FitSample(float(a), int(b), float(c)) for a, b, c in zip(delta_r, i_ha, t_mov)]


def sse_of(samples: Iterable[FitSample], p: MovdaParams) -> float:
    dr, ih, tm = _as_arrays(list(samples))
    r = tm - (p.alpha * np.tanh(p.beta * dr) + p.gamma + p.delta * ih)
    return _sse(r)
