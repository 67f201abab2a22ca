"""Numeric data behind the fitted-curve and margin-histogram figures.

Only the numbers are produced here; drawing them is left to the caller.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import gaussian_kde

from .errors import InsufficientDataError, InvalidArgumentError
from .fitting import _as_arrays
from .games import GameRecord
from .ratings_core import MovdaParams, expected_mov

MIN_BIN_COUNT = 5
CURVE_POINTS = 201
KDE_POINTS = 201
CONTEXTS = ("home", "away")


@dataclass
class CurveBin:
    context: str
    center: float
    lo: float
    hi: float
    count: int
    mean: float
    std: float
    sparse: bool


@dataclass
class FitPlotData:
    bins: list[CurveBin]
    curve: dict[str, list[tuple[float, float]]]
    params: dict[str, float]
    bin_width: float

    def to_dict(self) -> dict:
        return {
            "bin_width": self.bin_width,
            "params": self.params,
            "bins": [asdict(b) for b in self.bins],
            "curve": {k: [list(p) for p in v] for k, v in self.curve.items()},
        }

    def bins_csv_rows(self):
        header = ("context", "center", "lo", "hi", "count", "mean", "std", "sparse")
        return header, [tuple(asdict(b).values()) for b in self.bins]


def _context_of(i_ha: float) -> str | None:
    if i_ha > 0:
        return "home"
    if i_ha < 0:
        return "away"
    return None


def export_fit_plot_data(samples, params: MovdaParams, bin_width: float = 25.0) -> FitPlotData:
    """Binned observed margins against rating gap, plus the fitted curve.

    Bins are aligned to multiples of ``bin_width`` and cover the observed
    gap range. Neutral-site samples (indicator 0) are reported as their own
    context only when present.
    """
    if not bin_width > 0:
        raise InvalidArgumentError(f"bin_width must be positive, got {bin_width}")
    dr, ih, tm = _as_arrays(samples)
    if dr.size == 0:
        raise InsufficientDataError("no samples to bin")

    contexts = [(c, s) for c, s in (("home", 1.0), ("away", -1.0), ("neutral", 0.0)) if np.any(ih == s)]
    bins: list[CurveBin] = []
    first = math.floor(dr.min() / bin_width)
    last = math.floor(dr.max() / bin_width)
    for name, sign in contexts:
        sel = ih == sign
        idx = np.floor(dr[sel] / bin_width).astype(np.int64)
        vals = tm[sel]
        for b in range(first, last + 1):
            m = vals[idx == b]
            n = int(m.size)
            bins.append(
                CurveBin(
                    context=name,
                    center=(b + 0.5) * bin_width,
                    lo=b * bin_width,
                    hi=(b + 1) * bin_width,
                    count=n,
                    mean=float(m.mean()) if n else math.nan,
                    std=float(m.std(ddof=1)) if n > 1 else math.nan,
                    sparse=n < MIN_BIN_COUNT,
                )
            )

    lattice = np.linspace(first * bin_width, (last + 1) * bin_width, CURVE_POINTS)
    curve = {
        name: [(float(x), expected_mov(float(x), int(sign), params)) for x in lattice]
        for name, sign in contexts
    }
    return FitPlotData(bins, curve, params.to_dict(), bin_width)


@dataclass
class HistogramData:
    context: str
    bin_edges: list[float]
    counts: list[int]
    kde_x: list[float] = field(default_factory=list)
    kde_density: list[float] = field(default_factory=list)
    mean: float = math.nan
    std: float = math.nan
    bandwidth: float | None = None

    @property
    def markers(self) -> dict[str, float]:
        return {"mean": self.mean, "minus_1sd": self.mean - self.std, "plus_1sd": self.mean + self.std}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["markers"] = self.markers
        return d


def context_margins(games: Sequence[GameRecord], context: str) -> np.ndarray:
    """Margins from the home side (``home``) or the away side (``away``)."""
    if context not in CONTEXTS:
        raise InvalidArgumentError(f"context must be one of {CONTEXTS}, got {context!r}")
    sign = 1.0 if context == "home" else -1.0
    return np.array([sign * g.t_mov_home for g in games], dtype=float)


def export_margin_histogram(
    games: Sequence[GameRecord], context: str = "home", bin_width: float = 2.0
) -> HistogramData:
    if not bin_width > 0:
        raise InvalidArgumentError(f"bin_width must be positive, got {bin_width}")
    if not games:
        raise InsufficientDataError("no games for the histogram")
    m = context_margins(games, context)
    lo = math.floor(m.min() / bin_width) * bin_width
    hi = (math.floor(m.max() / bin_width) + 1) * bin_width
    edges = np.arange(lo, hi + bin_width / 2, bin_width)
    counts, _ = np.histogram(m, bins=edges)
    mean = float(m.mean())
    std = float(m.std(ddof=1)) if m.size > 1 else 0.0
    out = HistogramData(context, edges.tolist(), counts.astype(int).tolist(), mean=mean, std=std)
    if m.size > 1 and std > 0:
        kde = gaussian_kde(m, bw_method="silverman")
        xs = np.linspace(lo, hi, KDE_POINTS)
        out.kde_x = xs.tolist()
        out.kde_density = kde(xs).tolist()
        out.bandwidth = float(kde.factor * std)
    return out
