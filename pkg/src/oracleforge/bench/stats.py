"""Summary statistics and box-plot data.

Standard deviation is the sample estimator (n - 1); quantiles interpolate
linearly between order statistics. Box-plot fences are Tukey's 1.5 IQR.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

QUANTILES = (0.25, 0.5, 0.75)


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    std: float
    min: float
    q25: float
    q50: float
    q75: float
    max: float

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BoxPlotData:
    q25: float
    q50: float
    q75: float
    lower_whisker: float
    upper_whisker: float
    outliers: tuple[float, ...]

    def to_json(self) -> dict:
        out = asdict(self)
        out["outliers"] = list(self.outliers)
        return out


def _as_array(samples: Sequence[float]) -> np.ndarray:
    values = np.asarray(samples, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("need at least one sample")
    if not np.all(np.isfinite(values)):
        raise ValueError("samples must be finite")
    return values


def summarize(samples: Sequence[float]) -> SummaryStats:
    values = _as_array(samples)
    q25, q50, q75 = np.quantile(values, QUANTILES, method="linear")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        # Exact for constant samples; the summed mean can be off by an ulp.
        mean, std = lo, 0.0
    else:
        mean, std = float(np.mean(values)), float(np.std(values, ddof=1))
    return SummaryStats(
        n=int(values.size),
        mean=mean,
        std=std,
        min=lo,
        q25=float(q25),
        q50=float(q50),
        q75=float(q75),
        max=hi,
    )


def boxplot(samples: Sequence[float]) -> BoxPlotData:
    values = np.sort(_as_array(samples))
    q25, q50, q75 = (float(q) for q in np.quantile(values, QUANTILES, method="linear"))
    iqr = q75 - q25
    low_fence, high_fence = q25 - 1.5 * iqr, q75 + 1.5 * iqr
    inside = values[(values >= low_fence) & (values <= high_fence)]
    outliers = values[(values < low_fence) | (values > high_fence)]
    return BoxPlotData(
        q25=q25,
        q50=q50,
        q75=q75,
        lower_whisker=float(inside.min()),
        upper_whisker=float(inside.max()),
        outliers=tuple(float(v) for v in outliers),
    )


HEADERS = ("", "n", "mean", "std", "min", "x0.25", "x0.50", "x0.75", "max")


def _fmt(value: float) -> str:
    if value == 0:
        return "0"
    magnitude = abs(value)
    if magnitude >= 1000:
        return f"{value:,.0f}"
    if magnitude >= 1:
        return f"{value:.2f}"
    if magnitude >= 0.001:
        return f"{value:.4g}"
    return f"{value:.2e}"


def format_table(rows: Sequence[tuple[str, SummaryStats | None]]) -> str:
    """Aligned text table; a row with None stats is a section heading."""
    cells = [HEADERS]
    for label, stats in rows:
        if stats is None:
            cells.append((label,) + ("",) * (len(HEADERS) - 1))
        else:
            cells.append((label, str(stats.n)) + tuple(
                _fmt(getattr(stats, k)) for k in ("mean", "std", "min", "q25", "q50", "q75", "max")))
    widths = [max(len(row[i]) for row in cells) for i in range(len(HEADERS))]
    lines = []
    for row in cells:
        lines.append("  ".join([row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]))
    return "\n".join(lines)
