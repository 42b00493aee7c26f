"""Per-group association estimators feeding the interaction tests.

Both estimators consume a paired numeric sample (x_i, y_i) for one
sub-population and return a :class:`~qualint.inference.SubgroupEstimate`
whose standard error makes the estimate asymptotically standard normal
after centering and scaling:

* :func:`ols_slope` - least-squares slope of y on x with the classical
  homoskedastic standard error;
* :func:`pearson` - product-moment correlation with the large-sample
  standard error (1 - r^2) / sqrt(n).

Degenerate samples (too few points, zero spread in a needed coordinate, or
a perfect linear fit that would zero out the standard error) raise
:class:`EstimationError` instead of emitting an estimate the tests cannot
standardize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qualint.inference import SubgroupEstimate

__all__ = ["EstimationError", "Sample2D", "ols_slope", "pearson"]


class EstimationError(ValueError):
    """Raised when a sample cannot support the requested estimate."""


@dataclass(frozen=True, eq=False)
class Sample2D:
    """One sub-population's paired observations, validated on construction.

    Arrays are coerced to 1-D float64.  Requirements: equal lengths, at
    least three pairs (the slope standard error spends two degrees of
    freedom), all values finite, and non-constant x.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or y.ndim != 1:
            raise EstimationError("x and y must be one-dimensional")
        if x.shape[0] != y.shape[0]:
            raise EstimationError(
                f"x and y lengths differ: {x.shape[0]} vs {y.shape[0]}"
            )
        if x.shape[0] < 3:
            raise EstimationError(f"need at least 3 pairs, got {x.shape[0]}")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise EstimationError("sample contains non-finite values")
        if np.ptp(x) == 0.0:
            raise EstimationError("x is constant; no slope or correlation exists")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return int(self.x.shape[0])

    def __repr__(self) -> str:
        return f"Sample2D(n={len(self)})"


def _centered_sums(sample: Sample2D) -> tuple[float, float, float]:
    """(Sxx, Sxy, Syy) about the sample means, each a plain float."""
    dx = sample.x - sample.x.mean()
    dy = sample.y - sample.y.mean()
    return float(dx @ dx), float(dx @ dy), float(dy @ dy)


def ols_slope(sample: Sample2D) -> SubgroupEstimate:
    """Least-squares slope of y on x with its classical standard error.

    slope = Sxy / Sxx; se = sqrt((RSS / (n - 2)) / Sxx) with
    RSS = Syy - Sxy^2 / Sxx.  A perfect fit (zero residual variance) leaves
    nothing to standardize against and raises EstimationError.
    """
    n = len(sample)
    sxx, sxy, syy = _centered_sums(sample)
    if sxx <= 0.0:  # pragma: no cover - Sample2D already rejects constant x
        raise EstimationError("x is constant; no slope exists")
    slope = sxy / sxx
    rss = syy - sxy * sxy / sxx
    sigma2 = max(rss, 0.0) / (n - 2)
    se = math.sqrt(sigma2 / sxx)
    if not (math.isfinite(se) and se > 0.0):
        raise EstimationError(
            "residuals have zero variance (perfect fit); "
            "slope standard error is degenerate"
        )
    return SubgroupEstimate(estimate=slope, std_error=se, sample_size=n)


def pearson(sample: Sample2D) -> SubgroupEstimate:
    """Product-moment correlation with the large-sample standard error.

    r = Sxy / sqrt(Sxx Syy); se = (1 - r^2) / sqrt(n).  Constant y or a
    numerically perfect correlation (|r| >= 1) is degenerate and raises
    EstimationError.
    """
    n = len(sample)
    sxx, sxy, syy = _centered_sums(sample)
    if syy <= 0.0:
        raise EstimationError("y is constant; correlation is undefined")
    r = sxy / math.sqrt(sxx * syy)
    if abs(r) >= 1.0:
        raise EstimationError(
            f"|r| = {abs(r):g} leaves a degenerate standard error"
        )
    se = (1.0 - r * r) / math.sqrt(n)
    return SubgroupEstimate(estimate=r, std_error=se, sample_size=n)
