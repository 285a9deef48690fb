"""Totally skewed alpha-stable reference samples."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np
from scipy.stats import levy_stable

from utils.errors import EmptySample
from utils.limits.conditional import check_alpha

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StableReference:
    """Scale and location matched to a sample's quartiles; always an empirical fit."""
    alpha: float
    scale: float
    loc: float
    empirical: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {"alpha": self.alpha, "scale": self.scale, "loc": self.loc, "empirical": self.empirical}


def sample_positive_stable(alpha: float, skew_scale: float, count: int, rng: np.random.Generator,
                           loc: float = 0.0) -> np.ndarray:
    """
    Draws from the stable law with skewness +1 (S1 parameterization), generated by
    scipy's Chambers-Mallows-Stuck transform. For alpha < 1 and loc = 0 the support is
    the positive half-line.
    """
    check_alpha(alpha)
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    if skew_scale <= 0:
        raise ValueError(f"scale must be positive, got {skew_scale}")
    return levy_stable.rvs(alpha, 1.0, loc=loc, scale=skew_scale, size=count, random_state=rng)


def fit_stable_reference(sample: Sequence[float], alpha: float, rng: np.random.Generator,
                         calibration: int = 20000) -> StableReference:
    """
    Match the interquartile range and median of `sample` with those of a unit-scale
    skewed stable draw at the given alpha.
    """
    check_alpha(alpha)
    data = np.asarray(sample, dtype=float)
    if data.size == 0:
        raise EmptySample("cannot fit a stable reference to an empty sample")
    unit = sample_positive_stable(alpha, 1.0, calibration, rng)
    q25, q50, q75 = np.percentile(unit, [25, 50, 75])
    d25, d50, d75 = np.percentile(data, [25, 50, 75])
    scale = (d75 - d25) / (q75 - q25) if d75 > d25 else 1.0
    loc = d50 - scale * q50
    logger.debug("empirical stable fit: alpha=%.3f scale=%.6g loc=%.6g", alpha, scale, loc)
    return StableReference(alpha=alpha, scale=float(scale), loc=float(loc))
