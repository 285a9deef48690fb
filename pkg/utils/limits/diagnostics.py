"""Tail-index and distribution diagnostics: Hill estimator, KS distances, QQ pairs."""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from utils.errors import DegenerateSample, EmptySample, InsufficientSamples


@dataclass
class TailDiagnostics:
    hill_estimate: Optional[float]
    k_order: Optional[int]
    ks_distance: Optional[float]
    qq_points: List[Tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ks": self.ks_distance,
            "hill": {"estimate": self.hill_estimate, "k": self.k_order},
            "qq": [list(p) for p in self.qq_points],
        }


def default_k_order(size: int) -> int:
    return max(2, int(math.floor(size ** 0.6)))


def hill_estimator(samples: Sequence[float], k_order: Optional[int] = None) -> float:
    """
    alpha_hat = k / sum_{i=1..k} log(X_(n-i+1) / X_(n-k)) over the positive samples.
    k defaults to floor(N^0.6).
    """
    x = np.asarray(samples, dtype=float)
    x = np.sort(x[x > 0])
    size = len(x)
    k = k_order if k_order is not None else default_k_order(size)
    if k < 2:
        raise InsufficientSamples(f"Hill estimator needs k >= 2, got {k}")
    if size < k + 1:
        raise InsufficientSamples(f"Hill estimator with k={k} needs {k + 1} positive samples, got {size}")
    threshold = x[size - k - 1]
    log_sum = float(np.sum(np.log(x[size - k:] / threshold)))
    if log_sum <= 0.0:
        raise DegenerateSample("upper order statistics are all equal; the tail index is undefined")
    return k / log_sum


def hill_sensitivity(samples: Sequence[float], k_grid: Sequence[int]) -> Dict[int, float]:
    """Hill estimates over a grid of k, skipping k values the sample cannot support."""
    out = {}
    for k in k_grid:
        try:
            out[int(k)] = hill_estimator(samples, int(k))
        except InsufficientSamples:
            continue
    return out


def _nonempty(name: str, values: Sequence[float]) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise EmptySample(f"{name} is empty")
    return arr


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """sup_x |F_a(x) - F_b(x)| for the two empirical CDFs."""
    return float(stats.ks_2samp(_nonempty("first sample", a), _nonempty("second sample", b)).statistic)


def ks_one_sample_normal(samples: Sequence[float]) -> float:
    """KS distance from the empirical CDF to the standard normal CDF."""
    return float(stats.kstest(_nonempty("sample", samples), stats.norm.cdf).statistic)


def qq_points(sample: Sequence[float], reference: Optional[Sequence[float]] = None,
              count: int = 99) -> List[Tuple[float, float]]:
    """
    (theoretical, empirical) quantile pairs at probabilities i / (count + 1). The
    theoretical side is the standard normal unless a reference sample is given.
    """
    data = _nonempty("sample", sample)
    probs = np.arange(1, count + 1) / (count + 1)
    if reference is None:
        theoretical = stats.norm.ppf(probs)
    else:
        theoretical = np.quantile(_nonempty("reference", reference), probs)
    empirical = np.quantile(data, probs)
    return [(float(t), float(e)) for t, e in zip(theoretical, empirical)]


@dataclass
class TailTransfer:
    """Hill estimates on paired single-layer samples of N_F and N_F*."""
    hill_n_f: float
    hill_n_f_star: float
    k_order: int
    draws: int

    @property
    def relative_gap(self) -> float:
        return abs(self.hill_n_f - self.hill_n_f_star) / self.hill_n_f_star

    def agrees(self, tolerance: float = 0.15) -> bool:
        return self.relative_gap <= tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hill_n_f": self.hill_n_f,
            "hill_n_f_star": self.hill_n_f_star,
            "k": self.k_order,
            "draws": self.draws,
            "relative_gap": self.relative_gap,
        }


def tail_transfer(n_f: Sequence[float], n_f_star: Sequence[float], k_order: Optional[int] = None) -> TailTransfer:
    """
    Compare the tail indices of N_F and N_F* with the same k. k defaults to floor(N^0.6)
    over the positive N_F* values.
    """
    n_f = _nonempty("N_F sample", n_f)
    n_f_star = _nonempty("N_F* sample", n_f_star)
    k = k_order if k_order is not None else default_k_order(int(np.count_nonzero(n_f_star > 0)))
    return TailTransfer(
        hill_n_f=hill_estimator(n_f, k),
        hill_n_f_star=hill_estimator(n_f_star, k),
        k_order=k,
        draws=len(n_f_star),
    )
