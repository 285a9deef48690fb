"""
Conditional statistics of a single layer, the variance sigma_F^2 of N_F, and the
normalizations of the two limit regimes.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from utils.errors import (
    AlphaOneUnsupported,
    AlphaOutOfRange,
    InfiniteVariance,
    InsufficientSamples,
    MethodBudgetExceeded,
    ZeroScale,
)
from utils.graphs.supergraph import generate_layer
from utils.layers.base_law import BaseLayerLaw, MomentSpec
from utils.motifs.counting import count_in_graph, iter_copies
from utils.motifs.motif import DensityFunctionals, Motif, density_functionals

logger = logging.getLogger(__name__)

EXACT_MAX_X = 30
EXACT_MAX_VERTICES = 7


class Regime(Enum):
    NORMAL = "normal"
    STABLE = "stable"
    NONE = "none"


class VarianceMethod(Enum):
    EXACT_SMALL = "exact_small"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class ConditionalStats:
    n_f_star: float
    psi: Optional[float]
    phi: Optional[float]


@dataclass(frozen=True)
class VarianceEstimate:
    value: float
    std_error: float
    method: VarianceMethod
    degenerate: bool
    mean_n_f: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "method": self.method.value,
            "degenerate": self.degenerate,
            "mean_n_f": self.mean_n_f,
        }


def n_f_star(motif: Motif, x: int, q: float) -> float:
    """N_F* = E(N_F | X, Q) = a_F * C(x, v_F) * q^e_F."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    if x < motif.vertices:
        return 0.0
    return motif.a_f * math.comb(int(x), motif.vertices) * q ** motif.e_f


def n_f_star_many(motif: Motif, xs: np.ndarray, qs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    binom = np.ones_like(xs)
    for j in range(motif.vertices):
        binom = binom * np.clip(xs - j, 0.0, None) / (j + 1)
    return motif.a_f * binom * np.power(np.asarray(qs, dtype=float), motif.e_f)


def conditional_stats(motif: Motif, x: int, q: float) -> ConditionalStats:
    value = n_f_star(motif, x, q)
    if x < 1 or q <= 0.0:
        return ConditionalStats(n_f_star=value, psi=None, phi=None)
    functionals: DensityFunctionals = density_functionals(motif, x, q)
    return ConditionalStats(n_f_star=value, psi=functionals.psi, phi=functionals.phi)


def expected_n_f_star(motif: Motif, law: BaseLayerLaw, truncation: Optional[int] = None) -> float:
    """E N_F* = a_F / v_F! * E[(X)_v Q^e] (X replaced by min{X, n} under truncation)."""
    moment = law.factorial_moment(motif.vertices, motif.e_f, truncation)
    return motif.a_f / math.factorial(motif.vertices) * moment


def overlap_pair_counts(motif: Motif) -> Dict[int, Dict[int, int]]:
    """
    counts[u][s]: ordered pairs of copies of F inside K_u whose vertex sets cover [u] and
    which share s >= 1 edges.

    The first copy is fixed to F itself on [v_F]; by symmetry every one of the
    C(u, v_F) * a_F choices of first copy has the same number of partners.
    """
    v = motif.vertices
    if v > EXACT_MAX_VERTICES:
        raise MethodBudgetExceeded(f"overlap enumeration is limited to motifs with at most {EXACT_MAX_VERTICES} vertices")
    base = set(motif.edges)
    counts: Dict[int, Dict[int, int]] = {}
    for u in range(v, 2 * v - 1):
        fresh = list(range(v, u))
        shared_vertices = v - len(fresh)
        by_overlap: Dict[int, int] = defaultdict(int)
        for kept in combinations(range(v), shared_vertices):
            host = nx.complete_graph(list(kept) + fresh)
            for copy in iter_copies(motif, host):
                shared = sum(1 for edge in copy if edge in base)
                if shared:
                    by_overlap[shared] += 1
        multiplier = math.comb(u, v) * motif.a_f
        counts[u] = {s: c * multiplier for s, c in sorted(by_overlap.items())}
    return counts


def conditional_variance(motif: Motif, x: int, q: float, pair_counts: Optional[Dict[int, Dict[int, int]]] = None) -> float:
    """Var(N_F | X = x, Q = q): covariances of copy indicators in G(x, q)."""
    counts = pair_counts if pair_counts is not None else overlap_pair_counts(motif)
    e = motif.e_f
    terms = []
    for u, by_overlap in counts.items():
        if x < u:
            continue
        ways = math.comb(int(x), u)
        for s, c in by_overlap.items():
            terms.append(ways * c * (q ** (2 * e - s) - q ** (2 * e)))
    return math.fsum(terms)


def _ensure_finite_variance(motif: Motif, law: BaseLayerLaw) -> None:
    second = law.mixed_moment(MomentSpec(2 * motif.vertices, 2 * motif.e_f))
    if math.isinf(second):
        raise InfiniteVariance(f"E[X^{2 * motif.vertices} Q^{2 * motif.e_f}] diverges; Var N_F is infinite")


def _sigma_exact_small(motif: Motif, law: BaseLayerLaw) -> VarianceEstimate:
    atoms = law.finite_atoms(EXACT_MAX_X)
    pair_counts = overlap_pair_counts(motif)
    weights = np.array([w for _, _, w in atoms])
    stars = np.array([n_f_star(motif, x, q) for x, q, _ in atoms])
    mean = math.fsum(weights * stars)
    var_star = math.fsum(weights * (stars - mean) ** 2)
    within = math.fsum(w * conditional_variance(motif, x, q, pair_counts) for x, q, w in atoms)
    value = var_star + within
    logger.debug("sigma_F^2 for %s: Var N* = %.6g, E Var(N|X,Q) = %.6g", motif.name, var_star, within)
    return VarianceEstimate(value=value, std_error=0.0, method=VarianceMethod.EXACT_SMALL,
                            degenerate=value <= 0.0, mean_n_f=mean)


def jackknife_variance(values: Sequence[float]) -> Tuple[float, float]:
    """Sample variance and its leave-one-out jackknife standard error."""
    y = np.asarray(values, dtype=float)
    size = len(y)
    if size < 3:
        raise InsufficientSamples(f"jackknife variance needs at least 3 samples, got {size}")
    s1 = y.sum()
    s2 = np.square(y).sum()
    variance = (s2 - s1 * s1 / size) / (size - 1)
    loo_mean = (s1 - y) / (size - 1)
    loo_var = ((s2 - y * y) - (size - 1) * loo_mean ** 2) / (size - 2)
    se = math.sqrt((size - 1) / size * np.square(loo_var - loo_var.mean()).sum())
    return float(max(variance, 0.0)), se


def single_layer_samples(motif: Motif, law: BaseLayerLaw, draws: int, rng: np.random.Generator,
                         truncation: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    (N_F, N_F*) for `draws` independent single layers G(X, Q); sizes are capped at
    `truncation` when given, for both columns.
    """
    xs, qs = law.sample_many(rng, draws)
    if truncation is not None:
        xs = np.minimum(xs, truncation)
    counts: List[int] = []
    for x, q in zip(xs.tolist(), qs.tolist()):
        if x < motif.vertices or q <= 0.0:
            counts.append(0)
            continue
        layer = generate_layer(int(x), 0, int(x), q, rng)
        counts.append(count_in_graph(motif, layer.graph()))
    return np.array(counts, dtype=float), n_f_star_many(motif, xs, qs)


def _sigma_monte_carlo(motif: Motif, law: BaseLayerLaw, samples: int, rng: np.random.Generator,
                       truncation: Optional[int]) -> VarianceEstimate:
    counts, _ = single_layer_samples(motif, law, samples, rng, truncation)
    value, se = jackknife_variance(counts)
    return VarianceEstimate(value=value, std_error=se, method=VarianceMethod.MONTE_CARLO,
                            degenerate=value <= 0.0, mean_n_f=float(np.mean(counts)))


def sigma_f_squared(motif: Motif, law: BaseLayerLaw, method: VarianceMethod = VarianceMethod.EXACT_SMALL,
                    samples: int = 2000, rng: Optional[np.random.Generator] = None,
                    truncation: Optional[int] = None) -> VarianceEstimate:
    """
    sigma_F^2 = Var N_F = Var N_F* + E Var(N_F | X, Q).

    exact_small needs a finitely supported law with X <= 30; monte_carlo simulates single
    layers (sizes capped at `truncation` when given) and reports a jackknife standard error.
    """
    method = VarianceMethod(method)
    _ensure_finite_variance(motif, law)
    if method is VarianceMethod.EXACT_SMALL:
        estimate = _sigma_exact_small(motif, law)
    else:
        estimate = _sigma_monte_carlo(motif, law, samples, rng or np.random.default_rng(), truncation)
    if estimate.degenerate:
        logger.warning("sigma_F^2 = 0 for %s: N_F is degenerate and the normal limit does not apply", motif.name)
    return estimate


@dataclass(frozen=True)
class Normalization:
    regime: Regime
    b_m: float
    scale: float
    alpha: Optional[float] = None
    sigma_f: Optional[float] = None

    @classmethod
    def normal(cls, sigma_f: float, m: int, mean_n_f_star: float) -> "Normalization":
        """(N - m E N_F*) / (sigma_F sqrt(m))."""
        return cls(regime=Regime.NORMAL, b_m=m * mean_n_f_star, scale=sigma_f * math.sqrt(m), sigma_f=sigma_f)

    @classmethod
    def stable(cls, alpha: float, m: int, mean_n_f_star: Optional[float] = None) -> "Normalization":
        """(N - B_m) / m^(1/alpha), B_m = m E N_F* for 1 < alpha < 2 and 0 for alpha < 1."""
        check_alpha(alpha)
        if alpha > 1:
            if mean_n_f_star is None:
                raise ValueError("centering for 1 < alpha < 2 needs E N_F*")
            b_m = m * mean_n_f_star
        else:
            b_m = 0.0
        return cls(regime=Regime.STABLE, b_m=b_m, scale=m ** (1.0 / alpha), alpha=alpha)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "regime": self.regime.value,
            "alpha": self.alpha,
            "sigma_f": self.sigma_f,
            "b_m": self.b_m,
            "scale": self.scale,
        }


def check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 2.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 2), got {alpha}")
    if alpha == 1.0:
        raise AlphaOneUnsupported("alpha = 1 needs a logarithmic centering that is not supported")


def normalize(counts: Sequence[float], norm: Normalization) -> np.ndarray:
    if not norm.scale > 0.0 or not math.isfinite(norm.scale):
        raise ZeroScale(f"normalization scale must be positive and finite, got {norm.scale}")
    return (np.asarray(counts, dtype=float) - norm.b_m) / norm.scale
