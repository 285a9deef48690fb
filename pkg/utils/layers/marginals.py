"""Marginal laws for the layer size X and the layer edge probability Q."""

import math
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import special

from utils.errors import ConfigInvalid, NonConvergent

INFINITE = math.inf

# Most terms a moment series may sum explicitly before giving up.
SERIES_BUDGET = 10_000_000
SERIES_CHUNK = 1_000_000

# Largest x_min for which Zipf draws are made by rejection from numpy's x_min=1 sampler.
MAX_ZIPF_XMIN = 64


class XLaw(ABC):
    """Distribution of the layer size X on {0, 1, 2, ...}."""

    family: str = ""

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        pass

    @abstractmethod
    def head(self, limit: int) -> Tuple[np.ndarray, np.ndarray]:
        """Support points x < limit and their probabilities."""
        pass

    @abstractmethod
    def power_tail(self, start: int, power: float) -> float:
        """Sum of p(x) * x**power over the support with x >= start (may be INFINITE)."""
        pass

    def points(self, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
        """Support points start <= x < stop and their probabilities."""
        xs, ps = self.head(stop)
        keep = xs >= start
        return xs[keep], ps[keep]

    def power_range(self, start: int, stop: int, power: float) -> float:
        """Sum of p(x) * x**power over the support with start <= x < stop."""
        if stop <= start:
            return 0.0
        upper = self.power_tail(start, power)
        rest = self.power_tail(stop, power)
        if math.isfinite(upper) and math.isfinite(rest):
            return max(upper - rest, 0.0)
        if stop - start > SERIES_BUDGET:
            raise NonConvergent(
                f"sum of x**{power} over [{start}, {stop}) needs more than {SERIES_BUDGET} terms"
            )
        total = []
        for lo in range(start, stop, SERIES_CHUNK):
            xs, ps = self.points(lo, min(lo + SERIES_CHUNK, stop))
            total.append(math.fsum(ps * np.power(xs.astype(float), power)))
        return math.fsum(total)

    @property
    def upper(self) -> Optional[int]:
        """Largest support point, or None for unbounded support."""
        return None

    @property
    def tail_exponent(self) -> Optional[float]:
        return None

    @property
    def tail_constant(self) -> Optional[float]:
        return None

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass


class QLaw(ABC):
    """Distribution of the layer edge probability Q on [0, 1]."""

    family: str = ""

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        pass

    @abstractmethod
    def moment(self, t: float) -> float:
        pass

    def atoms(self) -> Optional[List[Tuple[float, float]]]:
        """(q, weight) atoms for finitely supported laws, None otherwise."""
        return None

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass


def _normalized_table(values, weights, what: str) -> Tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values)
    weights = np.asarray(weights, dtype=float)
    if values.ndim != 1 or len(values) == 0 or len(values) != len(weights):
        raise ConfigInvalid(f"{what} table needs matching non-empty values and weights")
    if np.any(weights < 0) or weights.sum() <= 0:
        raise ConfigInvalid(f"{what} table weights must be nonnegative with positive sum")
    return values, weights / weights.sum()


class ConstantX(XLaw):
    family = "constant"

    def __init__(self, value: int):
        if int(value) != value or value < 0:
            raise ConfigInvalid(f"constant X must be a nonnegative integer, got {value}")
        self.value = int(value)

    def sample(self, rng, size):
        return np.full(size, self.value, dtype=np.int64)

    def head(self, limit):
        if self.value < limit:
            return np.array([self.value], dtype=np.int64), np.array([1.0])
        return np.empty(0, dtype=np.int64), np.empty(0)

    def power_tail(self, start, power):
        return float(self.value) ** power if self.value >= start else 0.0

    @property
    def upper(self):
        return self.value

    def to_dict(self):
        return {"family": self.family, "value": self.value}


class ZipfX(XLaw):
    """P{X = x} proportional to x**(-gamma - 1) for x >= x_min, so P{X > t} ~ b t**(-gamma)."""

    family = "zipf"

    def __init__(self, gamma: float, x_min: int = 1):
        if gamma <= 0:
            raise ConfigInvalid(f"zipf tail exponent gamma must be positive, got {gamma}")
        if int(x_min) != x_min or x_min < 1:
            raise ConfigInvalid(f"zipf x_min must be a positive integer, got {x_min}")
        if x_min > MAX_ZIPF_XMIN:
            raise ConfigInvalid(f"zipf x_min above {MAX_ZIPF_XMIN} is not supported")
        self.gamma = float(gamma)
        self.x_min = int(x_min)
        self.normalizer = float(special.zeta(self.gamma + 1.0, self.x_min))

    def sample(self, rng, size):
        out = np.empty(size, dtype=np.int64)
        filled = 0
        while filled < size:
            draws = rng.zipf(self.gamma + 1.0, size - filled)
            draws = draws[draws >= self.x_min]
            out[filled:filled + len(draws)] = draws
            filled += len(draws)
        return out

    def head(self, limit):
        xs = np.arange(self.x_min, max(limit, self.x_min), dtype=np.int64)
        ps = np.power(xs.astype(float), -self.gamma - 1.0) / self.normalizer
        return xs, ps

    def points(self, start, stop):
        xs = np.arange(max(int(start), self.x_min), max(int(stop), self.x_min), dtype=np.int64)
        ps = np.power(xs.astype(float), -self.gamma - 1.0) / self.normalizer
        return xs, ps

    def power_tail(self, start, power):
        start = max(int(start), self.x_min)
        exponent = self.gamma + 1.0 - power
        if exponent <= 1.0:
            return INFINITE
        value = float(special.zeta(exponent, start))
        if not math.isfinite(value):
            raise NonConvergent(f"zeta({exponent}, {start}) did not evaluate to a finite value")
        return value / self.normalizer

    @property
    def tail_exponent(self):
        return self.gamma

    @property
    def tail_constant(self):
        return 1.0 / (self.gamma * self.normalizer)

    def to_dict(self):
        return {"family": self.family, "gamma": self.gamma, "x_min": self.x_min}


class UniformX(XLaw):
    family = "uniform"

    def __init__(self, low: int, high: int):
        if int(low) != low or int(high) != high or low < 0 or high < low:
            raise ConfigInvalid(f"uniform X needs integers 0 <= low <= high, got {low}, {high}")
        self.low = int(low)
        self.high = int(high)

    def sample(self, rng, size):
        return rng.integers(self.low, self.high + 1, size=size, dtype=np.int64)

    def _support(self):
        xs = np.arange(self.low, self.high + 1, dtype=np.int64)
        return xs, np.full(len(xs), 1.0 / len(xs))

    def head(self, limit):
        xs, ps = self._support()
        keep = xs < limit
        return xs[keep], ps[keep]

    def power_tail(self, start, power):
        xs, ps = self._support()
        keep = xs >= start
        return math.fsum(ps[keep] * np.power(xs[keep].astype(float), power))

    @property
    def upper(self):
        return self.high

    def to_dict(self):
        return {"family": self.family, "low": self.low, "high": self.high}


class TableX(XLaw):
    family = "table"

    def __init__(self, values, weights):
        values, weights = _normalized_table(values, weights, "X")
        if np.any(values < 0) or np.any(np.asarray(values) != np.round(values)):
            raise ConfigInvalid("X table values must be nonnegative integers")
        order = np.argsort(values, kind="stable")
        self.values = values[order].astype(np.int64)
        self.weights = weights[order]

    def sample(self, rng, size):
        return rng.choice(self.values, size=size, p=self.weights).astype(np.int64)

    def head(self, limit):
        keep = self.values < limit
        return self.values[keep], self.weights[keep]

    def power_tail(self, start, power):
        keep = self.values >= start
        return math.fsum(self.weights[keep] * np.power(self.values[keep].astype(float), power))

    @property
    def upper(self):
        return int(self.values.max())

    def to_dict(self):
        return {"family": self.family, "values": self.values.tolist(), "weights": self.weights.tolist()}


class ConstantQ(QLaw):
    family = "constant"

    def __init__(self, value: float):
        if not 0.0 <= value <= 1.0:
            raise ConfigInvalid(f"constant Q must lie in [0, 1], got {value}")
        self.value = float(value)

    def sample(self, rng, size):
        return np.full(size, self.value)

    def moment(self, t):
        return self.value ** t

    def atoms(self):
        return [(self.value, 1.0)]

    def to_dict(self):
        return {"family": self.family, "value": self.value}


class BetaQ(QLaw):
    family = "beta"

    def __init__(self, a: float, b: float):
        if a <= 0 or b <= 0:
            raise ConfigInvalid(f"beta Q needs positive shape parameters, got {a}, {b}")
        self.a = float(a)
        self.b = float(b)

    def sample(self, rng, size):
        return rng.beta(self.a, self.b, size=size)

    def moment(self, t):
        return float(special.beta(self.a + t, self.b) / special.beta(self.a, self.b))

    def to_dict(self):
        return {"family": self.family, "a": self.a, "b": self.b}


class TableQ(QLaw):
    family = "table"

    def __init__(self, values, weights):
        values, weights = _normalized_table(values, weights, "Q")
        values = values.astype(float)
        if np.any(values < 0) or np.any(values > 1):
            raise ConfigInvalid("Q table values must lie in [0, 1]")
        self.values = values
        self.weights = weights

    def sample(self, rng, size):
        return rng.choice(self.values, size=size, p=self.weights)

    def moment(self, t):
        return math.fsum(self.weights * np.power(self.values, t))

    def atoms(self):
        return list(zip(self.values.tolist(), self.weights.tolist()))

    def to_dict(self):
        return {"family": self.family, "values": self.values.tolist(), "weights": self.weights.tolist()}


def build_x_law(spec: Dict[str, Any]) -> XLaw:
    family = spec.get("family")
    try:
        if family == "constant":
            return ConstantX(spec["value"])
        if family == "zipf":
            return ZipfX(spec["gamma"], spec.get("x_min", 1))
        if family == "uniform":
            return UniformX(spec["low"], spec["high"])
        if family == "table":
            return TableX(spec["values"], spec["weights"])
    except KeyError as e:
        raise ConfigInvalid(f"X law '{family}' is missing key {e}")
    raise ConfigInvalid(f"Unknown X law family {family!r}")


def build_q_law(spec: Dict[str, Any]) -> QLaw:
    family = spec.get("family")
    try:
        if family == "constant":
            return ConstantQ(spec["value"])
        if family == "beta":
            return BetaQ(spec["a"], spec["b"])
        if family == "table":
            return TableQ(spec["values"], spec["weights"])
    except KeyError as e:
        raise ConfigInvalid(f"Q law '{family}' is missing key {e}")
    raise ConfigInvalid(f"Unknown Q law family {family!r}")
