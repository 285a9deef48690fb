import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from utils.errors import ConfigInvalid, MethodBudgetExceeded, NonConvergent
from utils.layers.marginals import INFINITE, SERIES_BUDGET, XLaw

# Support points summed explicitly before the closed-form tail of an unbounded X law takes over.
HEAD_CUTOFF = 1000


class LawKind(Enum):
    INDEPENDENT_PRODUCT = "independent_product"
    POWER_LAW_COUPLED = "power_law_coupled"
    DETERMINISTIC = "deterministic"
    EMPIRICAL_TABLE = "empirical_table"


class MomentForm(Enum):
    POWER = "power"          # x**s
    FALLING = "falling"      # (x)_s = x(x-1)...(x-s+1)


@dataclass(frozen=True)
class MomentSpec:
    """Exponents of E[X^s Q^t]; truncation n replaces X by min{X, n}."""
    s: float
    t: float
    truncation: Optional[int] = None

    def __post_init__(self):
        if self.s < 0 or self.t < 0:
            raise ConfigInvalid(f"moment exponents must be nonnegative, got s={self.s}, t={self.t}")
        if self.truncation is not None and self.truncation < 0:
            raise ConfigInvalid(f"truncation must be nonnegative, got {self.truncation}")


@dataclass
class ConditionReport:
    """
    Per-condition verdicts of a moment-condition check.
    A verdict of None means the condition does not apply to this law / motif pair.

    Conditions listed under `families` are alternatives: the report is satisfied when the
    remaining conditions hold and at least one family holds in full.
    """
    regime: str
    motif: str
    conditions: Dict[str, Optional[bool]] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)
    families: Dict[str, List[str]] = field(default_factory=dict)

    def _family_holds(self, names: List[str]) -> bool:
        return all(self.conditions[name] for name in names if self.conditions[name] is not None)

    def _grouped(self) -> set:
        return {name for names in self.families.values() for name in names}

    @property
    def satisfied(self) -> bool:
        grouped = self._grouped()
        if not all(v for name, v in self.conditions.items() if v is not None and name not in grouped):
            return False
        if not self.families:
            return True
        return any(self._family_holds(names) for names in self.families.values())

    @property
    def failed(self) -> List[str]:
        grouped = self._grouped()
        if self.families and any(self._family_holds(names) for names in self.families.values()):
            return [name for name, v in self.conditions.items() if v is False and name not in grouped]
        return [name for name, v in self.conditions.items() if v is False]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "regime": self.regime,
            "motif": self.motif,
            "satisfied": self.satisfied,
            "conditions": dict(self.conditions),
            "families": {name: list(names) for name, names in self.families.items()},
            "details": dict(self.details),
        }


def falling_factorial(x, k: int):
    """(x)_k for scalars or integer arrays; zero whenever x < k."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    for j in range(k):
        out = out * np.clip(x - j, 0.0, None)
    return out


def _moment_weight(xs: np.ndarray, form: MomentForm, order: float, truncation: Optional[int]) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if truncation is not None:
        xs = np.minimum(xs, truncation)
    if form is MomentForm.FALLING:
        return falling_factorial(xs, int(order))
    return np.power(xs, order)


class BaseLayerLaw(ABC):
    """
    Joint law of the layer type (X, Q).

    Laws are immutable after construction; sampling always goes through an explicit
    numpy Generator so that replicates can run on independent derived streams.
    """

    kind: LawKind

    @abstractmethod
    def sample_many(self, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        """Draw `size` independent layer types; returns (xs, qs)."""
        pass

    @abstractmethod
    def atoms(self) -> Optional[List[Tuple[int, float, float]]]:
        """(x, q, weight) atoms for finitely supported laws, None otherwise."""
        pass

    @abstractmethod
    def _expect(self, form: MomentForm, order: float, t: float, truncation: Optional[int]) -> float:
        pass

    @abstractmethod
    def q_moment(self, t: float) -> float:
        """Marginal moment E[Q^t]."""
        pass

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    @property
    def x_law(self) -> Optional[XLaw]:
        return None

    @property
    def tail_exponent(self) -> Optional[float]:
        return self.x_law.tail_exponent if self.x_law is not None else None

    @property
    def tail_constant(self) -> Optional[float]:
        """b in P{X > t} = (b + o(1)) t^(-gamma), when X has a power-law tail."""
        return self.x_law.tail_constant if self.x_law is not None else None

    def sample(self, rng: np.random.Generator) -> Tuple[int, float]:
        xs, qs = self.sample_many(rng, 1)
        return int(xs[0]), float(qs[0])

    def mixed_moment(self, spec: MomentSpec) -> float:
        """E[X^s Q^t] (X replaced by min{X, n} under truncation); INFINITE when divergent."""
        return self._expect(MomentForm.POWER, spec.s, spec.t, spec.truncation)

    def factorial_moment(self, v: int, t: float, truncation: Optional[int] = None) -> float:
        """E[(X)_v Q^t], or E[(min{X, n})_v Q^t] under truncation."""
        return self._expect(MomentForm.FALLING, v, t, truncation)

    def finite_atoms(self, max_x: int) -> List[Tuple[int, float, float]]:
        """Atoms of a finitely supported law whose sizes do not exceed max_x."""
        atoms = self.atoms()
        if atoms is None:
            raise MethodBudgetExceeded(f"{self.kind.value} law is not finitely supported")
        largest = max(x for x, _, _ in atoms)
        if largest > max_x:
            raise MethodBudgetExceeded(f"law puts mass on X = {largest} > {max_x}")
        return atoms


class AtomicLaw(BaseLayerLaw):
    """A law given by finitely many (x, q, weight) atoms."""

    def __init__(self, atoms: List[Tuple[int, float, float]]):
        if not atoms:
            raise ConfigInvalid("a table law needs at least one atom")
        xs = np.array([a[0] for a in atoms], dtype=float)
        qs = np.array([a[1] for a in atoms], dtype=float)
        ws = np.array([a[2] for a in atoms], dtype=float)
        if np.any(xs < 0) or np.any(xs != np.round(xs)):
            raise ConfigInvalid("table sizes X must be nonnegative integers")
        if np.any(qs < 0) or np.any(qs > 1):
            raise ConfigInvalid("table probabilities Q must lie in [0, 1]")
        if np.any(ws < 0) or ws.sum() <= 0:
            raise ConfigInvalid("table weights must be nonnegative with positive sum")
        self._xs = xs.astype(np.int64)
        self._qs = qs
        self._ws = ws / ws.sum()

    def sample_many(self, rng, size):
        idx = rng.choice(len(self._ws), size=size, p=self._ws)
        return self._xs[idx].copy(), self._qs[idx].copy()

    def atoms(self):
        return [(int(x), float(q), float(w)) for x, q, w in zip(self._xs, self._qs, self._ws)]

    def _expect(self, form, order, t, truncation):
        weights = _moment_weight(self._xs, form, order, truncation)
        return math.fsum(self._ws * weights * np.power(self._qs, t))

    def q_moment(self, t):
        return math.fsum(self._ws * np.power(self._qs, t))


class MarginalLaw(BaseLayerLaw):
    """
    A law given by the X marginal and the conditional moments E[Q^t | X = x].

    For unbounded X the conditional moment must be a pure power c * x**shift from some
    threshold on, so the tail of every moment reduces to power sums of the X law.
    """

    def __init__(self, x_law: XLaw):
        self._x_law = x_law

    @property
    def x_law(self):
        return self._x_law

    @abstractmethod
    def _q_given_x(self, xs: np.ndarray, t: float) -> np.ndarray:
        pass

    @abstractmethod
    def _q_tail(self, t: float) -> Tuple[int, float, float]:
        """(threshold, coef, shift): E[Q^t | X = x] = coef * x**shift for x >= threshold."""
        pass

    def _q_plateau(self, t: float) -> Optional[float]:
        """Constant value of E[Q^t | X = x] between the explicit head and the tail threshold, if any."""
        return None

    def _expect(self, form, order, t, truncation):
        if self._x_law.upper is not None:
            xs, ps = self._x_law.head(self._x_law.upper + 1)
            return math.fsum(ps * _moment_weight(xs, form, order, truncation) * self._q_given_x(xs, t))

        threshold, coef, shift = self._q_tail(t)
        cut = max(HEAD_CUTOFF, truncation or 0)
        plateau = self._q_plateau(t) if threshold > cut else None
        if threshold > cut and plateau is None:
            cut = threshold
        if cut > SERIES_BUDGET:
            raise NonConvergent(f"explicit moment head up to x = {cut} exceeds {SERIES_BUDGET} terms")

        tail = 0.0
        if coef != 0.0:
            tail = coef * self._segment_sum(max(cut, threshold), None, form, order, truncation, shift)
            if math.isinf(tail):
                return INFINITE
        middle = 0.0
        if plateau:
            middle = plateau * self._segment_sum(cut, threshold, form, order, truncation, 0.0)
            if math.isinf(middle):
                return INFINITE

        xs, ps = self._x_law.head(cut)
        head = math.fsum(ps * _moment_weight(xs, form, order, truncation) * self._q_given_x(xs, t))
        return math.fsum([head, middle, tail])

    def _segment_sum(self, start: int, stop: Optional[int], form: MomentForm, order: float,
                     truncation: Optional[int], shift: float) -> float:
        """
        Sum of p(x) * w(x) * x**shift over start <= x < stop (stop None: no upper end), where w is
        the moment weight. Requires start >= truncation, so a truncated weight is frozen at its cap.
        """
        def power_sum(power):
            if stop is None:
                return self._x_law.power_tail(start, power)
            return self._x_law.power_range(start, stop, power)

        if truncation is not None:
            frozen = float(_moment_weight(np.array([truncation]), form, order, None)[0])
            return frozen * power_sum(shift) if frozen != 0.0 else 0.0

        if form is MomentForm.POWER:
            return power_sum(order + shift)

        # (x)_v expanded into powers of x: numpy.poly gives the coefficients of prod (x - j).
        poly = np.poly(np.arange(int(order)))
        terms = []
        for degree, c in zip(range(int(order), -1, -1), poly):
            if c == 0:
                continue
            value = power_sum(degree + shift)
            if math.isinf(value):
                return INFINITE
            terms.append(c * value)
        return math.fsum(terms)
