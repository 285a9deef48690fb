import math
from typing import Any, Dict

import numpy as np

from utils.errors import ConfigInvalid, NonConvergent
from utils.layers.base_law import AtomicLaw, BaseLayerLaw, LawKind, MarginalLaw, MomentForm
from utils.layers.marginals import QLaw, XLaw, build_q_law, build_x_law


class DeterministicLaw(AtomicLaw):
    kind = LawKind.DETERMINISTIC

    def __init__(self, x: int, q: float):
        super().__init__([(x, q, 1.0)])
        self.x = int(x)
        self.q = float(q)

    def to_dict(self):
        return {"kind": self.kind.value, "x": self.x, "q": self.q}


class EmpiricalTableLaw(AtomicLaw):
    """Joint (x, q, weight) table; weights are normalized on construction."""

    kind = LawKind.EMPIRICAL_TABLE

    def to_dict(self):
        return {"kind": self.kind.value, "table": [list(a) for a in self.atoms()]}


class IndependentProductLaw(MarginalLaw):
    kind = LawKind.INDEPENDENT_PRODUCT

    def __init__(self, x_law: XLaw, q_law: QLaw):
        super().__init__(x_law)
        self.q_law = q_law

    def sample_many(self, rng, size):
        xs = self.x_law.sample(rng, size)
        qs = self.q_law.sample(rng, size)
        return xs, qs

    def atoms(self):
        q_atoms = self.q_law.atoms()
        if self.x_law.upper is None or q_atoms is None:
            return None
        xs, ps = self.x_law.head(self.x_law.upper + 1)
        return [(int(x), q, float(p) * w) for x, p in zip(xs, ps) for q, w in q_atoms if p * w > 0]

    def _q_given_x(self, xs, t):
        return np.full(len(xs), self.q_law.moment(t))

    def _q_tail(self, t):
        return 0, self.q_law.moment(t), 0.0

    def q_moment(self, t):
        return self.q_law.moment(t)

    def to_dict(self):
        return {"kind": self.kind.value, "x": self.x_law.to_dict(), "q": self.q_law.to_dict()}


class PowerLawCoupledLaw(MarginalLaw):
    """Q = min{1, b * X^(-beta)}: small communities are dense, large ones sparse."""

    kind = LawKind.POWER_LAW_COUPLED

    def __init__(self, x_law: XLaw, b: float, beta: float):
        if b < 0 or beta < 0:
            raise ConfigInvalid(f"coupling needs b >= 0 and beta >= 0, got b={b}, beta={beta}")
        super().__init__(x_law)
        self.b = float(b)
        self.beta = float(beta)

    def q_of(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.b == 0.0:
            return np.zeros_like(xs)
        with np.errstate(divide="ignore"):
            return np.minimum(1.0, self.b * np.power(xs, -self.beta))

    def sample_many(self, rng, size):
        xs = self.x_law.sample(rng, size)
        return xs, self.q_of(xs)

    def atoms(self):
        if self.x_law.upper is None:
            return None
        xs, ps = self.x_law.head(self.x_law.upper + 1)
        qs = self.q_of(xs)
        return [(int(x), float(q), float(p)) for x, q, p in zip(xs, qs, ps) if p > 0]

    def _q_given_x(self, xs, t):
        return np.power(self.q_of(xs), t)

    def _q_tail(self, t):
        if t == 0:
            return 0, 1.0, 0.0
        if self.b == 0.0:
            return 0, 0.0, 0.0
        if self.beta == 0.0:
            return 0, min(1.0, self.b) ** t, 0.0
        try:
            threshold = int(math.ceil(self.b ** (1.0 / self.beta)))
        except OverflowError as e:
            raise NonConvergent(f"coupling threshold b**(1/beta) overflows for b={self.b}, beta={self.beta}") from e
        return max(threshold, 1), self.b ** t, -self.beta * t

    def _q_plateau(self, t):
        # Q = 1 below b**(1/beta).
        return 1.0 if self.b >= 1.0 and self.beta > 0.0 else None

    def q_moment(self, t):
        return self._expect(MomentForm.POWER, 0.0, t, None)

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "x": self.x_law.to_dict(),
            "coupling": {"b": self.b, "beta": self.beta},
        }


def build_law(spec: Dict[str, Any]) -> BaseLayerLaw:
    """Build a layer-type law from the `law:` block of a campaign config."""
    if not isinstance(spec, dict):
        raise ConfigInvalid(f"law spec must be a mapping, got {type(spec).__name__}")
    kind = spec.get("kind")
    try:
        if kind == LawKind.DETERMINISTIC.value:
            return DeterministicLaw(spec["x"], spec["q"])
        if kind == LawKind.EMPIRICAL_TABLE.value:
            return EmpiricalTableLaw([tuple(row) for row in spec["table"]])
        if kind == LawKind.INDEPENDENT_PRODUCT.value:
            return IndependentProductLaw(build_x_law(spec["x"]), build_q_law(spec["q"]))
        if kind == LawKind.POWER_LAW_COUPLED.value:
            coupling = spec["coupling"]
            return PowerLawCoupledLaw(build_x_law(spec["x"]), coupling["b"], coupling["beta"])
    except (KeyError, TypeError) as e:
        raise ConfigInvalid(f"Failed to build {kind} law: missing or malformed {e}")
    raise ConfigInvalid(f"Unknown law kind {kind!r}")
