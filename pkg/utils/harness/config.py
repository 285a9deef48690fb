"""Campaign configuration: YAML/JSON files validated into an immutable CampaignConfig."""

import copy
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from utils.errors import ConfigInvalid, SupergraphError
from utils.law_reference import SCHEMA_VERSION
from utils.layers.base_law import BaseLayerLaw
from utils.layers.laws import build_law
from utils.limits.conditional import Regime, VarianceMethod, check_alpha
from utils.motifs.counting import DEFAULT_MAX_HOST_SIZE
from utils.motifs.motif import Motif, parse_motif

MAX_SEED = 2 ** 64 - 1

KNOWN_KEYS = {
    "schema_version", "name", "n", "m", "nu", "motif", "law", "replicates", "regime", "alpha",
    "seed", "out_dir", "threads", "budgets", "toggles", "sigma", "reference_batch",
}


@dataclass(frozen=True)
class Budgets:
    max_host_size: int = DEFAULT_MAX_HOST_SIZE
    replicate_seconds: Optional[float] = None


@dataclass(frozen=True)
class Toggles:
    dump_graphs: bool = False
    h_f: bool = False
    clustering: bool = False
    timing: bool = False
    tail_transfer: bool = False


@dataclass(frozen=True)
class SigmaSettings:
    method: VarianceMethod = VarianceMethod.EXACT_SMALL
    samples: int = 2000


@dataclass(frozen=True)
class CampaignConfig:
    n: int
    m: int
    motif: Motif
    law: BaseLayerLaw
    replicates: int
    regime: Regime
    motif_spec: Any
    law_spec: Dict[str, Any]
    name: str = "campaign"
    alpha: Optional[float] = None
    seed: int = 0
    out_dir: str = ""
    threads: int = 1
    budgets: Budgets = field(default_factory=Budgets)
    toggles: Toggles = field(default_factory=Toggles)
    sigma: SigmaSettings = field(default_factory=SigmaSettings)
    reference_batch: Optional[int] = None

    @classmethod
    def from_file(cls, path) -> "CampaignConfig":
        try:
            with open(path, "r", encoding="utf-8") as f:
                raw = yaml.safe_load(f)
        except OSError as e:
            raise ConfigInvalid(f"Failed to read config {path}: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigInvalid(f"Failed to parse config {path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigInvalid(f"config {path} must hold a mapping at the top level")
        raw = dict(raw)
        motif = raw.get("motif")
        # Motif files are resolved relative to the config that names them.
        if isinstance(motif, dict) and "file" in motif and not os.path.isabs(motif["file"]):
            raw["motif"] = {"file": str(Path(path).parent / motif["file"])}
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "CampaignConfig":
        unknown = sorted(set(raw) - KNOWN_KEYS)
        if unknown:
            raise ConfigInvalid(f"unknown config key(s): {', '.join(unknown)}")

        version = raw.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigInvalid(f"schema_version {version} is not supported (expected {SCHEMA_VERSION})")

        n = _positive_int(raw, "n")
        if ("m" in raw) == ("nu" in raw):
            raise ConfigInvalid("exactly one of 'm' and 'nu' must be given")
        if "m" in raw:
            m = _positive_int(raw, "m")
        else:
            nu = _number(raw, "nu")
            m = int(round(nu * n))
            if m < 1:
                raise ConfigInvalid(f"'nu' = {nu} gives m = {m} layers for n = {n}")

        for key in ("motif", "law"):
            if key not in raw:
                raise ConfigInvalid(f"missing required key '{key}'")
        try:
            motif = parse_motif(raw["motif"])
            law = build_law(raw["law"])
        except SupergraphError as e:
            raise ConfigInvalid(f"Failed to build campaign inputs: {e}") from e

        replicates = _positive_int(raw, "replicates")
        try:
            regime = Regime(raw.get("regime", Regime.NONE.value))
        except ValueError as e:
            raise ConfigInvalid(f"'regime' must be normal, stable or none, got {raw.get('regime')!r}") from e
        alpha = raw.get("alpha")
        if regime is Regime.STABLE:
            if alpha is None:
                raise ConfigInvalid("regime 'stable' requires 'alpha'")
            try:
                check_alpha(float(alpha))
            except (SupergraphError, TypeError, ValueError) as e:
                raise ConfigInvalid(f"Failed to validate 'alpha': {e}") from e
            alpha = float(alpha)

        seed = raw.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed <= MAX_SEED:
            raise ConfigInvalid(f"'seed' must be an integer in [0, 2^64), got {seed!r}")

        name = str(raw.get("name", "campaign"))
        return cls(
            n=n,
            m=m,
            motif=motif,
            law=law,
            replicates=replicates,
            regime=regime,
            motif_spec=_motif_echo(raw["motif"], motif),
            law_spec=copy.deepcopy(raw["law"]),
            name=name,
            alpha=alpha,
            seed=seed,
            out_dir=str(raw.get("out_dir") or os.path.join("runs", name)),
            threads=_positive_int(raw, "threads", default=1),
            budgets=_budgets(raw.get("budgets") or {}),
            toggles=_toggles(raw.get("toggles") or {}),
            sigma=_sigma(raw.get("sigma") or {}),
            reference_batch=_positive_int(raw, "reference_batch", default=None),
        )

    def with_overrides(self, seed: Optional[int] = None, threads: Optional[int] = None,
                       out_dir: Optional[str] = None) -> "CampaignConfig":
        changes: Dict[str, Any] = {}
        if seed is not None:
            if not 0 <= seed <= MAX_SEED:
                raise ConfigInvalid(f"seed override must lie in [0, 2^64), got {seed}")
            changes["seed"] = seed
        if threads is not None:
            if threads < 1:
                raise ConfigInvalid(f"threads override must be positive, got {threads}")
            changes["threads"] = threads
        if out_dir is not None:
            changes["out_dir"] = out_dir
        return replace(self, **changes) if changes else self

    def with_env_overrides(self) -> "CampaignConfig":
        """Apply SUPERGRAPH_SEED / SUPERGRAPH_THREADS from the environment."""
        seed = os.getenv("SUPERGRAPH_SEED")
        threads = os.getenv("SUPERGRAPH_THREADS")
        try:
            return self.with_overrides(
                seed=int(seed) if seed else None,
                threads=int(threads) if threads else None,
            )
        except ValueError as e:
            raise ConfigInvalid(f"Failed to read environment overrides: {e}") from e

    @property
    def reference_size(self) -> int:
        return self.reference_batch or self.replicates

    def to_dict(self) -> Dict[str, Any]:
        """Config echo for summary.json; the law and motif are echoed as given."""
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "n": self.n,
            "m": self.m,
            "motif": self.motif_spec,
            "law": self.law_spec,
            "replicates": self.replicates,
            "regime": self.regime.value,
            "alpha": self.alpha,
            "seed": self.seed,
            "threads": self.threads,
            "budgets": {
                "max_host_size": self.budgets.max_host_size,
                "replicate_seconds": self.budgets.replicate_seconds,
            },
            "toggles": {
                "dump_graphs": self.toggles.dump_graphs,
                "h_f": self.toggles.h_f,
                "clustering": self.toggles.clustering,
                "timing": self.toggles.timing,
                "tail_transfer": self.toggles.tail_transfer,
            },
            "sigma": {"method": self.sigma.method.value, "samples": self.sigma.samples},
            "reference_batch": self.reference_size,
        }


def _positive_int(raw: Dict[str, Any], key: str, default: Any = ...) -> Any:
    if key not in raw or raw[key] is None:
        if default is ...:
            raise ConfigInvalid(f"missing required key '{key}'")
        return default
    value = raw[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigInvalid(f"'{key}' must be a positive integer, got {value!r}")
    return value


def _number(raw: Dict[str, Any], key: str) -> float:
    value = raw[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
        raise ConfigInvalid(f"'{key}' must be a positive number, got {value!r}")
    return float(value)


def _budgets(raw: Dict[str, Any]) -> Budgets:
    unknown = set(raw) - {"max_host_size", "replicate_seconds"}
    if unknown:
        raise ConfigInvalid(f"unknown budgets key(s): {', '.join(sorted(unknown))}")
    seconds = raw.get("replicate_seconds")
    if seconds is not None:
        seconds = _number(raw, "replicate_seconds")
    return Budgets(
        max_host_size=_positive_int(raw, "max_host_size", default=DEFAULT_MAX_HOST_SIZE),
        replicate_seconds=seconds,
    )


def _toggles(raw: Dict[str, Any]) -> Toggles:
    flags = {}
    for key, value in raw.items():
        if key not in Toggles.__dataclass_fields__:
            raise ConfigInvalid(f"unknown toggles key '{key}'")
        if not isinstance(value, bool):
            raise ConfigInvalid(f"toggle '{key}' must be true or false, got {value!r}")
        flags[key] = value
    return Toggles(**flags)


def _sigma(raw: Dict[str, Any]) -> SigmaSettings:
    try:
        method = VarianceMethod(raw.get("method", VarianceMethod.EXACT_SMALL.value))
    except ValueError as e:
        raise ConfigInvalid(f"sigma method must be exact_small or monte_carlo, got {raw.get('method')!r}") from e
    return SigmaSettings(method=method, samples=_positive_int(raw, "samples", default=2000))


def _motif_echo(spec: Any, motif: Motif) -> Any:
    """A JSON-ready motif spec that parses back to the same motif."""
    if isinstance(spec, Motif):
        return {"vertices": motif.vertices, "edges": [[u + 1, v + 1] for u, v in motif.edges], "name": motif.name}
    return copy.deepcopy(spec)
