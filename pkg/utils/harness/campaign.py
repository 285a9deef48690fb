"""
Campaign orchestration: R replicates of generate -> count -> normalize on derived seeds,
persisted in replicate order, followed by the regime diagnostics.
"""

import asyncio
import json
import logging
import math
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import islice
from pathlib import Path
from typing import Any, Deque, Dict, List, Optional, Tuple

import numpy as np

from utils.combinatorics.overlap import expected_poly_star
from utils.errors import (
    BudgetExceeded,
    ConfigInvalid,
    HostTooLarge,
    InfiniteVariance,
    MethodBudgetExceeded,
    NonConvergent,
    SupergraphError,
    TooManyEdges,
    ZeroScale,
)
from utils.graphs.supergraph import (
    dump_supergraph,
    generate_supergraph,
    max_layer_overflow,
    mean_degree,
)
from utils.harness.config import CampaignConfig
from utils.harness.outputs import ReplicateWriter, format_real
from utils.layers.base_law import BaseLayerLaw, ConditionReport
from utils.layers.conditions import check_normal_conditions, check_stable_conditions
from utils.layers.laws import build_law
from utils.limits.conditional import (
    Normalization,
    Regime,
    VarianceEstimate,
    expected_n_f_star,
    n_f_star_many,
    normalize,
    sigma_f_squared,
    single_layer_samples,
)
from utils.limits.diagnostics import (
    TailDiagnostics,
    TailTransfer,
    default_k_order,
    hill_estimator,
    hill_sensitivity,
    ks_one_sample_normal,
    ks_two_sample,
    qq_points,
    tail_transfer,
)
from utils.limits.stable import fit_stable_reference, sample_positive_stable
from utils.motifs.counting import ClusteringResult, CountReport, clustering_coefficient, count_report
from utils.motifs.motif import Motif, parse_motif

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1

# Stream tags for the auxiliary random streams, kept apart from replicate indices.
SIGMA_STREAM = 0x5349474D41
REFERENCE_STREAM = 0x5245464552454E43
CMS_STREAM = 0x434D53
TAIL_STREAM = 0x5441494C

# Single-layer draws and Hill order for the tail-transfer diagnostic.
TAIL_TRANSFER_DRAWS = 100_000
TAIL_TRANSFER_K = 100

# Tasks kept in flight per worker process.
SUBMIT_WINDOW = 32


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def replicate_seed(master: int, index: int) -> int:
    return splitmix64((master ^ splitmix64(index)) & MASK64)


def stream_rng(master: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(splitmix64((master ^ tag) & MASK64))


@dataclass(frozen=True)
class ReplicateTask:
    index: int
    seed: int
    n: int
    m: int
    motif_key: str
    law_key: str
    max_host_size: int
    clustering: bool
    dump_path: Optional[str] = None


@dataclass
class ReplicateRecord:
    replicate: int
    seed: int
    report: CountReport
    s_f_star: float
    overflow: int
    runtime_ms: float
    n_f_star_values: Tuple[float, ...] = field(default=(), repr=False)
    clustering: Optional[ClusteringResult] = None
    mean_degree: Optional[float] = None
    normalized: Optional[float] = None

    def csv_row(self, timing: bool) -> List[str]:
        r = self.report
        return [
            str(self.replicate),
            str(self.seed),
            str(r.n_f),
            str(r.mono),
            str(r.poly),
            str(r.poly_star),
            str(r.s_tilde),
            format_real(self.s_f_star),
            format_real(self.normalized),
            str(self.overflow),
            format_real(self.runtime_ms) if timing else "",
        ]


@lru_cache(maxsize=8)
def _inputs(motif_key: str, law_key: str) -> Tuple[Motif, BaseLayerLaw]:
    return parse_motif(json.loads(motif_key)), build_law(json.loads(law_key))


def run_replicate(task: ReplicateTask) -> ReplicateRecord:
    """One replicate on its own stream; the result depends on nothing but the task."""
    motif, law = _inputs(task.motif_key, task.law_key)
    rng = np.random.default_rng(task.seed)
    start = time.perf_counter()

    g = generate_supergraph(task.n, task.m, law, rng)
    report = count_report(motif, g, task.max_host_size)
    report.assert_invariants()

    xs = np.array([layer.x_drawn for layer in g.layers], dtype=float)
    qs = np.array([layer.q_drawn for layer in g.layers], dtype=float)
    stars = n_f_star_many(motif, xs, qs)

    clustering = degree = None
    if task.clustering:
        clustering = clustering_coefficient(g.flat)
        degree = mean_degree(g)

    if task.dump_path:
        Path(task.dump_path).parent.mkdir(parents=True, exist_ok=True)
        with open(task.dump_path, "w", encoding="utf-8") as f:
            dump_supergraph(g, f, task.seed)

    return ReplicateRecord(
        replicate=task.index,
        seed=task.seed,
        report=report,
        s_f_star=math.fsum(stars.tolist()),
        overflow=max_layer_overflow(g),
        runtime_ms=(time.perf_counter() - start) * 1000.0,
        n_f_star_values=tuple(stars.tolist()),
        clustering=clustering,
        mean_degree=degree,
    )


@dataclass
class CampaignResult:
    config: CampaignConfig
    records: List[ReplicateRecord]
    conditions: Optional[ConditionReport] = None
    sigma: Optional[VarianceEstimate] = None
    sigma_error: Optional[str] = None
    mean_n_f_star: Optional[float] = None
    normalization: Optional[Normalization] = None
    truncated: Optional[str] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    qq: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def completed(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        if name == "s_f_star":
            return np.array([r.s_f_star for r in self.records], dtype=float)
        return np.array([getattr(r.report, name) for r in self.records], dtype=float)

    def summary(self) -> Dict[str, Any]:
        aggregates = {name: _moments(self.column(name))
                      for name in ("n_f", "mono", "poly", "poly_star", "s_tilde", "s_f_star")}
        aggregates["overflow_total"] = int(sum(r.overflow for r in self.records))
        return {
            "config": self.config.to_dict(),
            "motif": self.config.motif.to_dict(),
            "completed": self.completed,
            "truncated": {"truncated": self.truncated is not None, "reason": self.truncated},
            "conditions": self.conditions.to_dict() if self.conditions else None,
            "sigma": self.sigma.to_dict() if self.sigma else None,
            "sigma_error": self.sigma_error,
            "mean_n_f_star": self.mean_n_f_star,
            "b_m_reference": self.config.m * self.mean_n_f_star if self.mean_n_f_star is not None else None,
            "normalization": self.normalization.to_dict() if self.normalization else None,
            "aggregates": aggregates,
            "diagnostics": self.diagnostics,
        }


def _moments(values: np.ndarray) -> Dict[str, Optional[float]]:
    if values.size == 0:
        return {"mean": None, "variance": None, "std_error": None}
    variance = float(np.var(values, ddof=1)) if values.size > 1 else None
    std_error = math.sqrt(variance / values.size) if variance is not None else None
    return {"mean": float(np.mean(values)), "variance": variance, "std_error": std_error}


def check_conditions(config: CampaignConfig) -> Optional[ConditionReport]:
    try:
        if config.regime is Regime.NORMAL:
            report = check_normal_conditions(config.law, config.motif)
        elif config.regime is Regime.STABLE:
            report = check_stable_conditions(config.law, config.motif, config.alpha)
        else:
            return None
    except SupergraphError as e:
        raise ConfigInvalid(f"Failed to check moment conditions: {e}") from e
    if not report.satisfied:
        logger.warning("moment conditions fail for %s: %s; the campaign proceeds",
                       config.motif.name, ", ".join(report.failed))
    return report


def _mean_n_f_star(config: CampaignConfig) -> Optional[float]:
    try:
        value = expected_n_f_star(config.motif, config.law)
    except NonConvergent as e:
        logger.warning("E N_F* could not be evaluated: %s", e)
        return None
    return value if math.isfinite(value) else None


def _sigma_prepass(config: CampaignConfig) -> Tuple[Optional[VarianceEstimate], Optional[str]]:
    try:
        estimate = sigma_f_squared(
            config.motif, config.law, config.sigma.method,
            samples=config.sigma.samples,
            rng=stream_rng(config.seed, SIGMA_STREAM),
            truncation=config.n,
        )
    except (InfiniteVariance, MethodBudgetExceeded, NonConvergent) as e:
        logger.warning("sigma_F could not be estimated: %s", e)
        return None, str(e)
    return estimate, None


def _normalization(config: CampaignConfig, sigma: Optional[VarianceEstimate],
                   mean_star: Optional[float]) -> Optional[Normalization]:
    if config.regime is Regime.NORMAL:
        if sigma is None or sigma.degenerate or mean_star is None:
            return None
        return Normalization.normal(math.sqrt(sigma.value), config.m, mean_star)
    if config.regime is Regime.STABLE:
        if config.alpha > 1 and mean_star is None:
            return None
        return Normalization.stable(config.alpha, config.m, mean_star)
    return None


def build_tasks(config: CampaignConfig) -> List[ReplicateTask]:
    motif_key = json.dumps(config.motif_spec, sort_keys=True)
    law_key = json.dumps(config.law_spec, sort_keys=True)
    graphs = Path(config.out_dir) / "graphs"
    return [
        ReplicateTask(
            index=i,
            seed=replicate_seed(config.seed, i),
            n=config.n,
            m=config.m,
            motif_key=motif_key,
            law_key=law_key,
            max_host_size=config.budgets.max_host_size,
            clustering=config.toggles.clustering,
            dump_path=str(graphs / f"replicate_{i:05d}.txt") if config.toggles.dump_graphs else None,
        )
        for i in range(config.replicates)
    ]


def _check_budget(config: CampaignConfig, record: ReplicateRecord) -> None:
    limit = config.budgets.replicate_seconds
    if limit is not None and record.runtime_ms > limit * 1000.0:
        raise BudgetExceeded(f"replicate {record.replicate} took {record.runtime_ms:.0f} ms, budget {limit:g} s")


async def _execute(config: CampaignConfig, tasks: List[ReplicateTask], writer: Optional[ReplicateWriter],
                   norm: Optional[Normalization]) -> Tuple[List[ReplicateRecord], Optional[str]]:
    records: List[ReplicateRecord] = []
    pending: Deque[asyncio.Future] = deque()

    def accept(record: ReplicateRecord) -> None:
        if norm is not None:
            record.normalized = float(normalize([record.report.n_f], norm)[0])
        records.append(record)
        if writer is not None:
            writer.write(record)
        logger.debug("replicate %d: N_F=%d", record.replicate, record.report.n_f)
        _check_budget(config, record)

    try:
        if config.threads == 1:
            for task in tasks:
                accept(run_replicate(task))
        else:
            loop = asyncio.get_running_loop()
            pool = ProcessPoolExecutor(max_workers=config.threads)
            queue = iter(tasks)
            try:
                for task in islice(queue, config.threads * SUBMIT_WINDOW):
                    pending.append(loop.run_in_executor(pool, run_replicate, task))
                # Awaiting in index order makes the writer see replicates in order.
                while pending:
                    record = await pending.popleft()
                    task = next(queue, None)
                    if task is not None:
                        pending.append(loop.run_in_executor(pool, run_replicate, task))
                    accept(record)
            finally:
                for future in pending:
                    future.cancel()
                pool.shutdown(wait=True, cancel_futures=True)
    except (BudgetExceeded, HostTooLarge) as e:
        logger.warning("campaign %s truncated after %d replicates: %s", config.name, len(records), e)
        return records, str(e)
    return records, None


def _reference_s_f_star(motif: Motif, law: BaseLayerLaw, m: int, batches: int,
                        rng: np.random.Generator) -> np.ndarray:
    """Independent draws of S_F* = N*_{F,1} + ... + N*_{F,m}."""
    out = np.empty(batches)
    for b in range(batches):
        xs, qs = law.sample_many(rng, m)
        out[b] = math.fsum(n_f_star_many(motif, xs, qs).tolist())
    return out


def _normal_diagnostics(result: CampaignResult) -> None:
    sigma = result.sigma
    if sigma is None or sigma.degenerate or result.completed < 1:
        return
    scale = math.sqrt(sigma.value) * math.sqrt(result.config.m)
    out: Dict[str, Any] = {}
    for name in ("n_f", "s_tilde", "s_f_star"):
        values = result.column(name)
        z = (values - values.mean()) / scale
        out[f"ks_{name}"] = ks_one_sample_normal(z)
        if name == "n_f":
            result.qq = qq_points(z)
    diag = TailDiagnostics(hill_estimate=None, k_order=None, ks_distance=out["ks_n_f"], qq_points=result.qq)
    result.diagnostics.update({
        "regime": Regime.NORMAL.value,
        "sigma_f": math.sqrt(sigma.value),
        "sigma_f_squared_std_error": sigma.std_error,
        "centering": "sample_mean",
        "scale": scale,
        **diag.to_dict(),
        **out,
    })


def _stable_diagnostics(result: CampaignResult) -> None:
    config = result.config
    norm = result.normalization
    if norm is None or result.completed < 1:
        return
    reference = _reference_s_f_star(config.motif, config.law, config.m, config.reference_size,
                                    stream_rng(config.seed, REFERENCE_STREAM))
    ref_norm = normalize(reference, norm)
    n_f_norm = normalize(result.column("n_f"), norm)
    s_tilde_norm = normalize(result.column("s_tilde"), norm)

    pooled = np.concatenate([np.asarray(r.n_f_star_values) for r in result.records])
    try:
        k = default_k_order(int(np.count_nonzero(pooled > 0)))
        hill = hill_estimator(pooled, k)
    except SupergraphError as e:
        logger.warning("Hill estimate unavailable: %s", e)
        hill, k = None, None
    sensitivity = {}
    if k is not None:
        sensitivity = hill_sensitivity(pooled, sorted({max(2, k // 2), k, 2 * k}))

    result.qq = qq_points(n_f_norm, ref_norm)
    diag = TailDiagnostics(hill_estimate=hill, k_order=k, ks_distance=ks_two_sample(n_f_norm, ref_norm),
                           qq_points=result.qq)

    fit = fit_stable_reference(ref_norm, config.alpha, stream_rng(config.seed, CMS_STREAM))
    cms = sample_positive_stable(config.alpha, fit.scale, max(config.reference_size, 1000),
                                 stream_rng(config.seed, CMS_STREAM + 1), loc=fit.loc)
    result.diagnostics.update({
        **norm.to_dict(),
        **diag.to_dict(),
        "hill_sensitivity": sensitivity,
        "ks_s_tilde": ks_two_sample(s_tilde_norm, ref_norm),
        "reference_batch": config.reference_size,
        "cms_diagnostic": {**fit.to_dict(), "ks_n_f": ks_two_sample(n_f_norm, cms)},
    })


def _h_f_diagnostic(result: CampaignResult) -> None:
    config = result.config
    try:
        estimate = expected_poly_star(config.motif, config.n, config.m, config.law)
    except (TooManyEdges, NonConvergent) as e:
        result.diagnostics["h_f"] = {"error": str(e)}
        return
    poly = _moments(result.column("poly_star"))
    z = None
    if poly["std_error"]:
        z = (poly["mean"] - estimate.expected_poly_star) / poly["std_error"]
    result.diagnostics["h_f"] = {
        "h_f": estimate.h_f,
        "partitions": estimate.partitions,
        "predicted_poly_star": estimate.expected_poly_star,
        "empirical_poly_star_mean": poly["mean"],
        "empirical_poly_star_std_error": poly["std_error"],
        "z": z,
    }


def run_tail_transfer(config: CampaignConfig, draws: int = TAIL_TRANSFER_DRAWS,
                      k_order: Optional[int] = TAIL_TRANSFER_K) -> TailTransfer:
    """Hill estimates of N_F and N_F* on single layers G(X, Q), sizes capped at the host budget."""
    if draws < 1:
        raise ConfigInvalid(f"tail transfer needs at least one draw, got {draws}")
    rng = stream_rng(config.seed, TAIL_STREAM)
    n_f, n_f_star = single_layer_samples(config.motif, config.law, draws, rng,
                                         truncation=config.budgets.max_host_size)
    transfer = tail_transfer(n_f, n_f_star, k_order)
    logger.info("tail transfer over %d layers, k=%d: N_F %.4g, N_F* %.4g",
                draws, transfer.k_order, transfer.hill_n_f, transfer.hill_n_f_star)
    return transfer


def _tail_transfer_diagnostic(result: CampaignResult) -> None:
    try:
        transfer = run_tail_transfer(result.config)
    except SupergraphError as e:
        result.diagnostics["tail_transfer"] = {"error": str(e)}
        return
    result.diagnostics["tail_transfer"] = {**transfer.to_dict(), "agrees": transfer.agrees()}


def _clustering_diagnostic(result: CampaignResult) -> None:
    values = [r.clustering.value for r in result.records if r.clustering is not None and r.clustering.defined]
    degrees = [r.mean_degree for r in result.records if r.mean_degree is not None]
    result.diagnostics["clustering"] = {
        "mean": float(np.mean(values)) if values else None,
        "defined_replicates": len(values),
        "per_replicate": values,
        "mean_degree": float(np.mean(degrees)) if degrees else None,
    }


async def run_campaign(config: CampaignConfig, persist: bool = True) -> CampaignResult:
    """
    Run every replicate of the campaign and compute its diagnostics. With `persist`,
    replicates.csv in config.out_dir receives each record as soon as it is in order.
    """
    conditions = check_conditions(config)
    mean_star = _mean_n_f_star(config)
    sigma, sigma_error = (None, None)
    if config.regime is Regime.NORMAL:
        sigma, sigma_error = _sigma_prepass(config)
    try:
        norm = _normalization(config, sigma, mean_star)
    except ZeroScale as e:
        logger.warning("normalization unavailable: %s", e)
        norm = None

    tasks = build_tasks(config)
    logger.info("campaign %s: %d replicates, n=%d, m=%d, motif %s, %d worker(s)",
                config.name, len(tasks), config.n, config.m, config.motif.name, config.threads)
    if persist:
        with ReplicateWriter(Path(config.out_dir) / "replicates.csv", config.toggles.timing) as writer:
            records, truncated = await _execute(config, tasks, writer, norm)
    else:
        records, truncated = await _execute(config, tasks, None, norm)

    result = CampaignResult(
        config=config,
        records=records,
        conditions=conditions,
        sigma=sigma,
        sigma_error=sigma_error,
        mean_n_f_star=mean_star,
        normalization=norm,
        truncated=truncated,
    )
    if config.regime is Regime.NORMAL:
        _normal_diagnostics(result)
    elif config.regime is Regime.STABLE:
        _stable_diagnostics(result)
    if config.toggles.h_f and records:
        _h_f_diagnostic(result)
    if config.toggles.clustering:
        _clustering_diagnostic(result)
    if config.toggles.tail_transfer:
        _tail_transfer_diagnostic(result)
    return result


def run_campaign_sync(config: CampaignConfig, persist: bool = True) -> CampaignResult:
    return asyncio.run(run_campaign(config, persist))
