"""
The verification battery behind `supergraph verify`: exhaustive combinatorial checks
plus randomized count reports compared against the brute-force oracle.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List

import networkx as nx
import numpy as np

from utils.combinatorics.bstar import b_star, b_star_value, verify_b_star_minimality, verify_superadditivity
from utils.combinatorics.partitions import bell_number, enumerate_partitions, verify_clique_partition_bound
from utils.graphs.supergraph import generate_supergraph
from utils.layers.base_law import BaseLayerLaw
from utils.layers.laws import DeterministicLaw, EmpiricalTableLaw, IndependentProductLaw
from utils.layers.marginals import BetaQ, UniformX
from utils.motifs.counting import count_in_graph, count_report
from utils.motifs.motif import Motif, builtin_motif
from utils.motifs.oracle import brute_force_count, brute_force_count_report

logger = logging.getLogger(__name__)

RANDOM_MOTIFS = ("K3", "C4", "K4")
ORACLE_MOTIFS = ("K3", "K4", "K5", "C4", "C5", "C6")
MAX_ORACLE_HOST = 12
PARTITION_MOTIFS = ("K3", "K4", "C4", "C5")


@dataclass
class CheckResult:
    name: str
    problems: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.problems


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def check_h_b_shapes(b_max: int = 200) -> List[str]:
    problems = []
    for b in range(1, b_max + 1):
        info = b_star(b)
        if info.h_b.number_of_edges() != b or info.h_b.number_of_nodes() != info.b_star:
            problems.append(f"b={b}: H_b has {info.h_b.number_of_edges()} edges on {info.h_b.number_of_nodes()} vertices")
    return problems


def check_partition_structure(motif: Motif) -> List[str]:
    problems = []
    count = 0
    for partition in enumerate_partitions(motif):
        count += 1
        if sum(block.b for block in partition.blocks) != motif.e_f:
            problems.append(f"{motif.name}: blocks do not cover the edge set")
        if motif.is_two_connected and not partition.vertex_excess_holds(motif):
            problems.append(f"{motif.name}: vertex excess fails for {[bl.edges for bl in partition.blocks]}")
        for block in partition.blocks:
            if block.b < block.v - block.rho:
                problems.append(f"{motif.name}: block {block.edges} has fewer edges than v - rho")
    expected = bell_number(motif.e_f) - 1
    if count != expected:
        problems.append(f"{motif.name}: {count} partitions, expected Bell({motif.e_f}) - 1 = {expected}")
    return problems


def random_small_law(rng: np.random.Generator, n: int) -> BaseLayerLaw:
    kind = int(rng.integers(3))
    if kind == 0:
        return DeterministicLaw(int(rng.integers(2, n + 3)), float(rng.uniform(0.3, 1.0)))
    if kind == 1:
        return IndependentProductLaw(UniformX(2, n + 2), BetaQ(2.0, 1.0))
    rows = [(int(rng.integers(2, n + 3)), float(rng.uniform(0.2, 1.0)), float(rng.uniform(0.1, 1.0)))
            for _ in range(3)]
    return EmpiricalTableLaw(rows)


def check_random_instances(instances: int, seed: int) -> List[str]:
    rng = np.random.default_rng(seed)
    problems = []
    for i in range(instances):
        n = int(rng.integers(4, 11))
        m = int(rng.integers(1, 5))
        motif = builtin_motif(RANDOM_MOTIFS[int(rng.integers(len(RANDOM_MOTIFS)))])
        law = random_small_law(rng, n)
        g = generate_supergraph(n, m, law, rng)
        fast = count_report(motif, g)
        slow = brute_force_count_report(motif, g)
        if fast != slow:
            problems.append(f"instance {i} ({motif.name}, n={n}, m={m}): kernel {fast.to_dict()} != oracle {slow.to_dict()}")
        problems.extend(f"instance {i}: {p}" for p in fast.violations())
    return problems


def check_random_hosts(hosts: int, seed: int) -> List[str]:
    """Flat counts of every oracle motif on Erdős–Rényi hosts with at most 12 vertices."""
    rng = np.random.default_rng(seed)
    motifs = [builtin_motif(name) for name in ORACLE_MOTIFS]
    problems = []
    for i in range(hosts):
        v = int(rng.integers(4, MAX_ORACLE_HOST + 1))
        host = nx.gnp_random_graph(v, float(rng.uniform(0.25, 0.6)), seed=int(rng.integers(2 ** 31)))
        for motif in motifs:
            fast, slow = count_in_graph(motif, host), brute_force_count(motif, host)
            if fast != slow:
                problems.append(f"host {i} ({v} vertices, {motif.name}): kernel {fast} != oracle {slow}")
    return problems


def verify_all(b_star_fn: Callable[[int], int] = b_star_value, instances: int = 100, seed: int = 20240501,
               hosts: int = 200, report: Callable[[CheckResult], None] = None) -> VerificationReport:
    """Run every check; `report` is called with each result as it completes."""
    battery = [
        ("b* minimality, b <= 15", lambda: verify_b_star_minimality(15, b_star_fn)),
        ("H_b shape, b <= 200", lambda: check_h_b_shapes(200)),
        ("superadditivity, s <= 40", lambda: [f"s={s}, t={t}: {lhs} < {rhs}"
                                              for s, t, lhs, rhs in verify_superadditivity(40, b_star_fn)]),
    ]
    for k in (3, 4, 5):
        battery.append((f"clique partition bound, K{k}", lambda k=k: verify_clique_partition_bound(k, b_star_fn)))
    for name in PARTITION_MOTIFS:
        battery.append((f"partition structure, {name}", lambda name=name: check_partition_structure(builtin_motif(name))))
    battery.append((f"{instances} random count reports vs oracle", lambda: check_random_instances(instances, seed)))
    battery.append((f"{hosts} random hosts vs oracle", lambda: check_random_hosts(hosts, seed)))

    result = VerificationReport()
    for name, check in battery:
        outcome = CheckResult(name=name, problems=list(check()))
        if not outcome.passed:
            logger.warning("%s: %d problem(s), first: %s", name, len(outcome.problems), outcome.problems[0])
        result.checks.append(outcome)
        if report is not None:
            report(outcome)
    return result
