"""
Exact expected number of polychromatic colored copies.

For a 2-connected F on vertex set [v_F], the probability that a fixed labelled copy of F
on a fixed v_F-set is realized with a given polychromatic coloring is

    h_F(n, m) = sum over partitions {B_1..B_r} of E_F with r >= 2 of
                (m)_r * prod_j E[(X~)_{v_j} Q^{b_j}] / (n)_{v_j}

so E[N_F^(poly*)] = C(n, v_F) * a_F * h_F(n, m).
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from utils.combinatorics.partitions import enumerate_partitions
from utils.layers.base_law import BaseLayerLaw
from utils.motifs.motif import Motif

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OverlapEstimate:
    h_f: float
    expected_poly_star: float
    partitions: int
    max_colors: int


def _falling(n: int, k: int) -> int:
    return math.perm(n, k) if n >= k else 0


def h_f_exact(motif: Motif, n: int, m: int, law: BaseLayerLaw, r_max: Optional[int] = None) -> float:
    if n < motif.vertices or m < 2:
        return 0.0
    block_cache: Dict[Tuple[int, int], float] = {}

    def block_term(v: int, b: int) -> float:
        key = (v, b)
        if key not in block_cache:
            denominator = _falling(n, v)
            block_cache[key] = law.factorial_moment(v, b, truncation=n) / denominator if denominator else 0.0
        return block_cache[key]

    total = []
    for partition in enumerate_partitions(motif, r_max):
        colorings = _falling(m, partition.r)
        if colorings == 0:
            continue
        term = float(colorings)
        for block in partition.blocks:
            term *= block_term(block.v, block.b)
            if term == 0.0:
                break
        total.append(term)
    return math.fsum(total)


def expected_poly_star(motif: Motif, n: int, m: int, law: BaseLayerLaw) -> OverlapEstimate:
    """E[N_F^(poly*)] = C(n, v_F) * a_F * h_F(n, m)."""
    count = sum(1 for _ in enumerate_partitions(motif))
    h = h_f_exact(motif, n, m, law)
    expected = math.comb(n, motif.vertices) * motif.a_f * h
    logger.debug("h_F(%d, %d) for %s over %d partitions: %.6g", n, m, motif.name, count, h)
    return OverlapEstimate(h_f=h, expected_poly_star=expected, partitions=count, max_colors=min(m, motif.e_f))
