"""Edge-set partitions of a motif into color classes, and the clique partition bound."""

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from utils.combinatorics.bstar import b_star_value
from utils.errors import KOutOfBudget, TooManyEdges
from utils.motifs.motif import Motif, clique

MAX_PARTITION_EDGES = 12

Edge = Tuple[int, int]


@dataclass(frozen=True)
class PartitionBlock:
    edges: Tuple[Edge, ...]
    b: int          # edges in the block
    v: int          # vertices touched by the block
    rho: int        # connected components of (V_j, B_j)


@dataclass(frozen=True)
class EdgePartition:
    blocks: Tuple[PartitionBlock, ...]

    @property
    def r(self) -> int:
        return len(self.blocks)

    def vertex_excess_holds(self, motif: Motif) -> bool:
        """sum v_j >= v_F + sum rho_j, which holds whenever F is 2-connected."""
        return sum(bl.v for bl in self.blocks) >= motif.vertices + sum(bl.rho for bl in self.blocks)


@dataclass(frozen=True)
class EdgePartitionColoring:
    partition: EdgePartition
    colors: Tuple[int, ...]

    def __post_init__(self):
        if len(self.colors) != self.partition.r or len(set(self.colors)) != len(self.colors):
            raise ValueError("a partition coloring assigns pairwise distinct colors, one per block")


def block_stats(edges: Sequence[Edge]) -> PartitionBlock:
    g = nx.Graph()
    g.add_edges_from(edges)
    return PartitionBlock(
        edges=tuple(edges),
        b=len(edges),
        v=g.number_of_nodes(),
        rho=nx.number_connected_components(g),
    )


def restricted_growth_strings(size: int, max_blocks: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Set partitions of range(size) as restricted growth strings, in lexicographic order."""
    if size == 0:
        yield ()
        return
    labels = [0] * size
    limit = max_blocks if max_blocks is not None else size

    def fill(i: int, top: int) -> Iterator[Tuple[int, ...]]:
        if i == size:
            yield tuple(labels)
            return
        for label in range(min(top + 2, limit)):
            labels[i] = label
            yield from fill(i + 1, max(top, label))

    yield from fill(1, 0)


def enumerate_partitions(motif: Motif, r_max: Optional[int] = None) -> Iterator[EdgePartition]:
    """Every partition of E_F into r >= 2 nonempty blocks (r <= r_max when given)."""
    if motif.e_f > MAX_PARTITION_EDGES:
        raise TooManyEdges(f"{motif.name} has {motif.e_f} edges; partitions are enumerated up to {MAX_PARTITION_EDGES}")
    edges = motif.edges
    for rgs in restricted_growth_strings(len(edges), r_max):
        r = max(rgs, default=-1) + 1
        if r < 2:
            continue
        blocks = [[] for _ in range(r)]
        for edge, label in zip(edges, rgs):
            blocks[label].append(edge)
        yield EdgePartition(blocks=tuple(block_stats(b) for b in blocks))


def iter_colorings(partition: EdgePartition, m: int) -> Iterator[EdgePartitionColoring]:
    for colors in permutations(range(m), partition.r):
        yield EdgePartitionColoring(partition=partition, colors=colors)


def verify_clique_partition_bound(k: int, b_star_fn: Callable[[int], int] = b_star_value) -> List[str]:
    """
    For every partition of E(K_k) into r >= 2 blocks:
    sum b_j* >= (kappa - (r - 1))* + 2(r - 1) >= k + r, where kappa = C(k, 2).
    """
    if not 3 <= k <= 5:
        raise KOutOfBudget(f"clique partition bound is checked exhaustively for 3 <= k <= 5, got {k}")
    kappa = math.comb(k, 2)
    problems = []
    for partition in enumerate_partitions(clique(k)):
        r = partition.r
        lhs = sum(b_star_fn(block.b) for block in partition.blocks)
        middle = b_star_fn(kappa - (r - 1)) + 2 * (r - 1)
        if not lhs >= middle >= k + r:
            sizes = [block.b for block in partition.blocks]
            problems.append(f"K{k} blocks {sizes}: {lhs} >= {middle} >= {k + r} fails")
    return problems


def bell_number(size: int) -> int:
    row = [1]
    for _ in range(size):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]

