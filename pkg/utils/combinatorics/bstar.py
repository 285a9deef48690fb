"""
b*, the fewest vertices a graph with b edges can have, and its extremal graph H_b:
the clique K_{k_b} plus a new vertex joined to delta_b of the clique's vertices.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations, count
from typing import Callable, List, Optional, Tuple

import networkx as nx


@dataclass(frozen=True)
class BStar:
    b: int
    k_b: int
    delta_b: int
    b_star: int
    h_b: nx.Graph = field(compare=False, repr=False)


def _k_b(b: int) -> int:
    k = int((1 + math.isqrt(1 + 8 * b)) // 2)
    while math.comb(k + 1, 2) <= b:
        k += 1
    while math.comb(k, 2) > b:
        k -= 1
    return k


def b_star_value(b: int) -> int:
    if b < 1:
        raise ValueError(f"b must be positive, got {b}")
    k = _k_b(b)
    return k if math.comb(k, 2) == b else k + 1


def b_star(b: int) -> BStar:
    if b < 1:
        raise ValueError(f"b must be positive, got {b}")
    k = _k_b(b)
    delta = b - math.comb(k, 2)
    h = nx.complete_graph(k)
    if delta:
        h.add_edges_from((k, j) for j in range(delta))
    return BStar(b=b, k_b=k, delta_b=delta, b_star=k if delta == 0 else k + 1, h_b=nx.freeze(h))


def find_covering_graph(v: int, b: int) -> Optional[nx.Graph]:
    """
    A graph with b edges on vertices 0..v-1 and no isolated vertex, found by depth-first
    search over edge subsets of K_v in lexicographic order; None if there is none.
    """
    pairs = list(combinations(range(v), 2))
    chosen: List[Tuple[int, int]] = []
    degree = [0] * v

    def extend(start: int) -> bool:
        need = b - len(chosen)
        uncovered = degree.count(0)
        if need == 0:
            return uncovered == 0
        if 2 * need < uncovered:
            return False
        for i in range(start, len(pairs) - need + 1):
            u, w = pairs[i]
            chosen.append(pairs[i])
            degree[u] += 1
            degree[w] += 1
            if extend(i + 1):
                return True
            chosen.pop()
            degree[u] -= 1
            degree[w] -= 1
        return False

    if not extend(0):
        return None
    g = nx.Graph()
    g.add_nodes_from(range(v))
    g.add_edges_from(chosen)
    return g


def brute_force_min_vertices(b: int) -> int:
    """Smallest v carrying a b-edge graph without isolated vertices, by search over edge subsets."""
    if b < 1:
        raise ValueError(f"b must be positive, got {b}")
    for v in count(2):
        if find_covering_graph(v, b) is not None:
            return v
    raise AssertionError("unreachable")


def verify_b_star_minimality(b_max: int = 15, b_star_fn: Callable[[int], int] = b_star_value) -> List[str]:
    problems = []
    for b in range(1, b_max + 1):
        expected = brute_force_min_vertices(b)
        got = b_star_fn(b)
        if got != expected:
            problems.append(f"b={b}: b*={got}, brute force finds {expected}")
        h = b_star(b).h_b
        if h.number_of_edges() != b or h.number_of_nodes() != expected:
            problems.append(f"b={b}: H_b has {h.number_of_edges()} edges on {h.number_of_nodes()} vertices")
    return problems


def verify_superadditivity(s_max: int, b_star_fn: Callable[[int], int] = b_star_value) -> List[Tuple[int, int, int, int]]:
    """All (s, t, s*+t*, (s+t-1)*+2) with 1 <= t <= s <= s_max where s*+t* < (s+t-1)*+2."""
    if s_max < 2:
        raise ValueError(f"s_max must be at least 2, got {s_max}")
    found = []
    for s in range(1, s_max + 1):
        for t in range(1, s + 1):
            lhs = b_star_fn(s) + b_star_fn(t)
            rhs = b_star_fn(s + t - 1) + 2
            if lhs < rhs:
                found.append((s, t, lhs, rhs))
    return found
