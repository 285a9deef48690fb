"""Brute-force reference enumerators; slow by construction, used only to check the kernels."""

from itertools import combinations, product
from typing import FrozenSet, Iterator, List, Set, Tuple

import networkx as nx

from utils.graphs.supergraph import ColoredMultigraph
from utils.motifs.counting import CountReport
from utils.motifs.motif import Motif

Edge = Tuple[int, int]


def _bijections_onto(motif: Motif, host: nx.Graph, subset: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
    # Pattern vertices are placed in order; a partial map stops at its first missing host edge.
    earlier = [[u for u in motif.graph[w] if u < w] for w in range(motif.vertices)]
    image: List[int] = []

    def place(free: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        w = len(image)
        if w == motif.vertices:
            yield tuple(image)
            return
        for i, x in enumerate(free):
            if all(host.has_edge(image[u], x) for u in earlier[w]):
                image.append(x)
                yield from place(free[:i] + free[i + 1:])
                image.pop()

    yield from place(subset)


def brute_force_copies(motif: Motif, host: nx.Graph) -> Set[FrozenSet[Edge]]:
    """Every v_F-subset of host vertices times every bijection from F onto it."""
    copies = set()
    for subset in combinations(sorted(host.nodes), motif.vertices):
        for image in _bijections_onto(motif, host, subset):
            copies.add(frozenset((min(image[u], image[v]), max(image[u], image[v])) for u, v in motif.edges))
    return copies


def brute_force_count(motif: Motif, host: nx.Graph) -> int:
    return len(brute_force_copies(motif, host))


def brute_force_count_report(motif: Motif, g: ColoredMultigraph) -> CountReport:
    """Count report from exhaustive copy and coloring enumeration."""
    layer_edge_sets = [set(layer.edges) for layer in g.layers]
    per_layer = tuple(brute_force_count(motif, layer.graph()) for layer in g.layers)

    copies = brute_force_copies(motif, g.flat)
    mono = poly_star = 0
    for copy in copies:
        edges = sorted(copy)
        single_colored = all(len(g.edge_colors[e]) == 1 for e in edges)
        inside_layer = any(copy <= layer_edges for layer_edges in layer_edge_sets)
        if single_colored and inside_layer:
            mono += 1
        for coloring in product(*(sorted(g.edge_colors[e]) for e in edges)):
            if len(set(coloring)) >= 2:
                poly_star += 1

    return CountReport(
        n_f=len(copies),
        per_layer=per_layer,
        s_tilde=sum(per_layer),
        mono=mono,
        poly=len(copies) - mono,
        poly_star=poly_star,
    )
