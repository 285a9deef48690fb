"""
Copy enumeration and counting of a motif F in host graphs.

A copy is a subgraph of the host isomorphic to F, identified by its edge set, so each copy
is produced exactly once. Cliques and cycles have dedicated kernels; any other F goes
through monomorphism search, keeping one embedding per automorphism orbit.
"""

import math
from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Iterator, List, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from utils.errors import HostTooLarge, NotTwoConnected
from utils.graphs.supergraph import ColoredMultigraph
from utils.motifs.motif import Motif

DEFAULT_MAX_HOST_SIZE = 10_000

Edge = Tuple[int, int]
Copy = Tuple[Edge, ...]


@dataclass(frozen=True)
class CountReport:
    n_f: int
    per_layer: Tuple[int, ...]
    s_tilde: int
    mono: int
    poly: int
    poly_star: int

    def violations(self) -> List[str]:
        found = []
        if self.n_f != self.mono + self.poly:
            found.append(f"n_f={self.n_f} != mono+poly={self.mono + self.poly}")
        if not self.mono <= self.s_tilde <= self.mono + self.poly_star:
            found.append(f"sandwich mono={self.mono} <= s_tilde={self.s_tilde} <= "
                         f"mono+poly_star={self.mono + self.poly_star} fails")
        if abs(self.s_tilde - self.n_f) > self.poly_star:
            found.append(f"|s_tilde - n_f|={abs(self.s_tilde - self.n_f)} > poly_star={self.poly_star}")
        if self.s_tilde != sum(self.per_layer):
            found.append("s_tilde differs from the sum of per-layer counts")
        return found

    def assert_invariants(self) -> None:
        problems = self.violations()
        if problems:
            raise AssertionError("count report invariants violated: " + "; ".join(problems))

    def to_dict(self):
        d = asdict(self)
        d["per_layer"] = list(self.per_layer)
        return d


@dataclass(frozen=True)
class ClusteringResult:
    value: float
    defined: bool
    triangles: int
    wedges: int


def _clique_vertex_sets(host: nx.Graph, k: int) -> Iterator[Tuple[int, ...]]:
    # Orient every edge towards the endpoint of higher (degree, label) rank, then grow
    # cliques by intersecting forward neighbourhoods.
    rank = {v: i for i, v in enumerate(sorted(host.nodes, key=lambda v: (host.degree(v), v)))}
    forward = {v: {u for u in host[v] if rank[u] > rank[v]} for v in host.nodes}

    def extend(members: Tuple[int, ...], candidates: set) -> Iterator[Tuple[int, ...]]:
        if len(members) == k:
            yield tuple(sorted(members))
            return
        if len(members) + len(candidates) < k:
            return
        for u in sorted(candidates, key=rank.__getitem__):
            yield from extend(members + (u,), candidates & forward[u])

    for v in sorted(host.nodes, key=rank.__getitem__):
        if len(forward[v]) >= k - 1:
            yield from extend((v,), forward[v])


def _cycle_sequences(host: nx.Graph, k: int) -> Iterator[Tuple[int, ...]]:
    # Each cycle is reported once: from its smallest vertex, in the direction whose second
    # vertex is smaller than its last.
    for start in sorted(host.nodes):
        path = [start]
        on_path = {start}

        def walk() -> Iterator[Tuple[int, ...]]:
            last = path[-1]
            if len(path) == k:
                if start in host[last] and path[1] < path[-1]:
                    yield tuple(path)
                return
            for w in sorted(host[last]):
                if w > start and w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    yield from walk()
                    path.pop()
                    on_path.discard(w)

        yield from walk()


def _general_embeddings(motif: Motif, host: nx.Graph) -> Iterator[Tuple[int, ...]]:
    automorphisms = motif.automorphisms
    matcher = GraphMatcher(host, motif.graph)
    for mapping in matcher.subgraph_monomorphisms_iter():
        image = [0] * motif.vertices
        for host_vertex, pattern_vertex in mapping.items():
            image[pattern_vertex] = host_vertex
        phi = tuple(image)
        # Keep the lexicographically smallest embedding of each copy.
        if all(phi <= tuple(phi[s[i]] for i in range(motif.vertices)) for s in automorphisms):
            yield phi


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def iter_copies(motif: Motif, host: nx.Graph, max_host_size: int = DEFAULT_MAX_HOST_SIZE) -> Iterator[Copy]:
    """Yield every copy of F in the host as a sorted tuple of host edges."""
    if motif.shape == "clique":
        for members in _clique_vertex_sets(host, motif.vertices):
            yield tuple(combinations(members, 2))
    elif motif.shape == "cycle":
        for seq in _cycle_sequences(host, motif.vertices):
            yield tuple(sorted(_edge(seq[i], seq[(i + 1) % len(seq)]) for i in range(len(seq))))
    else:
        if motif.vertices >= 5 and host.number_of_nodes() > max_host_size:
            raise HostTooLarge(f"host has {host.number_of_nodes()} vertices; general-motif budget is {max_host_size}")
        yield from general_copies(motif, host)


def general_copies(motif: Motif, host: nx.Graph) -> Iterator[Copy]:
    """Copies found by monomorphism search; valid for any F, cliques and cycles included."""
    for phi in _general_embeddings(motif, host):
        yield tuple(sorted(_edge(phi[u], phi[v]) for u, v in motif.edges))


def count_in_graph(motif: Motif, host: nx.Graph, max_host_size: int = DEFAULT_MAX_HOST_SIZE) -> int:
    if motif.shape == "clique" and motif.vertices == 3:
        return sum(nx.triangles(host).values()) // 3
    if motif.shape == "clique":
        return sum(1 for _ in _clique_vertex_sets(host, motif.vertices))
    return sum(1 for _ in iter_copies(motif, host, max_host_size))


def count_report(motif: Motif, g: ColoredMultigraph, max_host_size: int = DEFAULT_MAX_HOST_SIZE) -> CountReport:
    """
    Flat count N_F with its monochromatic / polychromatic split, per-layer counts and the
    number of polychromatic colored copies in the multigraph.

    A flat copy is monochromatic when every one of its edges carries exactly one color and
    that color is the same for all edges. For a flat copy whose edges carry color sets
    C_1..C_e, the colorings using two or more colors number prod |C_j| minus the number of
    colors common to all C_j.
    """
    if not motif.is_two_connected:
        raise NotTwoConnected(f"{motif.name} is not 2-connected")

    per_layer = tuple(count_in_graph(motif, layer.graph(), max_host_size) for layer in g.layers)
    n_f = mono = poly_star = 0
    for copy in iter_copies(motif, g.flat, max_host_size):
        n_f += 1
        color_sets = [g.edge_colors[e] for e in copy]
        common = frozenset.intersection(*color_sets)
        colorings = math.prod(len(c) for c in color_sets)
        if colorings == 1 and common:
            mono += 1
        poly_star += colorings - len(common)

    return CountReport(
        n_f=n_f,
        per_layer=per_layer,
        s_tilde=sum(per_layer),
        mono=mono,
        poly=n_f - mono,
        poly_star=poly_star,
    )


def clustering_coefficient(host: nx.Graph) -> ClusteringResult:
    """3 * triangles / wedges; undefined (NaN, defined=False) when the host has no wedge."""
    triangles = sum(nx.triangles(host).values()) // 3
    wedges = sum(math.comb(d, 2) for _, d in host.degree)
    if wedges == 0:
        return ClusteringResult(value=math.nan, defined=False, triangles=triangles, wedges=0)
    return ClusteringResult(value=3 * triangles / wedges, defined=True, triangles=triangles, wedges=wedges)

