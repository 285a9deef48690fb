"""
Pattern graphs F: structural analysis, built-in motifs and density functionals.

Vertices are 0-indexed internally; every text format (motif files, inline config text)
is 1-indexed.
"""

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Any, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from utils.errors import MalformedMotif

MAX_MOTIF_VERTICES = 10

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Motif:
    name: str
    vertices: int
    edges: Tuple[Edge, ...]
    e_f: int
    aut_order: int
    a_f: int
    m_f: Fraction
    is_two_connected: bool
    is_balanced: bool
    max_degree: int
    shape: str                # "clique", "cycle" or "general"

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.vertices))
        g.add_edges_from(self.edges)
        return nx.freeze(g)

    @cached_property
    def automorphisms(self) -> Tuple[Tuple[int, ...], ...]:
        """All automorphisms as permutations perm[i] = image of vertex i."""
        matcher = GraphMatcher(self.graph, self.graph)
        perms = [tuple(m[i] for i in range(self.vertices)) for m in matcher.isomorphisms_iter()]
        return tuple(sorted(perms))

    @property
    def density(self) -> Fraction:
        return Fraction(self.e_f, self.vertices)

    def to_dict(self):
        return {
            "name": self.name,
            "v_f": self.vertices,
            "e_f": self.e_f,
            "edges": [[u + 1, v + 1] for u, v in self.edges],
            "a_f": self.a_f,
            "aut_order": self.aut_order,
            "m_f": str(self.m_f),
            "is_two_connected": self.is_two_connected,
            "is_balanced": self.is_balanced,
            "max_degree": self.max_degree,
        }


@dataclass(frozen=True)
class DensityFunctionals:
    psi: float
    phi: float
    m_f: float


def _validate_edges(vertices: int, edges: Iterable[Sequence[int]]) -> Tuple[Edge, ...]:
    seen = set()
    for edge in edges:
        if len(edge) != 2:
            raise MalformedMotif(f"edge {edge!r} does not have two endpoints")
        u, v = int(edge[0]), int(edge[1])
        if not (0 <= u < vertices and 0 <= v < vertices):
            raise MalformedMotif(f"edge ({u + 1}, {v + 1}) has an endpoint outside [1, {vertices}]")
        if u == v:
            raise MalformedMotif(f"self-loop at vertex {u + 1}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise MalformedMotif(f"duplicate edge ({key[0] + 1}, {key[1] + 1})")
        seen.add(key)
    return tuple(sorted(seen))


def _is_two_connected(g: nx.Graph) -> bool:
    if not nx.is_connected(g):
        return False
    for v in g.nodes:
        rest = g.subgraph([u for u in g.nodes if u != v])
        if rest.number_of_nodes() and not nx.is_connected(rest):
            return False
    return True


def _max_subgraph_density(g: nx.Graph) -> Fraction:
    # The maximum of e_H / v_H is attained on an induced subgraph.
    best = Fraction(0)
    nodes = list(g.nodes)
    for size in range(2, len(nodes) + 1):
        for subset in combinations(nodes, size):
            e = g.subgraph(subset).number_of_edges()
            if e and Fraction(e, size) > best:
                best = Fraction(e, size)
    return best


def _shape(vertices: int, edges: Tuple[Edge, ...], g: nx.Graph) -> str:
    if len(edges) == vertices * (vertices - 1) // 2 and vertices >= 2:
        return "clique"
    if vertices >= 3 and len(edges) == vertices and nx.is_connected(g) and all(d == 2 for _, d in g.degree):
        return "cycle"
    return "general"


def analyze_motif(vertices: int, edges: Iterable[Sequence[int]], name: Optional[str] = None) -> Motif:
    """Analyze a simple pattern graph on vertices 0..vertices-1."""
    if int(vertices) != vertices or vertices < 2:
        raise MalformedMotif(f"a motif needs at least 2 vertices, got {vertices}")
    if vertices > MAX_MOTIF_VERTICES:
        raise MalformedMotif(f"motifs with more than {MAX_MOTIF_VERTICES} vertices are not supported")
    vertices = int(vertices)
    edges = _validate_edges(vertices, edges)

    g = nx.Graph()
    g.add_nodes_from(range(vertices))
    g.add_edges_from(edges)

    shape = _shape(vertices, edges, g)
    if shape == "clique":
        aut_order = math.factorial(vertices)
    elif shape == "cycle":
        aut_order = 2 * vertices
    else:
        aut_order = sum(1 for _ in GraphMatcher(g, g).isomorphisms_iter())

    m_f = _max_subgraph_density(g)
    e_f = len(edges)
    return Motif(
        name=name or f"F[{vertices}v,{e_f}e]",
        vertices=vertices,
        edges=edges,
        e_f=e_f,
        aut_order=aut_order,
        a_f=math.factorial(vertices) // aut_order,
        m_f=m_f,
        is_two_connected=_is_two_connected(g),
        is_balanced=e_f > 0 and Fraction(e_f, vertices) == m_f,
        max_degree=max((d for _, d in g.degree), default=0),
        shape=shape,
    )


def clique(k: int) -> Motif:
    return analyze_motif(k, combinations(range(k), 2), name=f"K{k}")


def cycle(k: int) -> Motif:
    return analyze_motif(k, [(i, (i + 1) % k) for i in range(k)], name=f"C{k}")


BUILTIN_PATTERN = re.compile(r"^([KC])(\d+)$")


def builtin_motif(name: str) -> Motif:
    """Built-in names K3..K7 and C3..C9."""
    match = BUILTIN_PATTERN.match(name.strip().upper())
    if not match:
        raise MalformedMotif(f"unknown built-in motif {name!r}")
    family, k = match.group(1), int(match.group(2))
    if family == "K" and 3 <= k <= 7:
        return clique(k)
    if family == "C" and 3 <= k <= 9:
        return cycle(k)
    raise MalformedMotif(f"built-in motif {name!r} is out of range (K3..K7, C3..C9)")


def parse_motif_text(text: str, name: Optional[str] = None) -> Motif:
    """`v_F` on the first line, then one 1-indexed `u v` edge per line; '#' starts a comment."""
    lines = [line.split("#", 1)[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise MalformedMotif("empty motif text")
    try:
        vertices = int(lines[0])
        edges: List[Edge] = []
        for line in lines[1:]:
            u, v = line.split()
            edges.append((int(u) - 1, int(v) - 1))
    except ValueError as e:
        raise MalformedMotif(f"Failed to parse motif text: {e}")
    return analyze_motif(vertices, edges, name=name)


def parse_motif(spec: Any) -> Motif:
    """Accepts a built-in name, inline motif text, a {vertices, edges} mapping or {file: path}."""
    if isinstance(spec, Motif):
        return spec
    if isinstance(spec, str):
        if "\n" in spec:
            return parse_motif_text(spec)
        if os.path.isfile(spec):
            with open(spec) as f:
                return parse_motif_text(f.read(), name=os.path.splitext(os.path.basename(spec))[0])
        return builtin_motif(spec)
    if isinstance(spec, dict):
        if "file" in spec:
            return parse_motif(str(spec["file"]))
        if "vertices" in spec and "edges" in spec:
            edges = [(int(u) - 1, int(v) - 1) for u, v in spec["edges"]]
            return analyze_motif(spec["vertices"], edges, name=spec.get("name"))
    raise MalformedMotif(f"unrecognized motif spec {spec!r}")


def density_functionals(motif: Motif, n: float, p: float) -> DensityFunctionals:
    """Psi_F = n^v p^e and Phi_F = min of Psi_H over subgraphs H with at least one edge."""
    if n <= 0 or not 0 < p <= 1:
        raise ValueError(f"density functionals need n > 0 and p in (0, 1], got n={n}, p={p}")
    psi = float(n) ** motif.vertices * float(p) ** motif.e_f
    g = motif.graph
    phi = math.inf
    # For a vertex set S the smallest Psi_H uses every induced edge, since p <= 1.
    for size in range(2, motif.vertices + 1):
        for subset in combinations(range(motif.vertices), size):
            e = g.subgraph(subset).number_of_edges()
            if e:
                phi = min(phi, float(n) ** size * float(p) ** e)
    return DensityFunctionals(psi=psi, phi=phi, m_f=float(motif.m_f))
