"""
Superposition random graphs: m independent Bernoulli layers G(X~_i, Q_i), each placed on a
uniform random vertex subset of [n], kept both as a flat simple graph and as a colored
multigraph (the set of layer colors carried by every flat edge).
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, TextIO, Tuple

import networkx as nx
import numpy as np

from utils.layers.base_law import BaseLayerLaw

# Below this edge probability layers are drawn by geometric skipping over the pair list.
SPARSE_Q = 0.25

Edge = Tuple[int, int]


@dataclass(frozen=True)
class LayerRealization:
    color: int
    vertex_set: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    x_drawn: int
    q_drawn: float

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertex_set)
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True)
class ColoredMultigraph:
    n: int
    layers: Tuple[LayerRealization, ...]
    flat: nx.Graph = field(compare=False, repr=False)
    edge_colors: Dict[Edge, FrozenSet[int]] = field(compare=False, repr=False)

    @classmethod
    def from_layers(cls, n: int, layers: Sequence[LayerRealization]) -> "ColoredMultigraph":
        flat, edge_colors = flatten(n, layers)
        return cls(n=n, layers=tuple(layers), flat=flat, edge_colors=edge_colors)

    @property
    def m(self) -> int:
        return len(self.layers)

    def multi_edge_count(self) -> int:
        """Edges of the colored multigraph, parallel edges counted separately."""
        return sum(len(colors) for colors in self.edge_colors.values())


def flatten(n: int, layers: Sequence[LayerRealization]) -> Tuple[nx.Graph, Dict[Edge, FrozenSet[int]]]:
    colors: Dict[Edge, set] = {}
    for layer in layers:
        for edge in layer.edges:
            colors.setdefault(edge, set()).add(layer.color)
    flat = nx.Graph()
    flat.add_nodes_from(range(n))
    flat.add_edges_from(sorted(colors))
    edge_colors = {edge: frozenset(c) for edge, c in sorted(colors.items())}
    return nx.freeze(flat), edge_colors


def _bernoulli_pair_indices(pairs: int, q: float, rng: np.random.Generator) -> np.ndarray:
    if pairs == 0 or q <= 0.0:
        return np.empty(0, dtype=np.int64)
    if q >= 1.0:
        return np.arange(pairs, dtype=np.int64)
    if q >= SPARSE_Q:
        return np.flatnonzero(rng.random(pairs) < q)

    # Geometric skipping: the gap to the next open pair is Geometric(q).
    chunks: List[np.ndarray] = []
    current = -1
    while True:
        batch = rng.geometric(q, size=int((pairs - current) * q * 1.2) + 16)
        steps = current + np.cumsum(batch)
        inside = steps[steps < pairs]
        chunks.append(inside)
        if len(inside) < len(steps):
            break
        current = int(steps[-1])
    return np.concatenate(chunks).astype(np.int64)


def generate_layer(n: int, color: int, x: int, q: float, rng: np.random.Generator) -> LayerRealization:
    """Draw G(min{x, n}, q) on a uniform random min{x, n}-subset of [n]."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if x < 0 or not 0.0 <= q <= 1.0:
        raise ValueError(f"layer type needs x >= 0 and q in [0, 1], got x={x}, q={q}")
    size = min(int(x), n)
    vertices = np.sort(rng.choice(n, size=size, replace=False)) if size else np.empty(0, dtype=np.int64)

    pairs = size * (size - 1) // 2
    picked = _bernoulli_pair_indices(pairs, float(q), rng)
    edges: Tuple[Edge, ...] = ()
    if len(picked):
        rows, cols = np.triu_indices(size, 1)
        us = vertices[rows[picked]]
        vs = vertices[cols[picked]]
        edges = tuple(zip(us.tolist(), vs.tolist()))

    return LayerRealization(
        color=int(color),
        vertex_set=tuple(vertices.tolist()),
        edges=edges,
        x_drawn=int(x),
        q_drawn=float(q),
    )


def generate_supergraph(n: int, m: int, law: BaseLayerLaw, rng: np.random.Generator) -> ColoredMultigraph:
    if n < 1 or m < 1:
        raise ValueError(f"n and m must be positive, got n={n}, m={m}")
    xs, qs = law.sample_many(rng, m)
    layers = [generate_layer(n, i, int(xs[i]), float(qs[i]), rng) for i in range(m)]
    return ColoredMultigraph.from_layers(n, layers)


def max_layer_overflow(g: ColoredMultigraph) -> int:
    """Number of layers whose drawn size exceeded n (so the layer was truncated)."""
    return sum(1 for layer in g.layers if layer.x_drawn > g.n)


def degree_sequence(g: ColoredMultigraph) -> List[int]:
    return [d for _, d in sorted(g.flat.degree)]


def mean_degree(g: ColoredMultigraph) -> float:
    return sum(degree_sequence(g)) / g.n


def dump_supergraph(g: ColoredMultigraph, out: TextIO, seed: Optional[int] = None) -> None:
    """Line format, 1-indexed: `n m seed`, then per layer `layer c x q`, `v ...`, `e u v`."""
    out.write(f"{g.n} {g.m} {seed if seed is not None else '-'}\n")
    for layer in g.layers:
        out.write(f"layer {layer.color + 1} {layer.x_drawn} {layer.q_drawn:.17g}\n")
        out.write("v" + "".join(f" {v + 1}" for v in layer.vertex_set) + "\n")
        for u, v in layer.edges:
            out.write(f"e {u + 1} {v + 1}\n")


def load_supergraph(src: TextIO) -> Tuple[ColoredMultigraph, Optional[int]]:
    header = src.readline().split()
    n, m = int(header[0]), int(header[1])
    seed = None if header[2] == "-" else int(header[2])

    layers: List[LayerRealization] = []
    current = None

    def close(fields):
        fields["edges"] = tuple(fields["edges"])
        layers.append(LayerRealization(**fields))

    for line in src:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "layer":
            if current is not None:
                close(current)
            current = {"color": int(parts[1]) - 1, "x_drawn": int(parts[2]), "q_drawn": float(parts[3]),
                       "vertex_set": (), "edges": []}
        elif parts[0] == "v":
            current["vertex_set"] = tuple(int(v) - 1 for v in parts[1:])
        elif parts[0] == "e":
            current["edges"].append((int(parts[1]) - 1, int(parts[2]) - 1))
        else:
            raise ValueError(f"unrecognized graph dump line: {line.strip()!r}")
    if current is not None:
        close(current)
    if len(layers) != m:
        raise ValueError(f"graph dump declares {m} layers but holds {len(layers)}")
    return ColoredMultigraph.from_layers(n, layers), seed
