#!/usr/bin/env python3
"""
Tests for layer and superposition generation
"""

import io
import math
import os
import sys
from itertools import combinations

import networkx as nx
import numpy as np
from scipy import stats

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from utils.graphs.supergraph import (
    ColoredMultigraph,
    degree_sequence,
    dump_supergraph,
    generate_layer,
    generate_supergraph,
    load_supergraph,
    max_layer_overflow,
    mean_degree,
)
from utils.layers.laws import DeterministicLaw, EmpiricalTableLaw, IndependentProductLaw
from utils.layers.marginals import ConstantQ, UniformX, ZipfX


def test_layer_edges_stay_inside_vertex_set():
    rng = np.random.default_rng(3)
    for q in (0.05, 0.5, 1.0):
        layer = generate_layer(20, 0, 8, q, rng)
        assert len(layer.vertex_set) == 8
        assert list(layer.vertex_set) == sorted(set(layer.vertex_set))
        inside = set(layer.vertex_set)
        for u, v in layer.edges:
            assert u < v
            assert u in inside and v in inside
        assert len(set(layer.edges)) == len(layer.edges)


def test_layer_extremes():
    rng = np.random.default_rng(4)
    full = generate_layer(10, 2, 6, 1.0, rng)
    assert len(full.edges) == 15
    assert full.color == 2

    empty = generate_layer(10, 0, 6, 0.0, rng)
    assert empty.edges == ()
    assert len(empty.vertex_set) == 6

    nothing = generate_layer(10, 0, 0, 0.7, rng)
    assert nothing.vertex_set == () and nothing.edges == ()


def test_oversized_layer_is_truncated_and_reported():
    rng = np.random.default_rng(5)
    g = generate_supergraph(6, 3, DeterministicLaw(9, 1.0), rng)
    for layer in g.layers:
        assert layer.x_drawn == 9
        assert len(layer.vertex_set) == 6
    assert max_layer_overflow(g) == 3
    assert g.flat.number_of_edges() == 15
    # Every flat edge is covered by all three complete layers.
    assert all(colors == frozenset({0, 1, 2}) for colors in g.edge_colors.values())
    assert g.multi_edge_count() == 45


def test_layer_vertex_subsets_are_uniform():
    rng = np.random.default_rng(606)
    index = {subset: i for i, subset in enumerate(combinations(range(6), 3))}
    counts = np.zeros(len(index))
    for _ in range(100_000):
        counts[index[generate_layer(6, 0, 3, 0.5, rng).vertex_set]] += 1
    assert len(index) == 20
    assert stats.chisquare(counts).pvalue > 0.001


def test_layers_are_independent():
    rng = np.random.default_rng(607)
    pairs = list(combinations(range(6), 2))
    draws = 20_000
    first = np.zeros((draws, len(pairs)))
    second = np.zeros((draws, len(pairs)))
    for d in range(draws):
        g = generate_supergraph(6, 2, DeterministicLaw(4, 0.5), rng)
        for row, layer in ((first, g.layers[0]), (second, g.layers[1])):
            for edge in layer.edges:
                row[d, pairs.index(edge)] = 1.0
    # Each indicator is Bernoulli(C(4,2)/C(6,2) * 0.5 = 0.2); the correlation SE is about 1/sqrt(draws).
    assert np.all(np.abs(first.mean(axis=0) - 0.2) < 4.5 * math.sqrt(0.16 / draws))
    bound = 4.5 / math.sqrt(draws)
    for j in range(len(pairs)):
        assert abs(np.corrcoef(first[:, j], second[:, j])[0, 1]) < bound, pairs[j]
    assert abs(np.corrcoef(first.sum(axis=1), second.sum(axis=1))[0, 1]) < bound


def test_flat_pair_inclusion_probability():
    # A pair lies in a layer's 4-subset of [8] with probability C(6,2)/C(8,4) = 3/14 and is then
    # open with probability 0.7, independently over the four layers.
    p = 1.0 - (1.0 - (3.0 / 14.0) * 0.7) ** 4
    rng = np.random.default_rng(608)
    draws = 20_000
    pairs = list(combinations(range(8), 2))
    hits = np.zeros(len(pairs))
    edge_counts = np.zeros(draws)
    multi_counts = np.zeros(draws)
    for d in range(draws):
        g = generate_supergraph(8, 4, DeterministicLaw(4, 0.7), rng)
        for edge in g.flat.edges:
            hits[pairs.index(tuple(sorted(edge)))] += 1
        edge_counts[d] = g.flat.number_of_edges()
        multi_counts[d] = g.multi_edge_count()
    assert np.all(np.abs(hits / draws - p) < 4.5 * math.sqrt(p * (1 - p) / draws))
    se = edge_counts.std() / math.sqrt(draws)
    assert abs(edge_counts.mean() - 28 * p) < 4.5 * se
    assert abs(multi_counts.mean() - 4 * 6 * 0.7) < 4.5 * multi_counts.std() / math.sqrt(draws)


def test_overflow_frequency_matches_size_tail():
    n, m, draws = 5, 50, 2000
    x_law = ZipfX(2.4)
    xs, ps = x_law.head(n + 1)
    tail = 1.0 - math.fsum(ps)
    law = IndependentProductLaw(x_law, ConstantQ(0.0))
    rng = np.random.default_rng(609)
    overflow = np.array([max_layer_overflow(generate_supergraph(n, m, law, rng)) for _ in range(draws)])
    # Overflow counts are Binomial(m, P{X > n}).
    assert abs(overflow.mean() - m * tail) < 4.5 * math.sqrt(m * tail * (1 - tail) / draws)


def test_invalid_layer_arguments():
    rng = np.random.default_rng(0)
    for args in ((0, 0, 3, 0.5), (5, 0, -1, 0.5), (5, 0, 3, 1.5)):
        try:
            generate_layer(*args, rng)
            assert False, f"{args} should be rejected"
        except ValueError:
            pass
    try:
        generate_supergraph(5, 0, DeterministicLaw(3, 0.5), rng)
        assert False
    except ValueError:
        pass


def test_dense_layer_triangle_mean():
    # G(30, 0.2): E triangles = C(30,3) p^3 = 32.48, Var ~ 116.4, so SE over 2000 draws ~ 0.24.
    rng = np.random.default_rng(2024)
    counts = []
    for _ in range(2000):
        g = generate_layer(30, 0, 30, 0.2, rng).graph()
        counts.append(sum(nx.triangles(g).values()) // 3)
    assert abs(np.mean(counts) - 32.48) < 1.0


def test_sparse_layer_edge_mean():
    # Below the skipping threshold: 435 pairs at q = 0.1, SE over 2000 draws ~ 0.14.
    rng = np.random.default_rng(7)
    sizes = [len(generate_layer(30, 0, 30, 0.1, rng).edges) for _ in range(2000)]
    assert abs(np.mean(sizes) - 43.5) < 0.6


def test_flat_graph_and_colors_agree():
    rng = np.random.default_rng(8)
    law = IndependentProductLaw(UniformX(3, 8), ConstantQ(0.6))
    g = generate_supergraph(15, 6, law, rng)
    assert g.m == 6
    assert nx.is_frozen(g.flat)
    assert g.flat.number_of_nodes() == 15
    assert set(g.edge_colors) == {tuple(sorted(e)) for e in g.flat.edges}
    assert g.multi_edge_count() == sum(len(layer.edges) for layer in g.layers)
    for layer in g.layers:
        for edge in layer.edges:
            assert layer.color in g.edge_colors[edge]

    degrees = degree_sequence(g)
    assert len(degrees) == 15
    assert sum(degrees) == 2 * g.flat.number_of_edges()
    assert abs(mean_degree(g) - np.mean(degrees)) < 1e-12


def test_generation_is_reproducible_per_seed():
    law = EmpiricalTableLaw([(4, 0.5, 1), (7, 0.3, 1)])
    a = generate_supergraph(12, 5, law, np.random.default_rng(99))
    b = generate_supergraph(12, 5, law, np.random.default_rng(99))
    c = generate_supergraph(12, 5, law, np.random.default_rng(100))
    assert a == b
    assert a.edge_colors == b.edge_colors
    assert a != c


def test_dump_and_load():
    rng = np.random.default_rng(12)
    g = generate_supergraph(10, 4, IndependentProductLaw(UniformX(2, 12), ConstantQ(0.45)), rng)
    buffer = io.StringIO()
    dump_supergraph(g, buffer, seed=1234)
    text = buffer.getvalue()
    assert text.startswith("10 4 1234\n")
    assert "layer 1 " in text and "layer 0 " not in text

    loaded, seed = load_supergraph(io.StringIO(text))
    assert seed == 1234
    assert isinstance(loaded, ColoredMultigraph)
    assert loaded == g
    assert loaded.edge_colors == g.edge_colors
    assert max_layer_overflow(loaded) == max_layer_overflow(g)


def test_load_rejects_bad_dumps():
    for text in ("3 1 -\nlayer 1 2 0.5\nv 1 2\nx 1 2\n", "3 2 -\nlayer 1 2 0.5\nv 1 2\n"):
        try:
            load_supergraph(io.StringIO(text))
            assert False, f"{text!r} should be rejected"
        except ValueError:
            pass


if __name__ == '__main__':
    tests = [v for k, v in list(globals().items()) if k.startswith('test_') and callable(v)]
    for test in tests:
        test()
        print(f"✅ {test.__name__}")
    print(f"✅ {len(tests)} supergraph tests passed")
