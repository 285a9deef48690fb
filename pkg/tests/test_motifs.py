#!/usr/bin/env python3
"""
Tests for motif analysis, parsing and the density functionals
"""

import math
import os
import sys
import tempfile
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from utils.errors import MalformedMotif
from utils.motifs.motif import (
    analyze_motif,
    builtin_motif,
    clique,
    cycle,
    density_functionals,
    parse_motif,
    parse_motif_text,
)

DIAMOND_EDGES = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]


def test_clique_invariants():
    k3 = builtin_motif("K3")
    assert (k3.vertices, k3.e_f, k3.aut_order, k3.a_f) == (3, 3, 6, 1)
    assert k3.shape == "clique" and k3.is_two_connected and k3.is_balanced
    assert k3.m_f == Fraction(1)

    k5 = clique(5)
    assert k5.e_f == 10 and k5.a_f == 1 and k5.max_degree == 4
    assert k5.m_f == Fraction(2)


def test_cycle_invariants():
    c4 = builtin_motif("c4")
    assert c4.name == "C4"
    assert (c4.aut_order, c4.a_f) == (8, 3)
    assert c4.shape == "cycle" and c4.is_balanced

    c7 = cycle(7)
    assert c7.aut_order == 14
    assert c7.a_f == math.factorial(7) // 14


def test_diamond_is_general_and_balanced():
    diamond = analyze_motif(4, DIAMOND_EDGES, name="diamond")
    assert diamond.shape == "general"
    assert diamond.aut_order == 4
    assert diamond.a_f == 6
    assert len(diamond.automorphisms) == 4
    assert diamond.m_f == Fraction(5, 4)
    assert diamond.is_balanced and diamond.is_two_connected
    assert diamond.max_degree == 3


def test_clique_with_pendant_path_is_unbalanced():
    edges = [(i, j) for i in range(5) for j in range(i + 1, 5)] + [(0, 5), (5, 6)]
    motif = analyze_motif(7, edges)
    assert motif.m_f == Fraction(2)
    assert motif.density == Fraction(12, 7)
    assert not motif.is_balanced
    assert not motif.is_two_connected
    assert motif.aut_order == 24
    assert motif.name == "F[7v,12e]"


def test_path_is_not_two_connected():
    path = analyze_motif(4, [(0, 1), (1, 2), (2, 3)])
    assert not path.is_two_connected
    assert path.is_balanced and path.m_f == Fraction(3, 4)


def test_malformed_motifs():
    bad = [
        (1, []),
        (11, [(0, 1)]),
        (3, [(0, 0)]),
        (3, [(0, 1), (1, 0)]),
        (3, [(0, 3)]),
        (3, [(0, 1, 2)]),
    ]
    for vertices, edges in bad:
        try:
            analyze_motif(vertices, edges)
            assert False, f"{vertices}, {edges} should be rejected"
        except MalformedMotif:
            pass
    for name in ("K8", "C2", "P4", ""):
        try:
            builtin_motif(name)
            assert False, f"{name!r} should be rejected"
        except MalformedMotif:
            pass


def test_parse_motif_text_is_one_indexed():
    motif = parse_motif_text("# four-cycle\n4\n1 2\n2 3  # middle\n3 4\n4 1\n", name="square")
    assert motif.name == "square"
    assert motif.shape == "cycle"
    assert motif.edges == ((0, 1), (0, 3), (1, 2), (2, 3))
    for text in ("", "3\n1 2 3\n", "x\n1 2\n"):
        try:
            parse_motif_text(text)
            assert False, f"{text!r} should be rejected"
        except MalformedMotif:
            pass


def test_parse_motif_accepts_every_form():
    assert parse_motif("K4").e_f == 6
    assert parse_motif("3\n1 2\n2 3\n1 3").shape == "clique"
    diamond = parse_motif({"vertices": 4, "edges": [[u + 1, v + 1] for u, v in DIAMOND_EDGES], "name": "diamond"})
    assert diamond.a_f == 6 and diamond.name == "diamond"
    assert parse_motif(diamond) is diamond

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "diamond.txt")
        with open(path, "w") as f:
            f.write("4\n1 2\n1 3\n2 3\n2 4\n3 4\n")
        from_file = parse_motif({"file": path})
        assert from_file.name == "diamond"
        assert from_file.aut_order == 4

    try:
        parse_motif(42)
        assert False
    except MalformedMotif:
        pass


def test_to_dict_round_trips_through_parse():
    diamond = analyze_motif(4, DIAMOND_EDGES, name="diamond")
    info = diamond.to_dict()
    assert info["edges"][0] == [1, 2]
    assert info["m_f"] == "5/4"
    again = parse_motif({"vertices": info["v_f"], "edges": info["edges"], "name": info["name"]})
    assert again == diamond


def test_density_functionals_for_triangle():
    values = density_functionals(builtin_motif("K3"), 10, 0.5)
    assert abs(values.psi - 125.0) < 1e-9
    # The cheapest subgraph is a single edge: 10^2 * 0.5.
    assert abs(values.phi - 50.0) < 1e-9
    assert values.m_f == 1.0
    # Balanced motifs satisfy Phi_F >= min{Psi_F^(2/v_F), Psi_F}.
    assert values.phi >= min(values.psi ** (2 / 3), values.psi)

    for n, p in ((0, 0.5), (10, 0.0), (10, 1.5)):
        try:
            density_functionals(builtin_motif("K3"), n, p)
            assert False, f"n={n}, p={p} should be rejected"
        except ValueError:
            pass


def test_balanced_lower_bound_holds_across_densities():
    for motif in (builtin_motif("K4"), builtin_motif("C5"), analyze_motif(4, DIAMOND_EDGES)):
        for n in (5, 50, 500):
            for p in (0.01, 0.2, 0.9):
                values = density_functionals(motif, n, p)
                bound = min(values.psi ** (2 / motif.vertices), values.psi)
                assert values.phi >= bound * (1 - 1e-12), (motif.name, n, p)


if __name__ == '__main__':
    tests = [v for k, v in list(globals().items()) if k.startswith('test_') and callable(v)]
    for test in tests:
        test()
        print(f"✅ {test.__name__}")
    print(f"✅ {len(tests)} motif tests passed")
