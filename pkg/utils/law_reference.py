#!/usr/bin/env python3
"""
Campaign Config Format Reference

This file documents how each block of a campaign config is written.
Use this reference when writing configs to make sure laws and motifs parse.

Schema version: 1
"""

SCHEMA_VERSION = 1

LAW_FORMATS = {
    "deterministic": {
        "description": "Every layer has the same size and edge probability",
        "format": "{kind: deterministic, x: INT, q: FLOAT}",
        "examples": {
            "normal regime": {"kind": "deterministic", "x": 5, "q": 0.3},
            "h_F identity": {"kind": "deterministic", "x": 4, "q": 0.7},
        },
        "notes": [
            "x is a nonnegative integer, q lies in [0, 1]",
            "Finitely supported, so the exact_small variance method applies when x <= 30",
        ]
    },

    "independent_product": {
        "description": "X and Q drawn independently from their own marginals",
        "format": "{kind: independent_product, x: X_BLOCK, q: Q_BLOCK}",
        "examples": {
            "stable regime": {
                "kind": "independent_product",
                "x": {"family": "zipf", "gamma": 2.4, "x_min": 1},
                "q": {"family": "constant", "value": 0.5},
            },
            "two sizes": {
                "kind": "independent_product",
                "x": {"family": "table", "values": [3, 6], "weights": [0.5, 0.5]},
                "q": {"family": "constant", "value": 0.5},
            },
        },
        "notes": [
            "Moment conditions reduce to products E[X^s] E[Q^t]",
            "The stable checker compares gamma with alpha * v_F",
        ]
    },

    "power_law_coupled": {
        "description": "Q = min{1, b * X^(-beta)}; larger layers are sparser",
        "format": "{kind: power_law_coupled, x: X_BLOCK, coupling: {b: FLOAT, beta: FLOAT}}",
        "examples": {
            "clustering": {
                "kind": "power_law_coupled",
                "x": {"family": "zipf", "gamma": 3.0, "x_min": 1},
                "coupling": {"b": 1.0, "beta": 0.5},
            },
        },
        "notes": [
            "b >= 0 and beta >= 0",
            "Q is a deterministic function of X, so atoms exist only for bounded X",
        ]
    },

    "empirical_table": {
        "description": "Joint (x, q, weight) atoms",
        "format": "{kind: empirical_table, table: [[x, q, weight], ...]}",
        "examples": {
            "mixed": {"kind": "empirical_table", "table": [[3, 0.5, 1], [6, 0.25, 3]]},
        },
        "notes": [
            "Weights are normalized on load",
        ]
    },
}

X_FAMILIES = {
    "constant": "{family: constant, value: INT}",
    "zipf": "{family: zipf, gamma: FLOAT, x_min: INT}  P{X = k} proportional to k^(-gamma-1) for k >= x_min",
    "uniform": "{family: uniform, low: INT, high: INT}  inclusive bounds",
    "table": "{family: table, values: [INT, ...], weights: [FLOAT, ...]}",
}

Q_FAMILIES = {
    "constant": "{family: constant, value: FLOAT}",
    "beta": "{family: beta, a: FLOAT, b: FLOAT}",
    "table": "{family: table, values: [FLOAT, ...], weights: [FLOAT, ...]}",
}

MOTIF_FORMATS = {
    "builtin": "K3..K7 cliques, C3..C9 cycles, e.g. motif: K3",
    "inline": "first line v_F, then one 1-indexed edge 'u v' per line, '#' starts a comment",
    "mapping": "{vertices: INT, edges: [[u, v], ...], name: STR}  1-indexed",
    "file": "{file: PATH}  inline format stored in a file",
}

CAMPAIGN_KEYS = {
    "schema_version": "must equal SCHEMA_VERSION when present",
    "name": "campaign label, default 'campaign'",
    "n": "vertex count",
    "m": "layer count (exactly one of m, nu)",
    "nu": "layers per vertex, m = round(nu * n)",
    "motif": "see MOTIF_FORMATS",
    "law": "see LAW_FORMATS",
    "replicates": "R >= 1",
    "regime": "normal | stable | none",
    "alpha": "stable regime only, in (0, 2) and not 1",
    "seed": "64-bit master seed; SUPERGRAPH_SEED overrides",
    "out_dir": "output directory, default runs/<name>",
    "threads": "worker processes; SUPERGRAPH_THREADS overrides",
    "budgets": "{max_host_size: INT, replicate_seconds: FLOAT}",
    "toggles": "{dump_graphs, h_f, clustering, timing}: booleans",
    "sigma": "{method: exact_small | monte_carlo, samples: INT}",
    "reference_batch": "number of independent S_F* draws for the stable comparison, default R",
}
