#!/usr/bin/env python3
"""
Tests for single-layer statistics, sigma_F^2, normalizations, stable references and tail diagnostics
"""

import math
import os
import sys

import numpy as np
from scipy import stats

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from utils.errors import (
    AlphaOneUnsupported,
    AlphaOutOfRange,
    DegenerateSample,
    EmptySample,
    InfiniteVariance,
    InsufficientSamples,
    MethodBudgetExceeded,
    ZeroScale,
)
from utils.layers.laws import DeterministicLaw, EmpiricalTableLaw, IndependentProductLaw
from utils.layers.marginals import ConstantQ, UniformX, ZipfX
from utils.limits.conditional import (
    Normalization,
    Regime,
    VarianceMethod,
    check_alpha,
    conditional_stats,
    conditional_variance,
    expected_n_f_star,
    jackknife_variance,
    n_f_star,
    n_f_star_many,
    normalize,
    overlap_pair_counts,
    sigma_f_squared,
    single_layer_samples,
)
from utils.limits.diagnostics import (
    TailDiagnostics,
    default_k_order,
    hill_estimator,
    hill_sensitivity,
    ks_one_sample_normal,
    ks_two_sample,
    qq_points,
    tail_transfer,
)
from utils.limits.stable import fit_stable_reference, sample_positive_stable
from utils.motifs.motif import builtin_motif, cycle


def test_n_f_star_values():
    assert n_f_star(builtin_motif("C4"), 5, 0.5) == 0.9375
    assert n_f_star(builtin_motif("K3"), 2, 0.9) == 0.0
    assert n_f_star(builtin_motif("K3"), 10, 1.0) == 120
    try:
        n_f_star(builtin_motif("K3"), 5, 1.2)
        assert False
    except ValueError:
        pass

    c4 = builtin_motif("C4")
    xs = np.array([0, 3, 4, 5, 9, 20])
    qs = np.array([0.5, 0.5, 0.2, 0.5, 0.7, 0.1])
    many = n_f_star_many(c4, xs, qs)
    for i in range(len(xs)):
        assert abs(many[i] - n_f_star(c4, int(xs[i]), float(qs[i]))) < 1e-9 * max(1.0, many[i])


def test_conditional_stats():
    stats_k3 = conditional_stats(builtin_motif("K3"), 10, 0.5)
    assert stats_k3.n_f_star == 120 * 0.125
    assert abs(stats_k3.psi - 125.0) < 1e-9
    assert abs(stats_k3.phi - 50.0) < 1e-9
    empty = conditional_stats(builtin_motif("K3"), 5, 0.0)
    assert empty.n_f_star == 0.0 and empty.psi is None


def test_expected_n_f_star_matches_sample_mean():
    law = EmpiricalTableLaw([(4, 0.6, 1), (6, 0.4, 1), (8, 0.3, 2)])
    k3 = builtin_motif("K3")
    expected = (4 * 0.216 + 20 * 0.064 + 2 * 56 * 0.027) / 4
    assert abs(expected_n_f_star(k3, law) - expected) < 1e-12
    # Truncation at n = 6 caps the largest layers.
    truncated = (4 * 0.216 + 20 * 0.064 + 2 * 20 * 0.027) / 4
    assert abs(expected_n_f_star(k3, law, truncation=6) - truncated) < 1e-12

    counts, stars = single_layer_samples(k3, law, 20000, np.random.default_rng(14))
    assert counts.shape == stars.shape == (20000,)
    se = counts.std(ddof=1) / math.sqrt(len(counts))
    assert abs(counts.mean() - expected) < 4.5 * se
    assert abs(stars.mean() - expected) < 4.5 * stars.std(ddof=1) / math.sqrt(len(stars))

    _, capped = single_layer_samples(k3, law, 500, np.random.default_rng(1), truncation=6)
    assert capped.max() <= 20 * 0.4 ** 3 + 1e-12


def test_overlap_pair_counts_for_triangles():
    counts = overlap_pair_counts(builtin_motif("K3"))
    assert counts == {3: {3: 1}, 4: {1: 12}}
    c4 = overlap_pair_counts(builtin_motif("C4"))
    assert set(c4) == {4, 5, 6}
    # Three 4-cycles live in K4 and every two of them share exactly two edges.
    assert c4[4] == {2: 6, 4: 3}
    try:
        overlap_pair_counts(cycle(8))
        assert False
    except MethodBudgetExceeded:
        pass


def test_conditional_variance_of_triangles_in_g_4_half():
    assert abs(conditional_variance(builtin_motif("K3"), 4, 0.5) - 0.625) < 1e-12
    assert conditional_variance(builtin_motif("K3"), 2, 0.5) == 0.0
    assert conditional_variance(builtin_motif("K3"), 7, 1.0) == 0.0


def test_sigma_exact_small_fixed_layer():
    estimate = sigma_f_squared(builtin_motif("K3"), DeterministicLaw(4, 0.5))
    assert abs(estimate.value - 0.625) < 1e-12
    assert estimate.method is VarianceMethod.EXACT_SMALL
    assert estimate.std_error == 0.0 and not estimate.degenerate
    assert abs(estimate.mean_n_f - 0.5) < 1e-12


def test_sigma_exact_agrees_with_monte_carlo():
    law = EmpiricalTableLaw([(4, 0.6, 1), (6, 0.4, 1)])
    c4 = builtin_motif("C4")
    exact = sigma_f_squared(c4, law, VarianceMethod.EXACT_SMALL)
    mc = sigma_f_squared(c4, law, VarianceMethod.MONTE_CARLO, samples=20000, rng=np.random.default_rng(21))
    assert mc.method is VarianceMethod.MONTE_CARLO
    assert mc.std_error > 0
    assert abs(mc.value - exact.value) < 4.5 * mc.std_error, (exact.value, mc.value, mc.std_error)
    assert abs(mc.mean_n_f - exact.mean_n_f) < 0.1 * exact.mean_n_f + 0.05


def test_sigma_failures():
    heavy = IndependentProductLaw(ZipfX(2.4), ConstantQ(0.5))
    try:
        sigma_f_squared(builtin_motif("K3"), heavy)
        assert False
    except InfiniteVariance:
        pass
    try:
        sigma_f_squared(builtin_motif("K3"), DeterministicLaw(40, 0.2))
        assert False
    except MethodBudgetExceeded:
        pass
    try:
        sigma_f_squared(builtin_motif("K3"), IndependentProductLaw(UniformX(3, 6), ConstantQ(0.5)), "bogus")
        assert False
    except ValueError:
        pass

    degenerate = sigma_f_squared(builtin_motif("K3"), DeterministicLaw(2, 0.5))
    assert degenerate.degenerate and degenerate.value == 0.0
    assert degenerate.to_dict()["method"] == "exact_small"


def test_jackknife_matches_leave_one_out():
    values = np.array([3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0])
    variance, se = jackknife_variance(values)
    assert abs(variance - np.var(values, ddof=1)) < 1e-12
    loo = np.array([np.var(np.delete(values, i), ddof=1) for i in range(len(values))])
    expected_se = math.sqrt((len(values) - 1) / len(values) * np.sum((loo - loo.mean()) ** 2))
    assert abs(se - expected_se) < 1e-9

    assert jackknife_variance([2.0, 2.0, 2.0, 2.0]) == (0.0, 0.0)
    try:
        jackknife_variance([1.0, 2.0])
        assert False
    except InsufficientSamples:
        pass


def test_normal_normalization():
    norm = Normalization.normal(sigma_f=2.0, m=4, mean_n_f_star=3.0)
    assert norm.regime is Regime.NORMAL
    assert (norm.b_m, norm.scale) == (12.0, 4.0)
    assert list(normalize([16.0, 8.0], norm)) == [1.0, -1.0]
    assert norm.to_dict()["sigma_f"] == 2.0

    try:
        normalize([1.0], Normalization.normal(0.0, 4, 1.0))
        assert False
    except ZeroScale:
        pass


def test_stable_normalization():
    light = Normalization.stable(0.8, 256)
    assert light.b_m == 0.0
    assert abs(light.scale - 1024.0) < 1e-9
    assert abs(normalize([512.0], light)[0] - 0.5) < 1e-12

    centered = Normalization.stable(1.5, 8, mean_n_f_star=2.0)
    assert centered.b_m == 16.0
    assert abs(centered.scale - 4.0) < 1e-12
    try:
        Normalization.stable(1.5, 8)
        assert False
    except ValueError:
        pass


def test_alpha_validation():
    for alpha, error in ((1.0, AlphaOneUnsupported), (0.0, AlphaOutOfRange), (2.0, AlphaOutOfRange), (-1, AlphaOutOfRange)):
        try:
            check_alpha(alpha)
            assert False, alpha
        except error:
            pass
    check_alpha(0.8)
    check_alpha(1.7)


def test_positive_stable_draws():
    rng = np.random.default_rng(9)
    draws = sample_positive_stable(0.7, 1.0, 50000, rng)
    assert draws.min() >= 0.0
    alpha_hat = hill_estimator(draws, 500)
    assert 0.55 < alpha_hat < 0.85, alpha_hat

    a = sample_positive_stable(0.7, 1.0, 100, np.random.default_rng(3))
    b = sample_positive_stable(0.7, 1.0, 100, np.random.default_rng(3))
    assert np.array_equal(a, b)
    for args in ((0.7, 1.0, 0), (0.7, -1.0, 10), (1.0, 1.0, 10)):
        try:
            sample_positive_stable(*args, rng)
            assert False, args
        except (ValueError, AlphaOneUnsupported):
            pass


def test_fit_stable_reference_recovers_scale_and_location():
    rng = np.random.default_rng(10)
    sample = 2.0 + 3.0 * sample_positive_stable(0.8, 1.0, 20000, rng)
    fit = fit_stable_reference(sample, 0.8, np.random.default_rng(11))
    assert fit.empirical
    assert abs(fit.scale - 3.0) < 0.35, fit
    assert abs(fit.loc - 2.0) < 0.6, fit
    assert fit.to_dict()["alpha"] == 0.8
    try:
        fit_stable_reference([], 0.8, rng)
        assert False
    except EmptySample:
        pass


def test_hill_estimator_on_known_samples():
    # threshold 2, log-spacings log 2 + log 4 = 3 log 2.
    assert abs(hill_estimator([1.0, 2.0, 4.0, 8.0], 2) - 2 / (3 * math.log(2))) < 1e-12
    assert abs(hill_estimator([-5.0, 0.0, 1.0, 2.0, 4.0, 8.0], 2) - 2 / (3 * math.log(2))) < 1e-12

    rng = np.random.default_rng(2)
    pareto = rng.pareto(2.4, 100000) + 1.0
    assert abs(hill_estimator(pareto, 5000) - 2.4) < 0.15

    try:
        hill_estimator([1.0, 5.0, 5.0, 5.0], 2)
        assert False
    except DegenerateSample:
        pass
    for samples, k in (([1.0, 2.0, 3.0], 1), ([1.0, 2.0], 2), ([0.0, 0.0, 0.0, 1.0], 2)):
        try:
            hill_estimator(samples, k)
            assert False, (samples, k)
        except InsufficientSamples:
            pass

    assert default_k_order(1000) == 63
    assert default_k_order(1) == 2
    sensitivity = hill_sensitivity([1.0, 2.0, 4.0, 8.0, 16.0], [2, 3, 10])
    assert set(sensitivity) == {2, 3}


def test_ks_distances():
    a = [0.1, 0.4, 0.7]
    assert ks_two_sample(a, a) == 0.0
    assert ks_two_sample([1.0, 2.0], [5.0, 6.0]) == 1.0
    rng = np.random.default_rng(6)
    assert ks_one_sample_normal(rng.standard_normal(5000)) < 0.035
    assert ks_one_sample_normal(rng.standard_normal(5000) + 1.0) > 0.3
    for bad in (lambda: ks_two_sample([], a), lambda: ks_one_sample_normal([])):
        try:
            bad()
            assert False
        except EmptySample:
            pass


def test_qq_points():
    points = qq_points([1.0, 2.0, 3.0, 4.0, 5.0], count=3)
    assert len(points) == 3
    assert abs(points[1][0]) < 1e-12 and points[1][1] == 3.0
    assert abs(points[0][0] - stats.norm.ppf(0.25)) < 1e-12

    against = qq_points([1.0, 2.0, 3.0], reference=[10.0, 20.0, 30.0], count=1)
    assert against == [(20.0, 2.0)]

    diag = TailDiagnostics(hill_estimate=0.8, k_order=63, ks_distance=0.05, qq_points=against)
    assert diag.to_dict() == {"ks": 0.05, "hill": {"estimate": 0.8, "k": 63}, "qq": [[20.0, 2.0]]}


def test_single_layer_tails_of_n_f_and_n_f_star_agree():
    # N_F* = C(X,3)/8 has tail index gamma/3 = 0.8; the simulated triangle counts share it.
    law = IndependentProductLaw(ZipfX(2.4), ConstantQ(0.5))
    n_f, star = single_layer_samples(builtin_motif("K3"), law, 100_000, np.random.default_rng(8080))
    transfer = tail_transfer(n_f, star, k_order=100)
    assert transfer.draws == 100_000 and transfer.k_order == 100
    assert 0.45 < transfer.hill_n_f_star < 1.15
    assert 0.45 < transfer.hill_n_f < 1.15
    assert transfer.agrees(0.15), transfer.to_dict()


def test_tail_transfer_gap():
    pareto = (1.0 - (np.arange(1, 2001) - 0.5) / 2000) ** (-1.0 / 0.8)
    same = tail_transfer(pareto, pareto, k_order=200)
    assert same.relative_gap == 0.0 and same.agrees()

    heavier = tail_transfer(pareto ** 2, pareto, k_order=200)
    assert abs(heavier.relative_gap - 0.5) < 1e-12
    assert not heavier.agrees(0.15)
    assert heavier.to_dict()["k"] == 200

    defaulted = tail_transfer(pareto, pareto)
    assert defaulted.k_order == default_k_order(2000)


if __name__ == '__main__':
    tests = [v for k, v in list(globals().items()) if k.startswith('test_') and callable(v)]
    for test in tests:
        test()
        print(f"✅ {test.__name__}")
    print(f"✅ {len(tests)} limit-theory tests passed")
