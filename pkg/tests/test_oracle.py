"""Brute-force oracle, capped perturbations, and the resilience falsifier."""

import numpy as np
import pytest

from kcenter_resilience import (
    BudgetExceeded,
    CapTooTight,
    StabilityParams,
    brute_force_optimal,
    build_lemma1_perturbation,
    cost,
    falsify_resilience,
    farthest_first,
    sample_perturbation,
    snap_up,
    validate_instance,
    voronoi_partition,
)
from kcenter_resilience.generators import gen_planted_symmetric, gen_random_metric


def test_oracle_k_equals_n():
    inst = gen_random_metric(5, "symmetric", 1)
    res = brute_force_optimal(inst.dist, 5)
    assert res.optimal_radius == 0.0
    assert res.optimal_center_sets == ((0, 1, 2, 3, 4),)
    assert res.partition_unique


def test_oracle_two_points_k1():
    res = brute_force_optimal(np.array([[0.0, 1.0], [1.0, 0.0]]), 1)
    assert res.optimal_radius == 1.0
    assert res.optimal_center_sets == ((0,), (1,))
    assert res.partition_unique  # one cluster either way


def test_oracle_planted_matches_truth():
    planted = gen_planted_symmetric(12, 3, 1.0, 2.0, 7)
    res = brute_force_optimal(planted.instance.dist, 3)
    assert res.optimal_radius <= planted.truth.radius
    got = res.clustering(planted.instance.dist)
    assert got.canonical_partition() == planted.truth.canonical_partition()


def test_oracle_radius_lower_bounds_every_center_set():
    inst = gen_random_metric(9, "asymmetric", 3)
    res = brute_force_optimal(inst.dist, 2)
    rng = np.random.default_rng(0)
    for _ in range(20):
        pick = sorted(rng.choice(9, size=2, replace=False))
        assert res.optimal_radius <= cost(inst, pick)


def test_oracle_budget_exceeded():
    inst = gen_random_metric(30, "symmetric", 0)
    with pytest.raises(BudgetExceeded):
        brute_force_optimal(inst.dist, 10, budget=1000)


def test_capped_perturbation_alpha_one_is_identity():
    inst = gen_random_metric(6, "symmetric", 2)
    r = brute_force_optimal(inst.dist, 2).optimal_radius
    p, q = np.argwhere((inst.dist <= r) & (inst.dist > 0))[0]
    pert = build_lemma1_perturbation(inst, r, 1.0, [(int(p), int(q))])
    assert np.array_equal(pert.dprime, inst.dist)
    assert pert.bounds_ok()


def test_capped_perturbation_no_caps_is_uniform_scaling():
    inst = gen_random_metric(7, "symmetric", 5)
    r = brute_force_optimal(inst.dist, 2).optimal_radius
    pert = build_lemma1_perturbation(inst, r, 1.5, [])
    assert np.array_equal(pert.dprime, 1.5 * inst.dist)
    assert brute_force_optimal(pert.dprime, 2).optimal_radius == 1.5 * r


def test_capped_perturbation_rejects_overlong_pairs():
    d = np.array([[0.0, 5.0], [5.0, 0.0]])
    inst = validate_instance(d, "symmetric")
    with pytest.raises(CapTooTight):
        build_lemma1_perturbation(inst, 1.0, 2.0, [(0, 1)])  # 5 > 2*1


def test_capping_an_approximation_makes_it_optimal():
    # cap (c(p), p) for an approximation's centers: those centers become
    # optimal under dprime at cost exactly alpha * r*
    planted = gen_planted_symmetric(10, 2, 1.0, 2.0, 4)
    inst = planted.instance
    res = brute_force_optimal(inst.dist, 2)
    r = res.optimal_radius
    centers = farthest_first(inst, 2)
    cl = voronoi_partition(inst, centers)
    pairs = [(centers[cl.assignment[p]], p) for p in range(inst.n)]
    pert = build_lemma1_perturbation(inst, r, 2.0, pairs)
    res2 = brute_force_optimal(pert.dprime, 2)
    assert res2.optimal_radius == 2.0 * r
    assert tuple(sorted(centers)) in res2.optimal_center_sets


def test_sample_perturbation_deterministic_and_bounded():
    inst = gen_random_metric(12, "asymmetric", 8)
    a = sample_perturbation(inst, 1.7, seed=42)
    b = sample_perturbation(inst, 1.7, seed=42)
    assert np.array_equal(a.dprime, b.dprime)
    assert a.bounds_ok()
    assert np.all(a.dprime >= inst.dist)
    assert np.all(a.dprime <= 1.7 * inst.dist + 1e-12)
    assert np.array_equal(sample_perturbation(inst, 1.0, 0).dprime, inst.dist)


def _weakly_separated(gap):
    pts = np.array([0.0, 1.0, 1.0 + gap, 2.0 + gap])
    d = snap_up(np.abs(pts[:, None] - pts[None, :]))
    np.fill_diagonal(d, 0.0)
    return validate_instance(d, "symmetric")


def test_falsifier_epsilon_one_never_falsifies():
    inst = _weakly_separated(1.1)
    res = falsify_resilience(inst, 2, StabilityParams(2.0, 1.0), budget=50)
    assert res.status == "none-found"


def test_falsifier_finds_counterexample_on_weak_separation():
    inst = _weakly_separated(1.1)
    res = falsify_resilience(inst, 2, StabilityParams(2.0, 0.0), budget=100)
    assert res.status == "falsified"
    assert res.perturbation.bounds_ok()
    assert res.eps_dist > 0.0
    assert res.violating_clustering.canonical_partition() != \
        res.opt_clustering.canonical_partition()


def test_falsifier_none_found_on_planted():
    planted = gen_planted_symmetric(10, 2, 1.0, 2.0, 3)
    res = falsify_resilience(planted.instance, 2, StabilityParams(2.0, 0.0),
                             budget=40)
    assert res.status == "none-found"
    assert res.tried == 40


def test_falsifier_budget_exceeded_distinct():
    planted = gen_planted_symmetric(10, 2, 1.0, 2.0, 3)
    res = falsify_resilience(planted.instance, 2, StabilityParams(2.0, 0.0),
                             budget=3)
    assert res.status == "budget-exceeded"
