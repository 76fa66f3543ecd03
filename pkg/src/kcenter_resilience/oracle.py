"""Ground-truth machinery: exhaustive solving, perturbations, falsification.

The brute-force solver is the reference against which every algorithm is
checked.  Perturbation builders follow the capped-pair construction that
makes the optimal cost under d' exactly alpha * r*.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .core import (Clustering, Instance, StabilityParams, _as_table,
                   epsilon_distance, voronoi_partition)

DEFAULT_SUBSET_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    pass


class CapTooTight(ValueError):
    """A capped pair has d(p,q) > alpha * r*, so the cap would lower d."""

    def __init__(self, p, q, value, bound):
        self.p, self.q = p, q
        super().__init__(f"cannot cap ({p},{q}): d={value} > alpha*r*={bound}")


@dataclass(frozen=True, eq=False)
class Perturbation:
    """An alpha-perturbation d' of a base instance: d <= d' <= alpha*d.

    d' need not be a metric.
    """

    base: Instance
    alpha: float
    dprime: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(self.dprime, dtype=float)
        d.flags.writeable = False
        object.__setattr__(self, "dprime", d)

    def bounds_ok(self) -> bool:
        d = self.base.dist
        return bool(np.all(self.dprime >= d) and np.all(self.dprime <= self.alpha * d))


@dataclass(frozen=True)
class OracleResult:
    optimal_radius: float
    optimal_center_sets: tuple  # every k-subset attaining the optimum
    partition_unique: bool      # all optimal sets induce the same partition

    def clustering(self, table) -> Clustering:
        """Voronoi partition of the lexicographically first optimal set."""
        return voronoi_partition(table, self.optimal_center_sets[0])


def brute_force_optimal(table, k: int, budget: int = DEFAULT_SUBSET_BUDGET) -> OracleResult:
    """Enumerate every k-subset of centers and return the exact optimum.

    Works on any square nonnegative table, including non-metric
    perturbations.  Subsets are enumerated lexicographically; all
    minimizers are retained.
    """
    d = _as_table(table)
    n = d.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    total = comb(n, k)
    if total > budget:
        raise BudgetExceeded(f"C({n},{k}) = {total} exceeds budget {budget}")
    best = np.inf
    minimizers = []
    for subset in itertools.combinations(range(n), k):
        c = d[list(subset)].min(axis=0).max()
        if c < best:
            best = c
            minimizers = [subset]
        elif c == best:
            minimizers.append(subset)
    partitions = {voronoi_partition(d, s).canonical_partition() for s in minimizers}
    return OracleResult(optimal_radius=float(best),
                        optimal_center_sets=tuple(minimizers),
                        partition_unique=len(partitions) == 1)


def build_lemma1_perturbation(instance, r_star: float, alpha: float,
                              capped_pairs) -> Perturbation:
    """Scale every distance by alpha, capping the given pairs at alpha*r*.

    Requires d(p,q) <= alpha*r* for every capped pair so the cap never
    drops below d.  The result satisfies "d >= r* implies d' >= alpha*r*",
    hence its optimal cost is exactly alpha*r*.
    """
    inst = instance if isinstance(instance, Instance) else Instance("asymmetric", instance)
    d = inst.dist
    dprime = alpha * d
    bound = alpha * r_star
    for p, q in capped_pairs:
        if d[p, q] > bound:
            raise CapTooTight(p, q, d[p, q], bound)
        dprime[p, q] = min(alpha * d[p, q], bound)
    return Perturbation(base=inst, alpha=alpha, dprime=dprime)


def sample_perturbation(instance, alpha: float, seed: int) -> Perturbation:
    """Each off-diagonal entry scaled by an independent uniform [1, alpha] draw."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    inst = instance if isinstance(instance, Instance) else Instance("asymmetric", instance)
    d = inst.dist
    n = d.shape[0]
    rng = np.random.default_rng(seed)
    u = rng.uniform(1.0, alpha, size=(n, n))
    np.fill_diagonal(u, 1.0)
    return Perturbation(base=inst, alpha=alpha, dprime=d * u)


@dataclass(frozen=True)
class FalsifierResult:
    status: str  # "falsified" | "none-found" | "budget-exceeded"
    perturbation: Perturbation = None
    violating_clustering: Clustering = None
    opt_clustering: Clustering = None
    eps_dist: float = None
    tried: int = 0
    opt_unique: bool = True


def _check_perturbation(d, k, opt_part, epsilon, oracle_budget):
    """Return the first d'-optimal clustering farther than epsilon from OPT."""
    res = brute_force_optimal(d.dprime, k, budget=oracle_budget)
    for centers in res.optimal_center_sets:
        cl = voronoi_partition(d.dprime, centers)
        eps = epsilon_distance(cl, opt_part)
        if eps > epsilon:
            return cl, eps
    return None, None


def falsify_resilience(instance, k: int, params: StabilityParams,
                       budget: int = 200, seed: int = 0,
                       oracle_budget: int = DEFAULT_SUBSET_BUDGET) -> FalsifierResult:
    """Search for an alpha-perturbation whose optimum is > epsilon from OPT.

    Tries the capped-pair perturbations used in all the impossibility
    arguments first (cap distances from each candidate point q to each
    optimal cluster), then falls back to seeded uniform random
    perturbations, up to ``budget`` perturbations total.  Finite search can
    only falsify; "none-found" is not a certificate of resilience.

    Every counterexample is re-validated before it is returned: the
    perturbation bounds must hold and the violating clustering must be
    optimal under d' and > epsilon from OPT.
    """
    inst = instance if isinstance(instance, Instance) else Instance("asymmetric", instance)
    d = inst.dist
    n = d.shape[0]
    opt = brute_force_optimal(d, k, budget=oracle_budget)
    r_star = opt.optimal_radius
    opt_part = opt.clustering(d)
    alpha, epsilon = params.alpha, params.epsilon
    bound = alpha * r_star
    tried = 0

    def validated(pert, cl, eps):
        assert pert.bounds_ok(), "counterexample violates perturbation bounds"
        re_cl, re_eps = _check_perturbation(pert, k, opt_part, epsilon, oracle_budget)
        assert re_cl is not None and re_eps > epsilon, "counterexample did not re-validate"
        return FalsifierResult(status="falsified", perturbation=pert,
                               violating_clustering=cl, opt_clustering=opt_part,
                               eps_dist=eps, tried=tried,
                               opt_unique=opt.partition_unique)

    # Targeted phase: cap (q, t) for t in C_i, for every point q and cluster.
    clusters = opt_part.clusters()
    for ci in clusters:
        for q in range(n):
            if tried >= budget:
                return FalsifierResult(status="budget-exceeded", tried=tried,
                                       opt_clustering=opt_part,
                                       opt_unique=opt.partition_unique)
            pairs = [(q, t) for t in ci if t != q and d[q, t] <= bound]
            if not pairs:
                continue
            pert = build_lemma1_perturbation(inst, r_star, alpha, pairs)
            tried += 1
            cl, eps = _check_perturbation(pert, k, opt_part, epsilon, oracle_budget)
            if cl is not None:
                return validated(pert, cl, eps)

    # Random phase with whatever budget remains.
    i = 0
    while tried < budget:
        pert = sample_perturbation(inst, alpha, seed + i)
        i += 1
        tried += 1
        cl, eps = _check_perturbation(pert, k, opt_part, epsilon, oracle_budget)
        if cl is not None:
            return validated(pert, cl, eps)
    return FalsifierResult(status="none-found", tried=tried,
                           opt_clustering=opt_part,
                           opt_unique=opt.partition_unique)
