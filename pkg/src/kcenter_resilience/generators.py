"""Seeded instance factories with planted ground truth and explicit constructions.

Planted guarantees are enforced constructively and re-checked at build
time; a generator never returns an instance whose guarantee it could not
verify.  All distances land on the coarse grid (multiples of 2^-20) so
downstream comparisons are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import floyd_warshall

from .core import (ASYMMETRIC, SYMMETRIC, Clustering, Instance, cost,
                   snap_up, validate_instance, voronoi_partition)
from .analysis import check_structure
from .oracle import brute_force_optimal


class InfeasibleParams(ValueError):
    pass


class RejectionBudgetExceeded(RuntimeError):
    pass


class ConstructionCheckFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class Guarantee:
    family: str
    seed: int = None
    alpha: float = None
    epsilon: float = None
    skew: float = None
    r: float = None
    separation: float = None
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PlantedInstance:
    instance: Instance
    truth: Clustering
    guarantee: Guarantee


def _cluster_sizes(n, k):
    base, extra = divmod(n, k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def _planted_coords(n, k, r, separation, rng):
    """Cluster-block coordinates: centers on a line, members in 0.9r disks."""
    sizes = _cluster_sizes(n, k)
    coords = []
    centers_idx = []
    idx = 0
    for i, size in enumerate(sizes):
        cx, cy = i * separation, 0.0
        centers_idx.append(idx)
        coords.append((cx, cy))
        idx += 1
        for _ in range(size - 1):
            rad = 0.9 * r * math.sqrt(rng.uniform())
            ang = rng.uniform(0.0, 2.0 * math.pi)
            coords.append((cx + rad * math.cos(ang), cy + rad * math.sin(ang)))
            idx += 1
    return np.asarray(coords), centers_idx, sizes


def _truth_from_blocks(d, centers_idx, sizes):
    assignment = []
    for i, size in enumerate(sizes):
        assignment.extend([i] * size)
    radius = cost(d, centers_idx)
    return Clustering(k=len(sizes), centers=tuple(centers_idx),
                      assignment=tuple(assignment), radius=radius)


def _min_cross_distance(d, assignment):
    a = np.asarray(assignment)
    mask = a[:, None] != a[None, :]
    return float(d[mask].min()) if mask.any() else math.inf


def gen_planted_symmetric(n, k, r, alpha, seed, _sep_scale=1.0) -> PlantedInstance:
    """Planted Euclidean clusters with cross separation > 2*alpha*r.

    Mixing two planted clusters then costs more than alpha*r while the
    planted centers cost at most r, so the planted partition is the unique
    optimum under every alpha-perturbation: the instance is alpha-PR by
    construction.  The guarantee is re-checked before returning.
    """
    if not (n >= k >= 1) or r <= 0 or alpha < 1:
        raise InfeasibleParams(f"bad params n={n} k={k} r={r} alpha={alpha}")
    rng = np.random.default_rng(seed)
    separation = (2 * alpha * r + 2 * r) * 1.25 * _sep_scale
    coords, centers_idx, sizes = _planted_coords(n, k, r, separation, rng)
    diff = coords[:, None, :] - coords[None, :, :]
    d = snap_up(np.sqrt((diff ** 2).sum(axis=-1)))
    np.fill_diagonal(d, 0.0)
    instance = validate_instance(d, SYMMETRIC)
    truth = _truth_from_blocks(d, centers_idx, sizes)
    min_cross = _min_cross_distance(d, truth.assignment)
    if truth.radius > r or (k > 1 and not min_cross > 2 * alpha * r * _sep_scale):
        raise InfeasibleParams("separation guarantee failed at construction")
    return PlantedInstance(instance=instance, truth=truth,
                           guarantee=Guarantee(family="planted-sym", seed=seed,
                                               alpha=alpha, r=r,
                                               separation=min_cross))


def gen_planted_asymmetric(n, k, r, alpha, skew, seed,
                           max_attempts=50) -> PlantedInstance:
    """Directionally skewed planted instance satisfying the ball-pruning
    algorithm's structural conditions.

    Starts from a symmetric planted instance with the margin inflated by
    ``skew``, multiplies each ordered pair by an independent factor in
    [1, skew], restores the directed triangle inequality by shortest-path
    closure, then re-checks validity and the structural conditions.
    Attempts are repeated with fresh factor draws until all checks pass.
    """
    if skew < 1:
        raise InfeasibleParams(f"skew must be >= 1, got {skew}")
    base = gen_planted_symmetric(n, k, r, alpha, seed, _sep_scale=skew)
    if skew == 1:
        return base
    truth = base.truth
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        u = rng.uniform(1.0, skew, size=(n, n))
        np.fill_diagonal(u, 1.0)
        # snap before the closure: grid values are closed under addition,
        # so the closed table satisfies the triangle inequality exactly
        skewed = snap_up(base.instance.dist * u)
        np.fill_diagonal(skewed, 0.0)
        d = floyd_warshall(skewed)
        try:
            instance = validate_instance(d, ASYMMETRIC)
        except ValueError:
            continue
        new_truth = Clustering(k=k, centers=truth.centers,
                               assignment=truth.assignment,
                               radius=cost(d, truth.centers))
        report = check_structure(d, new_truth, r_star=new_truth.radius)
        vor = voronoi_partition(d, truth.centers)
        if (report.property1 and report.property1_full_scope
                and report.property2 and report.a_respects_opt
                and vor.assignment == new_truth.assignment):
            return PlantedInstance(
                instance=instance, truth=new_truth,
                guarantee=Guarantee(family="planted-asym", seed=seed,
                                    alpha=alpha, skew=skew, r=r,
                                    separation=_min_cross_distance(
                                        d, new_truth.assignment)))
    raise RejectionBudgetExceeded(
        f"no valid skewed instance in {max_attempts} attempts (seed {seed})")


def gen_bad_center_18(alpha) -> PlantedInstance:
    """18-point asymmetric instance with exactly one bad center.

    Three planted clusters of six; the middle cluster's center can be
    undercut by any point of the two outer clusters, which sit within
    1/alpha of the whole middle cluster.  Every structural claim the
    construction relies on is asserted at build time against the checkers
    and the brute-force oracle.
    """
    if not alpha > 1:
        raise InfeasibleParams(f"alpha must be > 1, got {alpha}")
    n, k = 18, 3
    c_x, c_y, c_z = 0, 6, 12
    xs = list(range(1, 6))
    ys = list(range(7, 12))
    zs = list(range(13, 18))
    g = float(snap_up(1.0 / alpha))
    far = float(math.ceil(alpha)) + 1.0

    d = np.full((n, n), far)
    np.fill_diagonal(d, 0.0)
    for i in xs:
        d[c_x, i] = 1.0
    for j in ys:
        d[c_y, j] = 1.0
    for i in zs:
        d[c_z, i] = 1.0
    for i in xs + zs:
        for j in ys + [c_y]:
            d[i, j] = g
    d = floyd_warshall(d)
    d = snap_up(d)
    np.fill_diagonal(d, 0.0)
    instance = validate_instance(d, ASYMMETRIC)

    centers = (c_x, c_y, c_z)
    sizes = [6, 6, 6]
    assignment = tuple([0] * 6 + [1] * 6 + [2] * 6)
    truth = Clustering(k=k, centers=centers, assignment=assignment,
                       radius=cost(d, centers))

    def require(check, msg):
        if not check:
            raise ConstructionCheckFailed(msg)

    require(truth.radius == 1.0, "planted radius must be 1")
    oracle = brute_force_optimal(d, k)
    require(oracle.optimal_radius == 1.0, "oracle radius must be 1")
    require(tuple(sorted(centers)) in oracle.optimal_center_sets,
            "planted centers must be oracle-optimal")
    require(voronoi_partition(d, centers).assignment == assignment,
            "planted partition must be the Voronoi tiling of its centers")
    report = check_structure(d, truth, r_star=1.0)
    require(report.bad_centers == (c_y,), "exactly c_y must be bad")
    # the two outer centers are forced: nothing else comes close to their clusters
    for q in range(n):
        if q != c_x:
            require(max(d[q, i] for i in xs) > alpha, "c_x must be forced")
        if q != c_z:
            require(max(d[q, i] for i in zs) > alpha, "c_z must be forced")
    # no middle point can serve its own cluster-mates
    for j in ys:
        require(max(d[j, jj] for jj in ys if jj != j) > alpha,
                "no y point may cover the middle cluster")
    # outer points undercut the outer centers on the middle cluster even
    # after any alpha-scaling of their own distances
    for i in xs + zs:
        for j in ys:
            require(alpha * d[i, j] < d[c_x, j], "undercut vs c_x failed")
            require(alpha * d[i, j] < d[c_z, j], "undercut vs c_z failed")
    return PlantedInstance(instance=instance, truth=truth,
                           guarantee=Guarantee(family="bad-center-18",
                                               alpha=alpha, epsilon=1.0 / 18,
                                               r=1.0))


def gen_from_dominating_set(n_vertices, edges, k=None) -> Instance:
    """Graph metric with d = 1 on edges and 2 otherwise.

    The optimal k-center cost is 1 iff the graph has a dominating set of
    size k; with only distances 1 and 2 the triangle inequality is
    automatic.
    """
    d = np.full((n_vertices, n_vertices), 2.0)
    np.fill_diagonal(d, 0.0)
    for u, v in edges:
        if u == v:
            continue
        d[u, v] = d[v, u] = 1.0
    return validate_instance(d, SYMMETRIC)


def gen_eps_padding(base: Instance, k, alpha, epsilon,
                    oracle_budget=2_000_000) -> PlantedInstance:
    """Pad a symmetric instance with ceil(n/epsilon) isolated points.

    Each pad point sits at distance alpha*(D+1) from everything (D = base
    diameter), so every good solution keeps the pads as singletons and the
    base keeps a radius-r k-solution iff the padded instance keeps a
    radius-r (k + N)-solution for r < D.  The planted truth is the base
    oracle optimum plus pad singletons.
    """
    if not base.is_symmetric:
        raise InfeasibleParams("base must be symmetric")
    if epsilon <= 0:
        raise InfeasibleParams("epsilon must be > 0")
    n = base.n
    diameter = float(base.dist.max())
    pad_dist = alpha * (diameter + 1.0)
    n_pad = math.ceil(n / epsilon)
    total = n + n_pad
    d = np.full((total, total), pad_dist)
    d[:n, :n] = base.dist
    np.fill_diagonal(d, 0.0)
    instance = validate_instance(d, SYMMETRIC)
    opt = brute_force_optimal(base.dist, k, budget=oracle_budget)
    base_cl = opt.clustering(base.dist)
    k_prime = k + n_pad
    centers = tuple(base_cl.centers) + tuple(range(n, total))
    assignment = tuple(base_cl.assignment) + tuple(range(k, k_prime))
    truth = Clustering(k=k_prime, centers=centers, assignment=assignment,
                       radius=cost(d, centers))
    return PlantedInstance(instance=instance, truth=truth,
                           guarantee=Guarantee(family="eps-padding",
                                               alpha=alpha, epsilon=epsilon,
                                               extras={"k_prime": k_prime,
                                                       "n_pad": n_pad,
                                                       "base_n": n,
                                                       "pad_distance": pad_dist}))


def gen_random_metric(n, mode, seed) -> Instance:
    """Background test material: seeded random valid instances.

    Symmetric: uniform points in the unit square, grid-snapped Euclidean
    distances.  Asymmetric: random ordered weights repaired into a directed
    metric by shortest-path closure.
    """
    if n < 1:
        raise InfeasibleParams("n must be >= 1")
    rng = np.random.default_rng(seed)
    if mode == SYMMETRIC:
        coords = rng.uniform(0.0, 1.0, size=(n, 2))
        diff = coords[:, None, :] - coords[None, :, :]
        d = snap_up(np.sqrt((diff ** 2).sum(axis=-1)))
        np.fill_diagonal(d, 0.0)
        return validate_instance(d, SYMMETRIC)
    if mode == ASYMMETRIC:
        d = snap_up(rng.uniform(0.5, 2.0, size=(n, n)))
        np.fill_diagonal(d, 0.0)
        d = floyd_warshall(d)
        return validate_instance(d, ASYMMETRIC)
    raise InfeasibleParams(f"unknown mode {mode!r}")


# Small named graphs for the dominating-set generator's CLI surface.
def named_graph(name):
    """star5, path4, cycle6, complete4, empty3 style names -> (n, edges)."""
    for prefix in ("star", "path", "cycle", "complete", "empty"):
        if name.startswith(prefix):
            n = int(name[len(prefix):])
            if n < 1:
                break
            if prefix == "star":
                return n, [(0, i) for i in range(1, n)]
            if prefix == "path":
                return n, [(i, i + 1) for i in range(n - 1)]
            if prefix == "cycle":
                return n, [(i, (i + 1) % n) for i in range(n)]
            if prefix == "complete":
                return n, [(i, j) for i in range(n) for j in range(i + 1, n)]
            if prefix == "empty":
                return n, []
    raise InfeasibleParams(f"unknown graph name {name!r}")
