"""Recovery algorithms: approximation, 2-PR exact, (3,eps)-PR, linkage, sweep.

Every solver returns a SolveOutcome.  Statuses:

  exact-claim         optimal under the solver's resilience promise
  eps-close-claim     epsilon-close to optimal under the promise
  approximation-only  the usual worst-case guarantee, nothing more
  not-resilient       the promise visibly failed (no clustering returned)

A claim is only as good as the promise; the oracle and the structure
checkers are the way to confirm it on concrete instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .core import (Clustering, Instance, _as_table, ball, cost,
                   symmetrized_set, threshold_components, voronoi_partition,
                   EmptyA)


class AsymmetricInput(ValueError):
    pass


class NeedsMoreCenters(RuntimeError):
    def __init__(self, count, k):
        self.count, self.k = count, k
        super().__init__(f"cover needs {count} centers, only {k} allowed")


class NoCandidateWorks(RuntimeError):
    pass


class VerifierStuck(RuntimeError):
    """The linkage inner loop cannot proceed; cluster verifiability fails."""


class SolverBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SolveOutcome:
    status: str
    clustering: Clustering = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status in ("exact-claim", "eps-close-claim",
                               "approximation-only")


def _require_symmetric(instance):
    if isinstance(instance, Instance) and not instance.is_symmetric:
        raise AsymmetricInput("this solver requires a symmetric instance")


def _one_center(d, members):
    """Best center of a point set: minimizes max distance, smallest index ties."""
    members = sorted(members)
    sub = d[np.ix_(members, members)]
    ecc = sub.max(axis=1)
    return members[int(ecc.argmin())]


def _clustering_from_groups(d, groups):
    """Build a Clustering from disjoint covering groups, ordered as given."""
    n = d.shape[0]
    assignment = [None] * n
    centers = []
    for i, g in enumerate(groups):
        c = _one_center(d, g)
        centers.append(c)
        for p in g:
            assignment[p] = i
    radius = max(d[centers[i], p] for i, g in enumerate(groups) for p in g)
    return Clustering(k=len(groups), centers=tuple(centers),
                      assignment=tuple(assignment), radius=float(radius))


def farthest_first(instance, k: int):
    """Gonzalez farthest-first traversal; 2-approximation on symmetric metrics.

    Seeds at point 0 for reproducibility; each next center is the point
    farthest from the chosen set (smallest index on ties).
    """
    _require_symmetric(instance)
    d = _as_table(instance)
    n = d.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}")
    centers = [0]
    mind = d[0].copy()
    while len(centers) < k:
        nxt = int(mind.argmax())
        centers.append(nxt)
        mind = np.minimum(mind, d[nxt])
    return tuple(centers)


def hochbaum_shmoys_cover(instance, r: float, k: int):
    """Greedy cover: pick the smallest-index unmarked point, mark within 2r.

    Returns the chosen centers (cost <= 2r) or raises NeedsMoreCenters if
    more than k are consumed.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    d = _as_table(instance)
    n = d.shape[0]
    unmarked = np.ones(n, dtype=bool)
    centers = []
    while unmarked.any():
        c = int(unmarked.argmax())  # smallest unmarked index
        centers.append(c)
        unmarked &= ~(d[c] <= 2 * r)
        if len(centers) > k:
            raise NeedsMoreCenters(len(centers), k)
    return tuple(centers)


def exact_via_approximation(instance, k: int, alpha: float,
                            approx=None) -> SolveOutcome:
    """Voronoi partition of an alpha-approximate center set.

    Under alpha-perturbation resilience this partition is the optimal
    clustering; the caller owns the alpha-approximation guarantee of
    ``approx`` (default: farthest-first, alpha = 2 on symmetric inputs).
    """
    if approx is None:
        centers = farthest_first(instance, k)
    else:
        centers = approx(instance, k)
    cl = voronoi_partition(instance, centers)
    return SolveOutcome(status="exact-claim", clustering=cl,
                        diagnostics={"alpha": alpha, "approx_cost": cl.radius})


def asymmetric_2pr(instance, k: int, r_star: float) -> SolveOutcome:
    """Ball-pruning algorithm for asymmetric k-center under 2-PR.

    Builds the symmetrized set A, forms the r*-ball around every point of A
    (restricted to A), prunes balls that leak (some member closer to an
    outside point than to the ball's center) or that are subsets of other
    balls, then attaches each point outside A to the surviving ball of its
    nearest A-point.  Under 2-PR the survivors are exactly the optimal
    clusters.
    """
    d = _as_table(instance)
    try:
        sym = symmetrized_set(instance, r_star)
    except EmptyA:
        return SolveOutcome(status="not-resilient",
                            diagnostics={"reason": "empty symmetrized set"})
    a = list(sym.members)
    aset = set(a)
    balls = {c: set(ball(d, c, r_star, domain=a)) for c in a}
    full_ball_sizes = {c: len(ball(d, c, r_star)) for c in a}

    pruned_leak = []
    for c in a:
        g = balls[c]
        outside = [q for q in a if q not in g]
        if any(d[q, p] < d[c, p] for p in g for q in outside):
            pruned_leak.append(c)
    survivors = [c for c in a if c not in set(pruned_leak)]

    pruned_subset = []
    for p in survivors:
        for q in survivors:
            if p == q:
                continue
            if balls[p] < balls[q] or (balls[p] == balls[q] and q < p):
                pruned_subset.append(p)
                break
    survivors = [c for c in survivors if c not in set(pruned_subset)]

    diagnostics = {
        "surviving": len(survivors),
        "pruned_leak": len(pruned_leak),
        "pruned_subset": len(pruned_subset),
        "ball_sizes_restricted": {c: len(balls[c]) for c in survivors},
        "ball_sizes_unrestricted": {c: full_ball_sizes[c] for c in survivors},
        "consistency_factor": 1.0,
    }
    if len(survivors) != k:
        return SolveOutcome(status="not-resilient", diagnostics=diagnostics)

    groups = [sorted(balls[c]) for c in survivors]
    covered = set().union(*(set(g) for g in groups))
    if covered != aset or sum(len(g) for g in groups) != len(a):
        diagnostics["reason"] = "surviving balls do not partition A"
        return SolveOutcome(status="not-resilient", diagnostics=diagnostics)
    owner = {}
    for i, g in enumerate(groups):
        for p in g:
            owner[p] = i
    for p, ap in sym.nearest_in_A.items():
        groups[owner[ap]].append(p)
    groups = [sorted(g) for g in groups]
    groups.sort(key=min)
    return SolveOutcome(status="exact-claim",
                        clustering=_clustering_from_groups(d, groups),
                        diagnostics=diagnostics)


def symmetric_3eps(instance, k: int, r_star: float) -> SolveOutcome:
    """Connected components of the threshold graph at r*.

    Exact under (3,eps)-perturbation resilience with optimal clusters
    larger than max(2*eps*n, 3).
    """
    _require_symmetric(instance)
    d = _as_table(instance)
    comps = threshold_components(d, threshold=r_star)
    diagnostics = {"component_count": len(comps), "consistency_factor": 1.0}
    if len(comps) != k:
        return SolveOutcome(status="not-resilient", diagnostics=diagnostics)
    return SolveOutcome(status="exact-claim",
                        clustering=_clustering_from_groups(d, comps),
                        diagnostics=diagnostics)


def asymmetric_3eps(instance, k: int, r_star: float,
                    budget: int = 5_000_000) -> SolveOutcome:
    """Cover-and-patch algorithm for asymmetric k-center under (3,eps)-PR.

    Covers the symmetrized set A in the hop metric of its threshold graph
    (one hop = one r* edge) with k' centers for k' = k-6 ... k, then brute
    forces up to 6 replacement centers so that k centers cover all of S
    within 3r* under the original distances.  The Voronoi partition of the
    patched centers is epsilon-close to optimal under the promise.
    """
    d = _as_table(instance)
    n = d.shape[0]
    try:
        sym = symmetrized_set(instance, r_star)
    except EmptyA:
        return SolveOutcome(status="not-resilient",
                            diagnostics={"reason": "empty symmetrized set"})
    a = list(sym.members)
    na = len(a)
    sub = d[np.ix_(a, a)]
    adj = (sub <= r_star) & (sub.T <= r_star)
    hops = shortest_path(adj.astype(float), method="D", unweighted=True)

    cover_local = None
    k_prime_used = None
    for k_prime in range(max(1, k - 6), k + 1):
        try:
            cover_local = hochbaum_shmoys_cover(hops, r=1.0, k=k_prime)
        except NeedsMoreCenters:
            continue
        k_prime_used = k_prime
        break
    if cover_local is None:
        return SolveOutcome(status="not-resilient",
                            diagnostics={"reason": "no hop cover for any k' <= k"})
    c_set = tuple(a[i] for i in cover_local)

    chosen = None
    x_used = None
    work = 0
    for x in range(0, min(6, k) + 1):
        keep = k - x
        if keep > len(c_set) or keep < 0:
            continue
        for kept in itertools.combinations(c_set, keep):
            kept_s = set(kept)
            pool = [p for p in range(n) if p not in kept_s]
            for extra in itertools.combinations(pool, x):
                work += 1
                if work > budget:
                    raise SolverBudgetExceeded(
                        f"patch enumeration exceeded budget {budget}")
                cand = list(kept) + list(extra)
                if d[cand].min(axis=0).max() <= 3 * r_star:
                    chosen = tuple(sorted(cand))
                    x_used = x
                    break
            if chosen:
                break
        if chosen:
            break
    diagnostics = {"k_prime": k_prime_used, "hop_cover": c_set,
                   "x": x_used, "patch_work": work,
                   "consistency_factor": 3.0}
    if chosen is None:
        return SolveOutcome(status="not-resilient",
                            diagnostics={**diagnostics,
                                         "reason": "no 3r* cover with x <= 6"})
    cl = voronoi_partition(d, chosen)
    return SolveOutcome(status="eps-close-claim", clustering=cl,
                        diagnostics=diagnostics)


@dataclass(frozen=True)
class ClusterVerifier:
    """Oracle f over point sets: f < 0 strictly inside an optimal cluster,
    f >= 0 on supersets of one."""

    kind: str
    fn: object

    def __call__(self, members):
        return self.fn(members)

    @classmethod
    def equal_size(cls, n: int, k: int):
        """All optimal clusters have n/k points: f(B) = |B| - n/k."""
        return cls(kind="equal-size", fn=lambda b: len(b) - n / k)

    @classmethod
    def target_cost(cls, instance, target: float):
        """All optimal clusters share a 1-center cost: f(B) = cost(B) - target."""
        d = _as_table(instance)

        def fn(b):
            members = sorted(b)
            sub = d[np.ix_(members, members)]
            return float(sub.max(axis=1).min()) - target

        return cls(kind="target-cost", fn=fn)


def weak_proximity_linkage(instance, k: int,
                           verifier: ClusterVerifier) -> SolveOutcome:
    """Guarded single linkage for any center-based objective.

    Repeatedly runs single linkage on the current components, refusing to
    merge two components that both verify (f >= 0), until every component
    verifies; then keeps only the very last linkage edge and starts over.
    Under weak center proximity plus cluster verifiability the components
    at k are exactly the optimal clusters.
    """
    _require_symmetric(instance)
    d = _as_table(instance)
    n = d.shape[0]
    labels = np.arange(n)
    committed = []

    def comp_members(lab):
        out = {}
        for p in range(n):
            out.setdefault(lab[p], []).append(p)
        return out

    while len(set(labels.tolist())) > k:
        scratch = labels.copy()
        comps = comp_members(scratch)
        fval = {root: verifier(m) for root, m in comps.items()}
        last_edge = None
        while any(v < 0 for v in fval.values()):
            if len(comps) == 1:
                raise VerifierStuck("a single component still has f < 0")
            neg = np.array([fval[scratch[p]] < 0 for p in range(n)])
            diff = scratch[:, None] != scratch[None, :]
            eligible = diff & (neg[:, None] | neg[None, :])
            if not eligible.any():
                raise VerifierStuck("no joinable pair touches an f < 0 component")
            masked = np.where(eligible, d, np.inf)
            flat = int(masked.argmin())  # row-major: smallest (p, q) on ties
            p, q = divmod(flat, n)
            rp, rq = scratch[p], scratch[q]
            keep, drop = min(rp, rq), max(rp, rq)
            members = comps.pop(drop) + comps.pop(keep)
            scratch[scratch == drop] = keep
            comps[keep] = members
            fval.pop(drop)
            fval.pop(keep)
            fval[keep] = verifier(members)
            last_edge = (int(min(p, q)), int(max(p, q)))
        if last_edge is None:
            raise VerifierStuck(
                "all components verify but more than k remain")
        committed.append(last_edge)
        p, q = last_edge
        rp, rq = labels[p], labels[q]
        keep, drop = min(rp, rq), max(rp, rq)
        labels[labels == drop] = keep
    groups = sorted(comp_members(labels).values(), key=min)
    return SolveOutcome(status="exact-claim",
                        clustering=_clustering_from_groups(d, groups),
                        diagnostics={"committed_edges": tuple(committed),
                                     "consistency_factor": np.inf})


def approx_stability_2eps(instance, k: int, r_star: float,
                          epsilon: float) -> SolveOutcome:
    """Ball-intersection components for (2,eps)-approximation stability.

    Joins p and q when their 2r* balls share more than eps*n points;
    components of that graph are the optimal clusters when all optimal
    clusters have more than eps*n points.
    """
    _require_symmetric(instance)
    d = _as_table(instance)
    n = d.shape[0]
    within = d <= 2 * r_star  # within[p] = membership mask of B_{2r*}(p)
    counts = within.astype(np.int64) @ within.T.astype(np.int64)
    adj = counts > epsilon * n
    from .core import _DSU
    dsu = _DSU(range(n))
    for p in range(n):
        for q in range(p + 1, n):
            if adj[p, q]:
                dsu.union(p, q)
    groups = {}
    for p in range(n):
        groups.setdefault(dsu.find(p), []).append(p)
    comps = [sorted(groups[r]) for r in sorted(groups)]
    diagnostics = {"component_count": len(comps), "consistency_factor": 2.0}
    if len(comps) != k:
        return SolveOutcome(status="not-resilient", diagnostics=diagnostics)
    return SolveOutcome(status="exact-claim",
                        clustering=_clustering_from_groups(d, comps),
                        diagnostics=diagnostics)


def sweep_radius(instance, k: int, solver):
    """Guess-and-check wrapper for r*-parameterized solvers.

    Tries every distinct off-diagonal distance (plus 0) in ascending order
    as the candidate radius and returns the first successful,
    self-consistent outcome together with the chosen radius.  The optimal
    radius is always among the candidates because it is attained by some
    center-point pair.
    """
    d = _as_table(instance)
    n = d.shape[0]
    off = d[~np.eye(n, dtype=bool)]
    candidates = sorted(set([0.0] + off.tolist()))
    log = []
    for r in candidates:
        try:
            outcome = solver(instance, k, r)
        except (VerifierStuck, SolverBudgetExceeded, NeedsMoreCenters):
            log.append((r, "error"))
            continue
        if not outcome.ok:
            log.append((r, outcome.status))
            continue
        factor = outcome.diagnostics.get("consistency_factor", 1.0)
        if _self_consistent(d, outcome.clustering, r * factor):
            return outcome, r
        log.append((r, "inconsistent"))
    raise NoCandidateWorks(f"no candidate radius works; sweep log: {log}")


def _self_consistent(d, clustering, r):
    """Every cluster has some member within r of all its members."""
    for g in clustering.clusters():
        if not g:
            continue
        sub = d[np.ix_(g, g)]
        if sub.max(axis=1).min() > r:
            return False
    return True


def _ff2(instance, k, r_star=None, epsilon=None):
    centers = farthest_first(instance, k)
    cl = voronoi_partition(instance, centers)
    return SolveOutcome(status="approximation-only", clustering=cl,
                        diagnostics={"consistency_factor": 2.0})


def _hs(instance, k, r_star, epsilon=None):
    try:
        centers = hochbaum_shmoys_cover(instance, r_star, k)
    except NeedsMoreCenters as e:
        return SolveOutcome(status="not-resilient",
                            diagnostics={"needed": e.count})
    cl = voronoi_partition(instance, centers)
    return SolveOutcome(status="approximation-only", clustering=cl,
                        diagnostics={"consistency_factor": 2.0})


def _thm3(instance, k, r_star=None, epsilon=None):
    return exact_via_approximation(instance, k, alpha=2.0)


def _alg3(instance, k, r_star=None, epsilon=None):
    n = _as_table(instance).shape[0]
    return weak_proximity_linkage(instance, k,
                                  ClusterVerifier.equal_size(n, k))


# Stable solver identifiers for the CLI and bench harness.  needs_r marks
# solvers parameterized by r* (sweepable when r is absent).
SOLVERS = {
    "ff2": {"fn": _ff2, "needs_r": False},
    "hs": {"fn": _hs, "needs_r": True},
    "thm3": {"fn": _thm3, "needs_r": False},
    "alg1-2pr": {"fn": lambda inst, k, r, eps=None: asymmetric_2pr(inst, k, r),
                 "needs_r": True},
    "thm5-3eps": {"fn": lambda inst, k, r, eps=None: symmetric_3eps(inst, k, r),
                  "needs_r": True},
    "alg2-3eps-asym": {"fn": lambda inst, k, r, eps=None: asymmetric_3eps(inst, k, r),
                       "needs_r": True},
    "alg3-linkage": {"fn": _alg3, "needs_r": False},
    "alg4-2eps-as": {"fn": lambda inst, k, r, eps: approx_stability_2eps(inst, k, r, eps),
                     "needs_r": True},
}
