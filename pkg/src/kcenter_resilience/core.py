"""Core data model: instances, clusterings, balls, threshold graphs, closeness.

Distances are stored as dense n x n tables where ``dist[p][q]`` is the
distance *from* p *to* q.  All operations are pure and deterministic; every
tie is broken toward the smallest point index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

SYMMETRIC = "symmetric"
ASYMMETRIC = "asymmetric"

# Generators emit distances on this grid so exact float comparison is safe.
GRID = 2.0 ** -20


def snap_up(values):
    """Round distances up to the next multiple of the coarse grid.

    Rounding up preserves the (directed) triangle inequality: if a <= b + c
    then ceil(a) <= ceil(b) + ceil(c) because the grid is closed under
    addition.
    """
    return np.ceil(np.asarray(values, dtype=float) / GRID) * GRID


class InstanceViolation(ValueError):
    """A distance table failed validation; carries the first violation found."""


class NegativeDistance(InstanceViolation):
    def __init__(self, p, q, value):
        self.p, self.q, self.value = p, q, value
        super().__init__(f"dist[{p}][{q}] = {value} is negative")


class NonzeroDiagonal(InstanceViolation):
    def __init__(self, p, value):
        self.p, self.value = p, value
        super().__init__(f"dist[{p}][{p}] = {value} must be 0")


class SymmetryViolation(InstanceViolation):
    def __init__(self, p, q):
        self.p, self.q = p, q
        super().__init__(f"dist[{p}][{q}] != dist[{q}][{p}]")


class TriangleViolation(InstanceViolation):
    def __init__(self, p, s, q):
        self.p, self.s, self.q = p, s, q
        super().__init__(f"dist[{p}][{q}] > dist[{p}][{s}] + dist[{s}][{q}]")


class MismatchedK(ValueError):
    pass


class EmptyA(ValueError):
    """No point satisfies the symmetrized-set predicate; r* is malformed."""


@dataclass(frozen=True, eq=False)
class Instance:
    mode: str
    dist: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(self.dist, dtype=float)
        d.flags.writeable = False
        object.__setattr__(self, "dist", d)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def is_symmetric(self) -> bool:
        return self.mode == SYMMETRIC


@dataclass(frozen=True)
class StabilityParams:
    alpha: float
    epsilon: float

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must be in [0,1], got {self.epsilon}")


@dataclass(frozen=True)
class Clustering:
    """A partition into k labeled clusters, one designated center each.

    ``assignment[p]`` is the cluster index of point p, ``centers[i]`` the
    center of cluster i.  ``empty_clusters`` flags degenerate clusters that
    captured no point (the structure is still returned so callers can
    inspect it).
    """

    k: int
    centers: tuple
    assignment: tuple
    radius: float
    empty_clusters: tuple = ()

    @property
    def n(self) -> int:
        return len(self.assignment)

    def clusters(self):
        """Members of each cluster, index-sorted, in label order."""
        out = [[] for _ in range(self.k)]
        for p, i in enumerate(self.assignment):
            out[i].append(p)
        return out

    def canonical_partition(self):
        """Label-free view: nonempty clusters as sorted tuples, sorted."""
        return tuple(sorted(tuple(c) for c in self.clusters() if c))


def _as_table(instance) -> np.ndarray:
    if isinstance(instance, Instance):
        return instance.dist
    return np.asarray(instance, dtype=float)


def validate_instance(raw_table, mode: str, slack: float = 0.0) -> Instance:
    """Check the four table invariants and build an Instance.

    Raises the subclass of InstanceViolation naming the first violating
    pair/triple in row-major scan order.  ``slack`` loosens symmetry and
    triangle comparisons for externally supplied data (default exact).
    """
    d = np.asarray(raw_table, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"table must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise ValueError("table entries must be finite")
    if mode not in (SYMMETRIC, ASYMMETRIC):
        raise ValueError(f"unknown mode {mode!r}")
    n = d.shape[0]
    for p in range(n):
        if d[p, p] != 0.0:
            raise NonzeroDiagonal(p, d[p, p])
        for q in range(n):
            if d[p, q] < 0.0:
                raise NegativeDistance(p, q, d[p, q])
    if mode == SYMMETRIC:
        bad = np.argwhere(np.abs(d - d.T) > slack)
        if bad.size:
            p, q = bad[0]
            raise SymmetryViolation(int(p), int(q))
    # viol[p, s, q] <=> d(p,q) > d(p,s) + d(s,q); argwhere scans row-major
    viol = d[:, None, :] > (d[:, :, None] + d[None, :, :]) + slack
    bad = np.argwhere(viol)
    if bad.size:
        p, s, q = bad[0]
        raise TriangleViolation(int(p), int(s), int(q))
    return Instance(mode=mode, dist=d)


def cost(instance, centers: Iterable[int]) -> float:
    """k-center objective: max over points of distance from nearest center."""
    d = _as_table(instance)
    centers = sorted(set(int(c) for c in centers))
    if not centers:
        raise ValueError("centers must be nonempty")
    return float(d[centers].min(axis=0).max())


def voronoi_partition(instance, centers: Sequence[int]) -> Clustering:
    """Assign each point to its closest center (distance center -> point).

    Ties go to the center with the smallest point index.  Centers that
    capture no point are flagged in ``empty_clusters``.
    """
    d = _as_table(instance)
    centers = tuple(int(c) for c in centers)
    if len(set(centers)) != len(centers):
        raise ValueError("centers must be distinct")
    k = len(centers)
    order = np.argsort(centers, kind="stable")  # smallest center index first
    rows = d[np.asarray(centers)[order]]
    pos = rows.argmin(axis=0)  # first occurrence = smallest center index
    assignment = tuple(int(order[j]) for j in pos)
    # a center always belongs to its own cluster (distance 0, ties by index)
    radius = cost(d, centers)
    captured = set(assignment)
    empties = tuple(i for i in range(k) if i not in captured)
    return Clustering(k=k, centers=centers, assignment=assignment,
                      radius=radius, empty_clusters=empties)


def epsilon_distance(a: Clustering, b: Clustering) -> float:
    """Fraction of points clustered differently under the best label matching.

    Computed as an optimal assignment on the k x k overlap matrix; equals
    (1/n) min over bijections sigma of sum_i |A_i \\ B_sigma(i)|.
    """
    if a.k != b.k:
        raise MismatchedK(f"k mismatch: {a.k} vs {b.k}")
    if a.n != b.n:
        raise ValueError(f"point count mismatch: {a.n} vs {b.n}")
    n, k = a.n, a.k
    overlap = np.zeros((k, k), dtype=np.int64)
    for p in range(n):
        overlap[a.assignment[p], b.assignment[p]] += 1
    rows, cols = linear_sum_assignment(-overlap)
    matched = int(overlap[rows, cols].sum())
    return (n - matched) / n


def ball(instance, center: int, radius: float, domain=None):
    """Points of ``domain`` within ``radius`` of ``center`` (outgoing)."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    d = _as_table(instance)
    if domain is None:
        domain = range(d.shape[0])
    return tuple(q for q in sorted(domain) if d[center, q] <= radius)


@dataclass(frozen=True)
class ThresholdGraph:
    vertices: tuple
    threshold: float
    edges: tuple  # unordered pairs (p, q) with p < q


def threshold_graph(instance, vertices=None, threshold: float = 0.0) -> ThresholdGraph:
    """Graph joining pairs at distance <= threshold (both directions if asymmetric)."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    d = _as_table(instance)
    if vertices is None:
        vertices = range(d.shape[0])
    verts = tuple(sorted(set(int(v) for v in vertices)))
    edges = []
    for i, p in enumerate(verts):
        for q in verts[i + 1:]:
            if d[p, q] <= threshold and d[q, p] <= threshold:
                edges.append((p, q))
    return ThresholdGraph(vertices=verts, threshold=threshold, edges=tuple(edges))


class _DSU:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra
            return True
        return False


def threshold_components(instance, vertices=None, threshold: float = 0.0):
    """Connected components of the threshold graph, sorted by smallest member."""
    g = threshold_graph(instance, vertices, threshold)
    dsu = _DSU(g.vertices)
    for p, q in g.edges:
        dsu.union(p, q)
    groups = {}
    for v in g.vertices:
        groups.setdefault(dsu.find(v), []).append(v)
    return [sorted(groups[r]) for r in sorted(groups)]


@dataclass(frozen=True)
class SymmetrizedSet:
    """The subset A of points symmetric up to r*, with attachment data.

    ``members`` is A; ``nearest_in_A`` maps each point outside A to
    A(p) = argmin_{q in A} d(q, p) (incoming distance, smallest index on
    ties).  ``restricted_clusters`` holds C_i n A when a reference
    clustering was supplied.
    """

    members: tuple
    nearest_in_A: dict
    restricted_clusters: tuple = None


def symmetrized_set(instance, r_star: float, reference: Clustering = None) -> SymmetrizedSet:
    """Compute A = {p | for all q: d(q,p) <= r* implies d(p,q) <= r*}."""
    if r_star < 0:
        raise ValueError("r_star must be >= 0")
    d = _as_table(instance)
    n = d.shape[0]
    # p fails iff some q has d(q,p) <= r* but d(p,q) > r*
    fails = np.any((d.T <= r_star) & (d > r_star), axis=1)
    members = tuple(int(p) for p in range(n) if not fails[p])
    if not members:
        raise EmptyA(f"no point satisfies the predicate at r*={r_star}")
    a_idx = np.asarray(members)
    nearest = {}
    for p in range(n):
        if fails[p]:
            j = int(d[a_idx, p].argmin())  # first occurrence = smallest index
            nearest[p] = int(a_idx[j])
    restricted = None
    if reference is not None:
        mset = set(members)
        restricted = tuple(tuple(q for q in cl if q in mset)
                           for cl in reference.clusters())
    return SymmetrizedSet(members=members, nearest_in_A=nearest,
                          restricted_clusters=restricted)
