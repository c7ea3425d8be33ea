"""k-gather clustering over a precomputed distance matrix.

``kgather_approx`` is the greedy-cover plus max-flow 2-approximation;
``kgather_exact`` is an exhaustive oracle for tiny inputs.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import ConfigurationError, SizeGuardError, SpeedModel, SymbolTrajectory, TimedTrajectory, ValidationError

__all__ = [
    "DistanceMatrix",
    "Cluster",
    "Clustering",
    "FlowNetwork",
    "MeasureConfig",
    "TIMED_MEASURES",
    "SYMBOLIC_MEASURES",
    "pairwise_distances",
    "max_flow",
    "greedy_centers",
    "kgather_feasible",
    "kgather_approx",
    "kgather_exact",
    "kgather_exact_feasible",
    "EXACT_CAP",
]

EXACT_CAP = 16


class DistanceMatrix:
    """Symmetric, nonnegative, zero-diagonal square matrix."""

    def __init__(self, values, atol: float = 1e-12):
        d = np.array(values, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValidationError("distance matrix must be square")
        if np.any(np.isnan(d)) or np.any(d < 0):
            raise ValidationError("distance matrix entries must be nonnegative numbers")
        if np.any(np.abs(np.diag(d)) > atol):
            raise ValidationError("distance matrix must have a zero diagonal")
        if not np.allclose(d, d.T, atol=atol, rtol=0):
            raise ValidationError("distance matrix must be symmetric")
        d = np.minimum(d, d.T)
        np.fill_diagonal(d, 0.0)
        d.setflags(write=False)
        self.d = d

    def __len__(self) -> int:
        return self.d.shape[0]

    def __getitem__(self, ij):
        return self.d[ij]

    def candidates(self) -> np.ndarray:
        """Sorted distinct pairwise values (including 0)."""
        return np.unique(self.d)


@dataclass(frozen=True)
class Cluster:
    center: int
    members: tuple[int, ...]


@dataclass
class Clustering:
    clusters: list[Cluster]
    radius: float

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "clusters": [{"center": c.center, "members": list(c.members)} for c in self.clusters],
        }

    def check(self, dm: DistanceMatrix, k: int) -> None:
        """Raise ``AssertionError`` unless this is a valid k-gather clustering."""
        seen = sorted(i for c in self.clusters for i in c.members)
        assert seen == list(range(len(dm))), "members must partition the points"
        r = 0.0
        for c in self.clusters:
            assert c.center in c.members, "center must belong to its cluster"
            assert len(c.members) >= k, "cluster smaller than k"
            r = max(r, max(dm[c.center, i] for i in c.members))
        assert r == self.radius, "reported radius differs from the true radius"


# -- max flow ----------------------------------------------------------------


class FlowNetwork:
    """Directed graph with integer capacities, stored as paired residual arcs."""

    def __init__(self, n_nodes: int):
        self.n = n_nodes
        self.head: list[int] = []
        self.cap: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n_nodes)]

    def add_edge(self, u: int, v: int, cap: int) -> int:
        if cap < 0 or int(cap) != cap:
            raise ValueError("capacities must be nonnegative integers")
        e = len(self.head)
        self.head += [v, u]
        self.cap += [int(cap), 0]
        self.adj[u].append(e)
        self.adj[v].append(e + 1)
        return e

    def flow_on(self, e: int) -> int:
        """Flow currently pushed through arc ``e`` (as returned by ``add_edge``)."""
        return self.cap[e ^ 1]


def max_flow(net: FlowNetwork, s: int, t: int) -> int:
    """Dinic's blocking-flow algorithm; mutates the residual capacities of ``net``."""
    if s == t:
        raise ValueError("source and sink must differ")
    head, cap, adj = net.head, net.cap, net.adj
    total = 0
    while True:
        level = [-1] * net.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in adj[u]:
                if cap[e] > 0 and level[head[e]] < 0:
                    level[head[e]] = level[u] + 1
                    q.append(head[e])
        if level[t] < 0:
            return total
        it = [0] * net.n

        def push(u: int, f: int) -> int:
            if u == t:
                return f
            while it[u] < len(adj[u]):
                e = adj[u][it[u]]
                v = head[e]
                if cap[e] > 0 and level[v] == level[u] + 1:
                    got = push(v, min(f, cap[e]))
                    if got:
                        cap[e] -= got
                        cap[e ^ 1] += got
                        return got
                it[u] += 1
            return 0

        while True:
            f = push(s, math.inf)
            if not f:
                break
            total += f


# -- feasibility -------------------------------------------------------------


def greedy_centers(dm: DistanceMatrix, R: float) -> list[int]:
    """Lowest-index unmarked point becomes a center and covers its R-ball."""
    covered = np.zeros(len(dm), dtype=bool)
    centers = []
    for v in range(len(dm)):
        if not covered[v]:
            centers.append(v)
            covered |= dm.d[v] <= R
    return centers


def _assign(dm: DistanceMatrix, centers: Sequence[int], R: float, quota: int, self_first: bool):
    """Flow ``quota`` points to every center; return per-center members or None."""
    n = len(dm)
    C = len(centers)
    s, t = C + n, C + n + 1
    net = FlowNetwork(C + n + 2)
    arcs = []
    cset = set(centers)
    for ci, c in enumerate(centers):
        net.add_edge(s, ci, quota)
        for v in range(n):
            if self_first and v in cset:
                continue
            if dm.d[c, v] <= R:
                arcs.append((net.add_edge(ci, C + v, 1), ci, v))
    for v in range(n):
        net.add_edge(C + v, t, 1)
    if max_flow(net, s, t) < quota * C:
        return None
    members = [[c] if self_first else [] for c in centers]
    for e, ci, v in arcs:
        if net.flow_on(e):
            members[ci].append(v)
    return members


def _finish(dm: DistanceMatrix, centers, members, R: float) -> Clustering:
    placed = {v for ms in members for v in ms}
    for v in range(len(dm)):
        if v in placed:
            continue
        dists = [dm.d[c, v] for c in centers]
        ci = int(np.argmin(dists))
        assert dists[ci] <= R, "leftover point not covered by any center"
        members[ci].append(v)
    clusters = [Cluster(c, tuple(sorted(ms))) for c, ms in zip(centers, members)]
    radius = max(max(dm.d[c.center, v] for v in c.members) for c in clusters)
    return Clustering(clusters, float(radius))


def _condition_one(dm: DistanceMatrix, k: int, R: float) -> bool:
    # every point has k - 1 others within R
    return bool(np.all((dm.d <= R).sum(axis=1) >= k))


def kgather_feasible(dm: DistanceMatrix, k: int, R: float) -> Clustering | None:
    """Both feasibility conditions at radius ``R``; a clustering if they hold."""
    n = len(dm)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    if not _condition_one(dm, k, R):
        return None
    centers = greedy_centers(dm, R)
    members = _assign(dm, centers, R, k, self_first=False)
    if members is None:
        return None
    # centers are more than R apart, so only c itself can route c; swap it in
    for c, ms in zip(centers, members):
        if c not in ms:
            ms[-1] = c
    return _finish(dm, centers, members, R)


def kgather_approx(dm: DistanceMatrix, k: int) -> Clustering:
    """Smallest candidate radius passing :func:`kgather_feasible`.

    Condition one is monotone in ``R`` and is binary-searched; the greedy
    flow check is not monotone, so candidates above that bound are scanned
    in increasing order.  The first success is at most twice the optimum.
    """
    n = len(dm)
    if k > n:
        raise ValueError(f"k = {k} exceeds the number of points ({n})")
    if k < 1:
        raise ValueError("k must be at least 1")
    cand = dm.candidates()
    lo, hi = 0, len(cand) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _condition_one(dm, k, cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    for R in cand[lo:]:
        got = kgather_feasible(dm, k, float(R))
        if got is not None:
            return got
    raise AssertionError("the largest pairwise distance is always feasible")


def kgather_exact_feasible(dm: DistanceMatrix, k: int, R: float) -> Clustering | None:
    """A k-gather clustering of radius at most ``R`` if one exists.

    Tries center subsets in increasing size; each center keeps itself and a
    flow routes ``k - 1`` further points within ``R`` to every center.
    """
    n = len(dm)
    within = dm.d <= R
    for size in range(1, n // k + 1):
        for centers in itertools.combinations(range(n), size):
            if not within[list(centers)].any(axis=0).all():
                continue
            members = _assign(dm, centers, R, k - 1, self_first=True)
            if members is not None:
                return _finish(dm, list(centers), members, R)
    return None


def kgather_exact(dm: DistanceMatrix, k: int, cap: int = EXACT_CAP) -> Clustering:
    """Optimal k-gather clustering by enumerating center subsets per radius."""
    n = len(dm)
    if n > cap:
        raise SizeGuardError(f"exact k-gather enumerates center subsets; n = {n} exceeds the cap of {cap}")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    for R in dm.candidates():
        got = kgather_exact_feasible(dm, k, float(R))
        if got is not None:
            return got
    raise AssertionError("a single cluster at the largest distance is always feasible")


# -- distance matrices ---------------------------------------------------------

TIMED_MEASURES = ("frechet", "discrete-frechet", "dtw", "tw-frechet", "tw-discrete-frechet", "tw-dtw")
SYMBOLIC_MEASURES = ("edit", "metric-edit", "metric-edit-insertfirst", "jaccard")


@dataclass(frozen=True)
class MeasureConfig:
    name: str
    sigma: float | None = None
    speed: SpeedModel = SpeedModel.CONSTANT
    mode: str = "auto"
    tol: float | None = None
    w: int = 2
    metric: object = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in TIMED_MEASURES + SYMBOLIC_MEASURES:
            raise ConfigurationError(f"unknown measure {self.name!r}")
        if self.name.startswith("tw-") and (self.sigma is None or self.sigma < 0):
            raise ConfigurationError(f"measure {self.name!r} needs sigma >= 0")
        if self.name.startswith("metric-edit") and self.metric is None:
            raise ConfigurationError(f"measure {self.name!r} needs a location metric")
        if self.w < 1:
            raise ConfigurationError("shingle width must be at least 1")

    @property
    def kind(self) -> str:
        return "timed" if self.name in TIMED_MEASURES else "symbolic"

    def __call__(self, a, b) -> float:
        from . import editdist, frechet, shingles, timewindow

        n = self.name
        if n == "frechet":
            return frechet.frechet_distance(a.xy, b.xy, mode=self.mode, tol=self.tol)
        if n == "discrete-frechet":
            return frechet.discrete_frechet(a.xy, b.xy)
        if n == "dtw":
            return timewindow.dtw(a.xy, b.xy)
        if n == "tw-frechet":
            return timewindow.tw_frechet_distance(a, b, self.sigma, self.speed, mode=self.mode, tol=self.tol)
        if n == "tw-discrete-frechet":
            return timewindow.tw_discrete_frechet(a, b, self.sigma)
        if n == "tw-dtw":
            return timewindow.tw_dtw(a, b, self.sigma)
        if n == "edit":
            return float(editdist.plain_edit_distance(a, b))
        if n == "metric-edit":
            return editdist.metric_edit_distance(a, b, self.metric)
        if n == "metric-edit-insertfirst":
            return editdist.insertion_first_edit_distance(a, b, self.metric)
        return shingles.jaccard_distance(a, b, self.w)


def _check_kind(items, cfg: MeasureConfig) -> None:
    want = TimedTrajectory if cfg.kind == "timed" else SymbolTrajectory
    for k, it in enumerate(items):
        if not isinstance(it, want):
            raise ConfigurationError(
                f"measure {cfg.name!r} needs {cfg.kind} trajectories; item {k} is {type(it).__name__}"
            )


def _row(args):
    cfg, items, i = args
    return [cfg(items[i], items[j]) for j in range(i + 1, len(items))]


def pairwise_distances(items: Sequence, cfg: MeasureConfig, jobs: int = 1) -> DistanceMatrix:
    """All-pairs matrix; ``jobs > 1`` spreads rows over worker processes."""
    items = list(items)
    _check_kind(items, cfg)
    n = len(items)
    d = np.zeros((n, n))
    tasks = [(cfg, items, i) for i in range(n)]
    if jobs > 1 and n > 2:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row, tasks))
    else:
        rows = [_row(t) for t in tasks]
    for i, row in enumerate(rows):
        d[i, i + 1:] = row
        d[i + 1:, i] = row
    return DistanceMatrix(d)
