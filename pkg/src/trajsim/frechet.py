"""Continuous Fréchet distance via the free-space diagram, and the discrete variant."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .core import PolyCurve

__all__ = [
    "Interval",
    "FreeSpaceCell",
    "FreeSpaceDiagram",
    "free_space_cell",
    "free_space_diagram",
    "frechet_decision",
    "frechet_distance",
    "discrete_frechet",
    "critical_values",
    "search_critical",
    "bisect_distance",
]

#: relative slack applied when a candidate value is tested, so that a
#: critical value whose free interval degenerates to a point is accepted
CRITICAL_SLACK = 1e-10

# Largest number of critical values enumerated before "auto" switches to bisection.
MAX_CRITICAL = 2_000_000

Interval = tuple[float, float] | None


@dataclass(frozen=True)
class FreeSpaceCell:
    """Free intervals on the four edges of one cell, in local ``[0, 1]`` units.

    ``left``/``right`` run along the vertical axis (second curve),
    ``bottom``/``top`` along the horizontal axis (first curve).
    """

    left: Interval
    bottom: Interval
    right: Interval
    top: Interval


def _coerce(c) -> np.ndarray:
    if isinstance(c, PolyCurve):
        return c.xy
    if hasattr(c, "xy"):
        return np.asarray(c.xy, dtype=float)
    return PolyCurve(c).xy


def _vertex_segment_intervals(P: np.ndarray, Q: np.ndarray, eps: float):
    """Free interval on every segment of ``Q`` for every vertex of ``P``.

    Returns ``(lo, hi)`` of shape ``(len(P), len(Q) - 1)``; empty where ``lo > hi``.
    """
    q0 = Q[:-1][None, :, :]
    d = (Q[1:] - Q[:-1])[None, :, :]
    w = q0 - P[:, None, :]
    a = np.einsum("ijk,ijk->ij", np.broadcast_to(d, w.shape), np.broadcast_to(d, w.shape))
    wd = np.einsum("ijk,ijk->ij", w, np.broadcast_to(d, w.shape))
    with np.errstate(divide="ignore", invalid="ignore"):
        u_star = np.where(a > 0, -wd / a, 0.0)
        foot = w + u_star[..., None] * d
        h2 = np.einsum("ijk,ijk->ij", foot, foot)
        half = np.sqrt(np.maximum(eps * eps - h2, 0.0) / np.where(a > 0, a, 1.0))
    free = h2 <= eps * eps
    degenerate = a == 0
    lo = np.where(degenerate, 0.0, np.maximum(u_star - half, 0.0))
    hi = np.where(degenerate, 1.0, np.minimum(u_star + half, 1.0))
    empty = ~free | (lo > hi)
    lo = np.where(empty, 2.0, lo)
    hi = np.where(empty, -1.0, hi)
    return lo, hi


def _as_interval(lo: float, hi: float) -> Interval:
    return None if lo > hi else (float(lo), float(hi))


def free_space_cell(seg_a, seg_b, eps: float) -> FreeSpaceCell:
    """Free-space cell of segment ``seg_a`` (horizontal) against ``seg_b`` (vertical)."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    A = np.asarray(seg_a, dtype=float).reshape(2, 2)
    B = np.asarray(seg_b, dtype=float).reshape(2, 2)
    vlo, vhi = _vertex_segment_intervals(A, B, eps)
    hlo, hhi = _vertex_segment_intervals(B, A, eps)
    return FreeSpaceCell(
        left=_as_interval(vlo[0, 0], vhi[0, 0]),
        bottom=_as_interval(hlo[0, 0], hhi[0, 0]),
        right=_as_interval(vlo[1, 0], vhi[1, 0]),
        top=_as_interval(hlo[1, 0], hhi[1, 0]),
    )


class FreeSpaceDiagram:
    """Free intervals on every cell edge for a fixed ``eps``.

    ``lv_lo[i, j], lv_hi[i, j]``: vertical edge through vertex ``i`` of the
    first curve, over segment ``j`` of the second.  ``bh_lo[i, j]``,
    ``bh_hi[i, j]``: horizontal edge through vertex ``j`` of the second
    curve, over segment ``i`` of the first.
    """

    def __init__(self, A, B, eps: float):
        self.A = _coerce(A)
        self.B = _coerce(B)
        self.eps = float(eps)
        self.lv_lo, self.lv_hi = _vertex_segment_intervals(self.A, self.B, eps)
        hlo, hhi = _vertex_segment_intervals(self.B, self.A, eps)
        self.bh_lo, self.bh_hi = hlo.T.copy(), hhi.T.copy()

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.A) - 1, len(self.B) - 1

    def cell(self, i: int, j: int) -> FreeSpaceCell:
        return FreeSpaceCell(
            left=_as_interval(self.lv_lo[i, j], self.lv_hi[i, j]),
            bottom=_as_interval(self.bh_lo[i, j], self.bh_hi[i, j]),
            right=_as_interval(self.lv_lo[i + 1, j], self.lv_hi[i + 1, j]),
            top=_as_interval(self.bh_lo[i, j + 1], self.bh_hi[i, j + 1]),
        )

    def reachable(self, valid=None, backend: str | None = None) -> bool:
        n, m = self.shape
        if valid is None:
            valid = np.ones((n, m), dtype=np.uint8)
        start = math.dist(self.A[0], self.B[0]) <= self.eps
        return bool(_backend.get(backend).reach(self.lv_lo, self.lv_hi, self.bh_lo, self.bh_hi,
                                                np.asarray(valid, dtype=np.uint8), start))


def free_space_diagram(A, B, eps: float) -> FreeSpaceDiagram:
    return FreeSpaceDiagram(A, B, eps)


def _point_curve_distance(p: np.ndarray, Q: np.ndarray) -> float:
    # a single point against a polyline: the leash must reach every vertex
    return float(np.max(np.hypot(*(Q - p).T)))


def frechet_decision(A, B, eps: float, backend: str | None = None) -> bool:
    """True iff the Fréchet distance of ``A`` and ``B`` is at most ``eps``."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    P, Q = _coerce(A), _coerce(B)
    if len(P) == 1 or len(Q) == 1:
        return _degenerate_distance(P, Q) <= eps
    return FreeSpaceDiagram(P, Q, eps).reachable(backend=backend)


def _degenerate_distance(P, Q) -> float:
    if len(P) == 1:
        return _point_curve_distance(P[0], Q)
    return _point_curve_distance(Q[0], P)


def _point_segment_distances(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Distance from each vertex of ``P`` to each segment of ``Q``."""
    q0 = Q[:-1][None, :, :]
    d = (Q[1:] - Q[:-1])[None, :, :]
    w = P[:, None, :] - q0
    a = np.sum(d * d, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.clip(np.where(a > 0, np.sum(w * d, axis=-1) / a, 0.0), 0.0, 1.0)
    foot = q0 + u[..., None] * d
    return np.hypot(*(P[:, None, :] - foot).transpose(2, 0, 1)).ravel()


def _bisector_values(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Distances at which two vertices of ``P`` reach a common point of a ``Q`` segment.

    For vertices ``p_k, p_l`` (``k < l``) and a segment of ``Q``, the point of
    the segment equidistant to both opens a monotone passage.
    """
    k, l = np.triu_indices(len(P), 1)
    if len(k) == 0:
        return np.empty(0)
    pk, pl = P[k], P[l]
    q0 = Q[:-1]
    d = Q[1:] - Q[:-1]
    diff = pl - pk  # (pairs, 2)
    num = (np.sum(pl * pl, axis=1) - np.sum(pk * pk, axis=1))[:, None] - 2.0 * diff @ q0.T
    den = 2.0 * diff @ d.T
    with np.errstate(divide="ignore", invalid="ignore"):
        u = num / den
    ok = np.isfinite(u) & (u >= 0.0) & (u <= 1.0)
    pi, sj = np.nonzero(ok)
    pts = q0[sj] + u[pi, sj][:, None] * d[sj]
    return np.hypot(*(pts - pk[pi]).T)


def critical_values(A, B) -> np.ndarray:
    """Sorted candidate values containing the Fréchet distance of ``A``, ``B``."""
    P, Q = _coerce(A), _coerce(B)
    vals = [
        np.array([math.dist(P[0], Q[0]), math.dist(P[-1], Q[-1])]),
        _point_segment_distances(P, Q),
        _point_segment_distances(Q, P),
        _bisector_values(P, Q),
        _bisector_values(Q, P),
    ]
    return np.unique(np.concatenate(vals))


def _candidate_count(n: int, m: int) -> int:
    return n * m * 2 + (n * n * m + m * m * n) // 2


def search_critical(candidates: np.ndarray, decide) -> float:
    """Smallest candidate accepted by the monotone predicate ``decide``.

    Returns ``inf`` when even the largest candidate is rejected.
    """
    cand = np.unique(np.asarray(candidates, dtype=float))
    cand = cand[np.isfinite(cand)]

    def ok(c):
        return decide(c + CRITICAL_SLACK * max(1.0, c))

    if len(cand) == 0 or not ok(cand[-1]):
        return math.inf
    lo, hi = 0, len(cand) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def bisect_distance(decide, lo: float, hi: float, tol: float) -> float:
    """Bisection on a monotone predicate; ``decide(hi)`` must hold."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if decide(lo):
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if decide(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _diameter(P: np.ndarray, Q: np.ndarray) -> float:
    pts = np.vstack([P, Q])
    return float(np.hypot(*(pts.max(axis=0) - pts.min(axis=0))))


def frechet_distance(A, B, mode: str = "auto", tol: float | None = None,
                     backend: str | None = None) -> float:
    """Continuous Fréchet distance.

    ``mode="exact"`` binary-searches the enumerated critical values with the
    decision procedure; ``mode="bisect"`` brackets the value to within
    ``tol`` (default ``1e-9`` times the bounding-box diagonal); ``"auto"``
    picks exact unless the candidate set would be huge.
    """
    if tol is not None and tol <= 0:
        raise ValueError("tol must be positive")
    P, Q = _coerce(A), _coerce(B)
    if len(P) == 1 or len(Q) == 1:
        return _degenerate_distance(P, Q)
    n, m = len(P) - 1, len(Q) - 1
    if mode == "auto":
        mode = "exact" if _candidate_count(n + 1, m + 1) <= MAX_CRITICAL else "bisect"

    def decide(eps):
        return FreeSpaceDiagram(P, Q, eps).reachable(backend=backend)

    if mode == "exact":
        return search_critical(critical_values(P, Q), decide)
    if mode == "bisect":
        if tol is None:
            tol = 1e-9 * max(_diameter(P, Q), 1e-300)
        lo = max(math.dist(P[0], Q[0]), math.dist(P[-1], Q[-1]))
        hi = discrete_frechet(P, Q, backend=backend)
        return bisect_distance(decide, lo, hi, tol)
    raise ValueError(f"unknown mode {mode!r}")


def discrete_frechet(A, B, backend: str | None = None) -> float:
    """Discrete Fréchet distance: min over couplings of the max paired distance."""
    P, Q = _coerce(A), _coerce(B)
    n, m = len(P) - 1, len(Q) - 1
    lo = np.zeros(n + 1, dtype=np.intp)
    hi = np.full(n + 1, m, dtype=np.intp)
    value, _ = _backend.get(backend).band_dp(P, Q, lo, hi, _backend.FRECHET)
    return float(value)
