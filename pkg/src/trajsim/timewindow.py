"""Time-window Fréchet distance under the constant- and varying-speed models,
plus time-windowed discrete Fréchet and DTW.

Constant speed
    The free-space diagram is laid over time axes and every cell edge's
    free interval is clipped to the band ``|t - t'| <= sigma``.  Inside a
    cell both the free space (an affine image of an ellipse) and the band
    are convex, so their intersection is convex and the usual edge-interval
    propagation stays exact.

Varying speed
    Only sample pairings matter.  A cell is usable when both endpoints of
    each of its two segments can be paired; the path must stay inside the
    union of usable (closed) cells.

Windows are closed (``<=``) throughout.  When no monotone path exists at
any distance the functions return ``math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .core import SpeedModel, TimedTrajectory
from .frechet import (
    FreeSpaceDiagram,
    bisect_distance,
    critical_values,
    search_critical,
    _candidate_count,
    _diameter,
    MAX_CRITICAL,
)

__all__ = [
    "TimeWindow",
    "ValidityMask",
    "pair_ranges",
    "valid_pairs_varying_speed",
    "validity_mask",
    "valid_cell_count",
    "tw_frechet_decision",
    "tw_frechet_distance",
    "dtw",
    "tw_discrete_frechet",
    "tw_dtw",
    "sakoe_chiba_dtw",
]


@dataclass(frozen=True)
class TimeWindow:
    sigma: float

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ValueError("sigma must be nonnegative")


def _check_sigma(sigma: float) -> float:
    return TimeWindow(float(sigma)).sigma


def pair_ranges(A: TimedTrajectory, B: TimedTrajectory, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """Inclusive range ``[lo[i], hi[i]]`` of samples of ``B`` pairable with sample ``i`` of ``A``.

    Sample ``j`` pairs with ``i`` when ``|t_i - t'_j| <= sigma``, or when it
    is the last sample before the window or the first one after it.
    """
    sigma = _check_sigma(sigma)
    m = len(B.t) - 1
    first_in = np.searchsorted(B.t, A.t - sigma, side="left")
    past_end = np.searchsorted(B.t, A.t + sigma, side="right")
    lo = np.maximum(first_in - 1, 0).astype(np.intp)
    hi = np.minimum(past_end, m).astype(np.intp)
    assert np.all(np.diff(lo) >= 0) and np.all(np.diff(hi) >= 0), "pairing must be monotone in time"
    return lo, hi


def valid_pairs_varying_speed(A: TimedTrajectory, B: TimedTrajectory, sigma: float) -> set[tuple[int, int]]:
    lo, hi = pair_ranges(A, B, sigma)
    return {(i, j) for i in range(len(lo)) for j in range(lo[i], hi[i] + 1)}


@dataclass(frozen=True)
class ValidityMask:
    """Per-cell usability plus, for constant speed, the band-clipped edge intervals."""

    model: SpeedModel
    sigma: float
    cells: np.ndarray  # (n, m) uint8
    # band clip on vertical / horizontal edges (constant speed only)
    lv_band: tuple[np.ndarray, np.ndarray] | None = None
    bh_band: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def count(self) -> int:
        return int(self.cells.sum())


def validity_mask(A: TimedTrajectory, B: TimedTrajectory, sigma: float, model: SpeedModel) -> ValidityMask:
    sigma = _check_sigma(sigma)
    ta, tb = A.t, B.t
    if model is SpeedModel.VARYING:
        lo, hi = pair_ranges(A, B, sigma)
        j = np.arange(len(tb) - 1)[None, :]
        row_ok = (lo[:, None] <= j) & (j + 1 <= hi[:, None])  # (n+1, m)
        cells = (row_ok[:-1] & row_ok[1:]).astype(np.uint8)
        return ValidityMask(model, sigma, cells)
    # band |t - t'| <= sigma as local parameter ranges on every edge
    dtb = np.diff(tb)
    dta = np.diff(ta)
    v_lo = (ta[:, None] - sigma - tb[None, :-1]) / dtb[None, :]
    v_hi = (ta[:, None] + sigma - tb[None, :-1]) / dtb[None, :]
    h_lo = (tb[None, :] - sigma - ta[:-1, None]) / dta[:, None]
    h_hi = (tb[None, :] + sigma - ta[:-1, None]) / dta[:, None]
    cells = ((ta[:-1, None] - sigma <= tb[None, 1:]) & (tb[None, :-1] <= ta[1:, None] + sigma)).astype(np.uint8)
    return ValidityMask(model, sigma, cells, (v_lo, v_hi), (h_lo, h_hi))


def valid_cell_count(A: TimedTrajectory, B: TimedTrajectory, sigma: float, model: SpeedModel) -> int:
    """``C(n, m, sigma)``: number of free-space cells touched by the window."""
    return validity_mask(A, B, sigma, model).count


def _coerce_model(model) -> SpeedModel:
    return model if isinstance(model, SpeedModel) else SpeedModel(model)


def _decide(A, B, mask: ValidityMask, eps: float, backend=None) -> bool:
    fsd = FreeSpaceDiagram(A.xy, B.xy, eps)
    start = math.dist(A.xy[0], B.xy[0]) <= eps
    lv_lo, lv_hi, bh_lo, bh_hi = fsd.lv_lo, fsd.lv_hi, fsd.bh_lo, fsd.bh_hi
    if mask.lv_band is not None:
        lv_lo = np.maximum(lv_lo, mask.lv_band[0])
        lv_hi = np.minimum(lv_hi, mask.lv_band[1])
        bh_lo = np.maximum(bh_lo, mask.bh_band[0])
        bh_hi = np.minimum(bh_hi, mask.bh_band[1])
    return bool(_backend.get(backend).reach(lv_lo, lv_hi, bh_lo, bh_hi, mask.cells, start))


def tw_frechet_decision(A: TimedTrajectory, B: TimedTrajectory, sigma: float, eps: float,
                        model=SpeedModel.CONSTANT, backend: str | None = None) -> bool:
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    mask = validity_mask(A, B, sigma, _coerce_model(model))
    return _decide(A, B, mask, eps, backend)


def _band_values(A: TimedTrajectory, B: TimedTrajectory, sigma: float) -> np.ndarray:
    """Distances from every vertex of one curve to the other curve's points at band-edge times."""
    out = []
    for P, Q in ((A, B), (B, A)):
        times = np.concatenate([Q.t - sigma, Q.t + sigma])
        times = times[(times >= 0.0) & (times <= 1.0)]
        if len(times) == 0:
            continue
        pts = np.array([P.at_time(t) for t in times])
        out.append(np.hypot(*(Q.xy[:, None, :] - pts[None, :, :]).transpose(2, 0, 1)).ravel())
    return np.concatenate(out) if out else np.empty(0)


def tw_frechet_distance(A: TimedTrajectory, B: TimedTrajectory, sigma: float,
                        model=SpeedModel.CONSTANT, mode: str = "auto", tol: float | None = None,
                        backend: str | None = None) -> float:
    """Smallest ``eps`` accepted by :func:`tw_frechet_decision`, or ``inf``.

    Modes as in :func:`trajsim.frechet.frechet_distance`.  For constant
    speed the candidate set also holds the distances from each vertex to
    the other trajectory's positions at band-boundary times; both models
    add every vertex-pair distance.
    """
    model = _coerce_model(model)
    mask = validity_mask(A, B, sigma, model)
    P, Q = A.xy, B.xy
    pair_d = np.hypot(*(P[:, None, :] - Q[None, :, :]).transpose(2, 0, 1)).ravel()
    top = float(pair_d.max())

    def decide(eps):
        return _decide(A, B, mask, eps, backend)

    if not decide(top * (1 + 1e-9) + 1e-12):
        return math.inf
    n, m = len(P) - 1, len(Q) - 1
    if mode == "auto":
        mode = "exact" if _candidate_count(n + 1, m + 1) <= MAX_CRITICAL else "bisect"
    if mode == "exact":
        # invalid cells can force a path through a grid corner
        cand = np.concatenate([critical_values(P, Q), pair_d])
        if model is SpeedModel.CONSTANT:
            cand = np.concatenate([cand, _band_values(A, B, mask.sigma)])
        return search_critical(cand, decide)
    if mode == "bisect":
        if tol is None:
            tol = 1e-9 * max(_diameter(P, Q), 1e-300)
        lo = max(math.dist(P[0], Q[0]), math.dist(P[-1], Q[-1]))
        return bisect_distance(decide, lo, top * (1 + 1e-9) + 1e-12, tol)
    raise ValueError(f"unknown mode {mode!r}")


# -- discrete measures -------------------------------------------------------


def _xy(c) -> np.ndarray:
    return np.asarray(c.xy if hasattr(c, "xy") else c, dtype=float)


def _full_ranges(n: int, m: int):
    return np.zeros(n + 1, dtype=np.intp), np.full(n + 1, m, dtype=np.intp)


def dtw(A, B, metric=None, backend: str | None = None) -> float:
    """Dynamic time warping: min over couplings of the summed pair distances.

    ``metric`` is an optional callable on two points; Euclidean otherwise.
    """
    P, Q = _xy(A), _xy(B)
    if metric is None:
        lo, hi = _full_ranges(len(P) - 1, len(Q) - 1)
        return float(_backend.get(backend).band_dp(P, Q, lo, hi, _backend.DTW)[0])
    n, m = len(P), len(Q)
    D = np.full((n + 1, m + 1), math.inf)
    D[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            D[i, j] = metric(P[i - 1], Q[j - 1]) + min(D[i - 1, j], D[i, j - 1], D[i - 1, j - 1])
    return float(D[n, m])


def _windowed(A, B, sigma, mode, backend, with_count):
    lo, hi = pair_ranges(A, B, sigma)
    value, cells = _backend.get(backend).band_dp(A.xy, B.xy, lo, hi, mode)
    return (float(value), int(cells)) if with_count else float(value)


def tw_discrete_frechet(A: TimedTrajectory, B: TimedTrajectory, sigma: float,
                        backend: str | None = None, with_count: bool = False):
    """Discrete Fréchet DP evaluated only on varying-speed pairable samples.

    With ``with_count`` also returns the number of evaluated pairs.
    """
    return _windowed(A, B, sigma, _backend.FRECHET, backend, with_count)


def tw_dtw(A: TimedTrajectory, B: TimedTrajectory, sigma: float,
           backend: str | None = None, with_count: bool = False):
    return _windowed(A, B, sigma, _backend.DTW, backend, with_count)


def sakoe_chiba_dtw(A, B, w: int) -> float:
    """Index-band DTW: only pairs with ``|i - j| <= w``."""
    P, Q = _xy(A), _xy(B)
    n, m = len(P), len(Q)
    D = np.full((n + 1, m + 1), math.inf)
    D[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(max(1, i - w), min(m, i + w) + 1):
            c = math.dist(P[i - 1], Q[j - 1])
            D[i, j] = c + min(D[i - 1, j], D[i, j - 1], D[i - 1, j - 1])
    return float(D[n, m])
