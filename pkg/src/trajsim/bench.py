"""Timing sweeps: growth of the discrete Fréchet DP, cost of the windowed DP
against its valid-pair count, and compiled versus pure-Python kernels."""

from __future__ import annotations

import time

import numpy as np

from . import _backend
from .core import LocationMetric, TimedTrajectory
from .editdist import metric_edit_distance
from .frechet import discrete_frechet
from .timewindow import tw_discrete_frechet

__all__ = [
    "time_call",
    "random_walk",
    "scaling_exponent",
    "bench_discrete_frechet",
    "bench_tw_cells",
    "bench_backends",
    "bench_metric_edit",
    "run_all",
]

DEFAULT_SIZES = (256, 512, 1024, 2048)


def time_call(fn, repeats: int = 5) -> float:
    """Best wall time over ``repeats`` calls, in seconds."""
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def random_walk(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n + 1`` points of a planar Gaussian random walk."""
    return np.cumsum(rng.normal(size=(n + 1, 2)), axis=0)


def scaling_exponent(sizes, seconds) -> float:
    """Slope of the least-squares line through ``(log n, log t)``."""
    return float(np.polyfit(np.log(sizes), np.log(seconds), 1)[0])


def bench_discrete_frechet(sizes=DEFAULT_SIZES, seed: int = 0, backend: str | None = None,
                           repeats: int = 5) -> dict:
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        A, B = random_walk(n, rng), random_walk(n, rng)
        rows.append({"n": int(n), "seconds": time_call(lambda: discrete_frechet(A, B, backend=backend), repeats)})
    expo = scaling_exponent([r["n"] for r in rows], [r["seconds"] for r in rows])
    return {"measure": "discrete-frechet", "backend": backend or _backend.name, "rows": rows, "exponent": expo}


def bench_tw_cells(n: int = 2048, sigmas=None, seed: int = 0, backend: str | None = None,
                   repeats: int = 5) -> dict:
    """Windowed discrete Fréchet runtime against the valid-pair count ``C``."""
    rng = np.random.default_rng(seed)
    if sigmas is None:
        sigmas = np.geomspace(1.0 / n, 1.0, 10)
    ta = np.sort(rng.random(n + 1))
    tb = np.sort(rng.random(n + 1))
    A = TimedTrajectory(ta, random_walk(n, rng))
    B = TimedTrajectory(tb, random_walk(n, rng))
    rows = []
    for s in sigmas:
        _, cells = tw_discrete_frechet(A, B, float(s), backend=backend, with_count=True)
        secs = time_call(lambda: tw_discrete_frechet(A, B, float(s), backend=backend), repeats)
        rows.append({"sigma": float(s), "cells": int(cells), "seconds": secs})
    r = float(np.corrcoef([x["cells"] for x in rows], [x["seconds"] for x in rows])[0, 1])
    return {"measure": "tw-discrete-frechet", "backend": backend or _backend.name, "n": n, "rows": rows,
            "pearson_r": r}


def bench_backends(sizes=(64, 128, 256), seed: int = 0, repeats: int = 3) -> dict:
    """Discrete Fréchet wall time per backend and the compiled speedup."""
    if _backend.compiled is None:
        return {"available": False, "rows": []}
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        A, B = random_walk(n, rng), random_walk(n, rng)
        tc = time_call(lambda: discrete_frechet(A, B, backend="cython"), repeats)
        tp = time_call(lambda: discrete_frechet(A, B, backend="python"), repeats)
        rows.append({"n": int(n), "cython": tc, "python": tp, "speedup": tp / tc if tc > 0 else float("inf")})
    return {"available": True, "rows": rows}


def bench_metric_edit(sizes=(8, 10), seed: int = 0, backend: str | None = None, repeats: int = 1) -> dict:
    """Full metric edit DP; the model predicts ``(n'/n)^7`` growth for n = m."""
    rng = np.random.default_rng(seed)
    syms = [f"p{i}" for i in range(6)]
    metric = LocationMetric.from_coordinates({s: tuple(rng.random(2)) for s in syms})
    rows = []
    for n in sizes:
        a = list(rng.choice(syms, n))
        b = list(rng.choice(syms, n))
        secs = time_call(lambda: metric_edit_distance(a, b, metric, backend=backend), repeats)
        rows.append({"n": int(n), "seconds": secs})
    ratio = rows[-1]["seconds"] / rows[0]["seconds"] if rows[0]["seconds"] > 0 else float("nan")
    model = (sizes[-1] / sizes[0]) ** 7
    return {"measure": "metric-edit", "backend": backend or _backend.name, "rows": rows,
            "observed_ratio": ratio, "model_ratio": model}


def run_all(seed: int = 0, quick: bool = False) -> dict:
    if quick:
        return {
            "schema": 1,
            "discrete_frechet": bench_discrete_frechet((128, 256, 512), seed=seed, repeats=3),
            "tw_cells": bench_tw_cells(512, seed=seed, repeats=3),
            "backends": bench_backends((32, 64), seed=seed, repeats=1),
            "metric_edit": bench_metric_edit((4, 6), seed=seed),
        }
    return {
        "schema": 1,
        "discrete_frechet": bench_discrete_frechet(seed=seed),
        "tw_cells": bench_tw_cells(seed=seed),
        "backends": bench_backends(seed=seed),
        "metric_edit": bench_metric_edit(seed=seed),
    }
