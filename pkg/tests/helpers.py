"""Random instance generators and brute-force oracles shared by the tests."""

import numpy as np

from trajsim import _backend
from trajsim.core import LocationMetric, TimedTrajectory

BACKENDS = ["python"] + (["cython"] if _backend.compiled is not None else [])


def random_curve(rng, lo=2, hi=6):
    return rng.random((int(rng.integers(lo, hi + 1)), 2)) * 4.0


def random_timed(rng, lo=2, hi=6):
    n = int(rng.integers(lo, hi + 1))
    t = np.sort(rng.choice(1000, size=n, replace=False)).astype(float)
    return TimedTrajectory(t, rng.random((n, 2)) * 4.0)


def random_metric(rng, n_loc=4):
    syms = "abcdefgh"[:n_loc]
    return LocationMetric.from_coordinates({s: tuple(rng.random(2) * 3.0) for s in syms})


def random_string(rng, metric, lo=1, hi=4):
    return "".join(rng.choice(list(metric.symbols), size=int(rng.integers(lo, hi + 1))))


def couplings(n, m):
    """All monotone couplings of index ranges [0, n) and [0, m)."""
    def rec(path):
        i, j = path[-1]
        if (i, j) == (n - 1, m - 1):
            yield path
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            if i + di < n and j + dj < m:
                yield from rec(path + [(i + di, j + dj)])
    yield from rec([(0, 0)])


def pair_matrix(P, Q):
    """Pairwise Euclidean distances as sqrt(dx*dx + dy*dy), the kernels' formula."""
    P, Q = np.asarray(P, float), np.asarray(Q, float)
    diff = P[:, None, :] - Q[None, :, :]
    return np.sqrt(diff[..., 0] * diff[..., 0] + diff[..., 1] * diff[..., 1])


def brute_discrete_frechet(P, Q):
    d = pair_matrix(P, Q)
    return min(max(d[i, j] for i, j in c) for c in couplings(len(P), len(Q)))


def brute_dtw(P, Q):
    d = pair_matrix(P, Q)
    return min(sum(d[i, j] for i, j in c) for c in couplings(len(P), len(Q)))


def resample(X, k):
    X = np.asarray(X, float)
    pts = [X[0]]
    for a, b in zip(X[:-1], X[1:]):
        for f in np.arange(1, k + 1) / k:
            pts.append(a + f * (b - a))
    return np.array(pts)


def dense_frechet_upper(P, Q, k=200):
    """Discrete Fréchet of densely resampled curves: an upper bound near the continuous value."""
    from trajsim.frechet import discrete_frechet

    return discrete_frechet(resample(P, k), resample(Q, k))


#: (criterion, passed, detail) lines collected by the acceptance suite
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def report(criterion: str, ok: bool, detail: str) -> bool:
    ACCEPTANCE_LINES.append((criterion, bool(ok), detail))
    print(f"[acceptance {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
    return bool(ok)
