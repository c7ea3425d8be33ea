import numpy as np
import pytest

from helpers import brute_discrete_frechet, brute_dtw, couplings, pair_matrix, random_timed
from trajsim.core import SpeedModel, TimedTrajectory
from trajsim.frechet import discrete_frechet, frechet_distance
from trajsim.timewindow import (
    dtw,
    pair_ranges,
    sakoe_chiba_dtw,
    tw_discrete_frechet,
    tw_dtw,
    tw_frechet_decision,
    tw_frechet_distance,
    valid_cell_count,
    valid_pairs_varying_speed,
    validity_mask,
)

MODELS = [SpeedModel.CONSTANT, SpeedModel.VARYING]


def test_pair_ranges_include_neighbours():
    A = TimedTrajectory([0, 0.5, 1], [(0, 0), (1, 0), (2, 0)])
    B = TimedTrajectory([0, 0.2, 0.4, 0.6, 0.8, 1], [(i, 1) for i in range(6)])
    lo, hi = pair_ranges(A, B, 0.05)
    # A's middle sample at 0.5 sees B's samples at 0.4 and 0.6
    assert (lo[1], hi[1]) == (2, 3)
    assert (lo[0], hi[0]) == (0, 1)
    assert (lo[2], hi[2]) == (4, 5)


def test_varying_pairs_match_definition(rng):
    for _ in range(30):
        A, B = random_timed(rng), random_timed(rng)
        sigma = float(rng.random() * 0.5)
        got = valid_pairs_varying_speed(A, B, sigma)
        for i, t in enumerate(A.t):
            inside = [j for j, s in enumerate(B.t) if abs(t - s) <= sigma]
            before = [j for j, s in enumerate(B.t) if s < t - sigma]
            after = [j for j, s in enumerate(B.t) if s > t + sigma]
            want = set(inside)
            if before:
                want.add(before[-1])
            if after:
                want.add(after[0])
            assert {j for (a, j) in got if a == i} == want


def test_discrete_window_matches_restricted_enumeration(rng, backend):
    for _ in range(40):
        A, B = random_timed(rng, 2, 5), random_timed(rng, 2, 5)
        sigma = float(rng.random() * 0.4)
        ok = valid_pairs_varying_speed(A, B, sigma)
        d = pair_matrix(A.xy, B.xy)
        allowed = [c for c in couplings(len(A), len(B)) if all(p in ok for p in c)]
        want_f = min((max(d[p] for p in c) for c in allowed), default=np.inf)
        want_d = min((sum(d[p] for p in c) for c in allowed), default=np.inf)
        assert tw_discrete_frechet(A, B, sigma, backend=backend) == pytest.approx(want_f)
        assert tw_dtw(A, B, sigma, backend=backend) == pytest.approx(want_d)


def test_dtw_matches_enumeration(rng, backend):
    for _ in range(40):
        A, B = random_timed(rng), random_timed(rng)
        assert dtw(A.xy, B.xy, backend=backend) == pytest.approx(brute_dtw(A.xy, B.xy))


def test_dtw_custom_metric():
    l1 = lambda p, q: float(np.abs(p - q).sum())
    assert dtw([(0, 0), (1, 1)], [(0, 0), (1, 1)], metric=l1) == 0.0
    assert dtw([(0, 0)], [(1, 1)], metric=l1) == 2.0


def test_wide_window_equals_unconstrained(rng):
    for _ in range(20):
        A, B = random_timed(rng), random_timed(rng)
        assert tw_discrete_frechet(A, B, 1.0) == brute_discrete_frechet(A.xy, B.xy)
        for model in MODELS:
            assert tw_frechet_distance(A, B, 1.0, model) == pytest.approx(frechet_distance(A.xy, B.xy), abs=1e-9)


def test_sakoe_chiba_correspondence():
    n = 12
    rng = np.random.default_rng(3)
    for _ in range(10):
        A = TimedTrajectory.uniform(rng.random((n, 2)))
        B = TimedTrajectory.uniform(rng.random((n, 2)))
        # a closed window of w - 0.5 steps holds |i - j| <= w - 1; neighbour samples add one
        w = 2
        sigma = (w - 0.5) / (n - 1)
        assert tw_dtw(A, B, sigma) == pytest.approx(sakoe_chiba_dtw(A, B, w))


@pytest.mark.parametrize("model", MODELS)
def test_lower_bound_and_monotone(rng, model):
    for _ in range(15):
        A, B = random_timed(rng, 2, 5), random_timed(rng, 2, 5)
        base = frechet_distance(A.xy, B.xy)
        prev = np.inf
        for sigma in np.linspace(0.0, 1.0, 6):
            v = tw_frechet_distance(A, B, float(sigma), model)
            assert v >= base - 1e-9
            assert v <= prev + 1e-9
            prev = v


@pytest.mark.parametrize("model", MODELS)
def test_exact_matches_bisect(rng, model, backend):
    for _ in range(15):
        A, B = random_timed(rng, 2, 5), random_timed(rng, 2, 5)
        sigma = float(rng.random() * 0.3)
        ex = tw_frechet_distance(A, B, sigma, model, mode="exact", backend=backend)
        bi = tw_frechet_distance(A, B, sigma, model, mode="bisect", backend=backend)
        if np.isinf(ex):
            assert np.isinf(bi)
        else:
            assert ex == pytest.approx(bi, abs=1e-7)
            assert tw_frechet_decision(A, B, sigma, ex * (1 + 1e-9) + 1e-12, model, backend=backend)


def test_constant_speed_zero_window_synchronous():
    # same timestamps: sigma = 0 forces the synchronous pairing
    A = TimedTrajectory([0, 1], [(0, 0), (2, 0)])
    B = TimedTrajectory([0, 1], [(0, 1), (2, 1)])
    assert tw_frechet_distance(A, B, 0.0, SpeedModel.CONSTANT) == pytest.approx(1.0)
    # a late start for B makes synchronous leashes longer
    C = TimedTrajectory([0, 0.5, 1], [(0, 1), (0, 1), (2, 1)])
    assert tw_frechet_distance(A, C, 0.0, SpeedModel.CONSTANT) == pytest.approx(np.sqrt(2))
    assert frechet_distance(A.xy, C.xy) == pytest.approx(1.0)


def test_cell_counts_grow_with_sigma(rng):
    A, B = random_timed(rng, 8, 8), random_timed(rng, 8, 8)
    for model in MODELS:
        counts = [valid_cell_count(A, B, s, model) for s in (0.0, 0.1, 0.3, 1.0)]
        assert counts == sorted(counts)
        assert counts[-1] == 49
        assert validity_mask(A, B, 0.1, model).cells.shape == (7, 7)


def test_negative_sigma():
    A = TimedTrajectory.uniform([(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        tw_frechet_distance(A, A, -0.1)
    with pytest.raises(ValueError):
        tw_dtw(A, A, -1)


def test_with_count_reports_cells():
    A = TimedTrajectory.uniform([(0, 0), (1, 0), (2, 0), (3, 0)])
    v, cells = tw_discrete_frechet(A, A, 0.0, with_count=True)
    assert v == 0.0
    assert cells == 4 + 3 + 3  # diagonal plus the neighbour samples on each side
    assert discrete_frechet(A, A) == 0.0
