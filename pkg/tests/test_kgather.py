import itertools
import math

import numpy as np
import pytest

from trajsim.core import ConfigurationError, SizeGuardError, SymbolTrajectory, TimedTrajectory, ValidationError
from trajsim.kgather import (
    DistanceMatrix,
    FlowNetwork,
    MeasureConfig,
    greedy_centers,
    kgather_approx,
    kgather_exact,
    kgather_feasible,
    max_flow,
    pairwise_distances,
)


def random_dm(rng, n):
    pts = rng.random((n, 2))
    return DistanceMatrix(np.hypot(*(pts[:, None] - pts[None]).transpose(2, 0, 1)))


def partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def brute_radius(dm, k):
    """Optimal k-gather radius over every set partition."""
    best = math.inf
    for part in partitions(list(range(len(dm)))):
        if min(len(p) for p in part) < k:
            continue
        r = max(min(max(dm[c, v] for v in p) for c in p) for p in part)
        best = min(best, r)
    return best


class TestDistanceMatrix:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValidationError):
            DistanceMatrix([[0, 1], [2, 0]])

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(ValidationError):
            DistanceMatrix([[1, 1], [1, 0]])

    def test_candidates(self):
        assert DistanceMatrix([[0, 2], [2, 0]]).candidates().tolist() == [0, 2]


class TestFlow:
    def test_classic_network(self):
        net = FlowNetwork(4)
        net.add_edge(0, 1, 3)
        net.add_edge(0, 2, 2)
        e = net.add_edge(1, 2, 1)
        net.add_edge(1, 3, 2)
        net.add_edge(2, 3, 3)
        assert max_flow(net, 0, 3) == 5
        assert net.flow_on(e) in (0, 1)

    def test_bipartite_matching(self, rng):
        for _ in range(20):
            L, R = 4, 4
            adj = rng.random((L, R)) < 0.4
            net = FlowNetwork(L + R + 2)
            s, t = L + R, L + R + 1
            for i in range(L):
                net.add_edge(s, i, 1)
                for j in range(R):
                    if adj[i, j]:
                        net.add_edge(i, L + j, 1)
            for j in range(R):
                net.add_edge(L + j, t, 1)
            best = max(sum(1 for i, j in enumerate(perm) if adj[i, j]) for perm in itertools.permutations(range(R)))
            assert max_flow(net, s, t) == best

    def test_bad_capacity(self):
        with pytest.raises(ValueError):
            FlowNetwork(2).add_edge(0, 1, 1.5)


class TestClustering:
    def test_greedy_centers_separated(self, rng):
        dm = random_dm(rng, 12)
        cs = greedy_centers(dm, 0.3)
        for a, b in itertools.combinations(cs, 2):
            assert dm[a, b] > 0.3

    def test_two_clear_groups(self):
        pts = np.array([(0, 0), (0, 1), (0, 2), (10, 0), (10, 1), (10, 2)], float)
        dm = DistanceMatrix(np.hypot(*(pts[:, None] - pts[None]).transpose(2, 0, 1)))
        cl = kgather_exact(dm, 3)
        assert cl.radius == 1.0
        assert sorted(c.members for c in cl.clusters) == [(0, 1, 2), (3, 4, 5)]
        cl.check(dm, 3)

    def test_exact_matches_partition_brute_force(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 8))
            k = int(rng.integers(1, min(3, n) + 1))
            dm = random_dm(rng, n)
            assert kgather_exact(dm, k).radius == brute_radius(dm, k)

    def test_approx_bound(self, rng):
        for _ in range(40):
            n = int(rng.integers(2, 11))
            k = int(rng.integers(1, min(3, n) + 1))
            dm = random_dm(rng, n)
            ex, ap = kgather_exact(dm, k), kgather_approx(dm, k)
            ex.check(dm, k)
            ap.check(dm, k)
            assert ex.radius <= ap.radius <= 2 * ex.radius + 1e-12

    def test_k_one_is_zero(self, rng):
        dm = random_dm(rng, 5)
        assert kgather_approx(dm, 1).radius == 0.0

    def test_feasible_none_when_too_small(self, rng):
        dm = random_dm(rng, 6)
        assert kgather_feasible(dm, 3, 0.0) is None

    def test_bad_k(self, rng):
        dm = random_dm(rng, 3)
        with pytest.raises(ValueError):
            kgather_approx(dm, 4)
        with pytest.raises(ValueError):
            kgather_exact(dm, 0)

    def test_exact_cap(self, rng):
        with pytest.raises(SizeGuardError):
            kgather_exact(random_dm(rng, 17), 2)

    def test_to_json(self, rng):
        dm = random_dm(rng, 4)
        js = kgather_approx(dm, 2).to_json()
        assert sorted(v for c in js["clusters"] for v in c["members"]) == [0, 1, 2, 3]


class TestPairwise:
    def test_symbolic(self):
        dm = pairwise_distances([SymbolTrajectory("ab"), SymbolTrajectory("abc"), SymbolTrajectory("c")],
                                MeasureConfig("edit"))
        assert dm.d.tolist() == [[0, 1, 3], [1, 0, 2], [3, 2, 0]]

    def test_jobs_agree(self, rng):
        items = [TimedTrajectory.uniform(rng.random((4, 2))) for _ in range(5)]
        cfg = MeasureConfig("discrete-frechet")
        np.testing.assert_array_equal(pairwise_distances(items, cfg).d, pairwise_distances(items, cfg, jobs=2).d)

    def test_kind_mismatch(self):
        with pytest.raises(ConfigurationError):
            pairwise_distances([SymbolTrajectory("ab"), SymbolTrajectory("b")], MeasureConfig("dtw"))

    @pytest.mark.parametrize("kwargs", [{"name": "nope"}, {"name": "tw-dtw"}, {"name": "metric-edit"}, {"name": "jaccard", "w": 0}])
    def test_bad_config(self, kwargs):
        with pytest.raises(ConfigurationError):
            MeasureConfig(**kwargs)
