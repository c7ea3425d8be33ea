import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_metric, random_string
from trajsim.core import LocationMetric, SizeGuardError, ValidationError
from trajsim.editdist import (
    S,
    T,
    EditCostModel,
    PaddedString,
    edit_graph_distance,
    insertion_first_edit_distance,
    metric_edit_distance,
    plain_edit_distance,
    seq_delete_cost,
)

LINE = LocationMetric.from_coordinates({"a": (0, 0), "b": (1, 0), "c": (2, 0), "d": (1, 1)})


class TestPlain:
    @pytest.mark.parametrize("a,b,want", [
        ("abc", "abc", 0), ("abc", "ab", 1), ("", "abc", 3), ("abc", "adc", 2), ("ab", "ba", 2),
    ])
    def test_known(self, a, b, want):
        assert plain_edit_distance(a, b) == want

    @settings(max_examples=50, deadline=None)
    @given(st.text("abc", max_size=6), st.text("abc", max_size=6))
    def test_symmetric_and_bounded(self, a, b):
        d = plain_edit_distance(a, b)
        assert d == plain_edit_distance(b, a)
        assert abs(len(a) - len(b)) <= d <= len(a) + len(b)


class TestCosts:
    def test_collinear_insert_is_free(self):
        assert EditCostModel(LINE).ins("a", "c", "b") == 0.0

    def test_detour_cost(self):
        assert EditCostModel(LINE).ins("a", "b", "d") == pytest.approx(1 + math.sqrt(2) - 1)

    def test_endpoints(self):
        model = EditCostModel(LINE)
        assert model.ins(S, "c", "a") == 2.0
        assert math.isinf(model.ins(S, T, "a"))

    def test_padded_string(self):
        p = PaddedString("ab")
        assert p[0] is S and p[-1] is T and p.body == ("a", "b")
        with pytest.raises(ValidationError):
            PaddedString([S])

    def test_delete_order_free(self, rng):
        m = random_metric(rng, 4)
        for _ in range(20):
            seq = list(random_string(rng, m, 1, 4))
            x, y = rng.choice(list(m.symbols), 2)
            model = EditCostModel(m)
            totals = set()
            for order in itertools.permutations(range(len(seq))):
                alive = list(range(len(seq)))
                cost = 0.0
                for k in order:
                    pos = alive.index(k)
                    left = x if pos == 0 else seq[alive[pos - 1]]
                    right = y if pos == len(alive) - 1 else seq[alive[pos + 1]]
                    cost += model.delete(left, right, seq[k])
                    alive.pop(pos)
                totals.add(round(cost, 9))
            assert len(totals) == 1
            assert totals.pop() == pytest.approx(seq_delete_cost(x, y, seq, m), abs=1e-9)

    def test_delete_everything_between_endpoints(self):
        assert math.isinf(seq_delete_cost(S, T, "ab", LINE))
        assert seq_delete_cost(S, T, "", LINE) == 0.0


class TestMetricEdit:
    def test_substitution_by_detour(self):
        m = LocationMetric.from_coordinates({"a": (0, 0), "b": (1, 0), "c": (2, 0), "d": (1, 1)})
        # deleting the collinear b is free; inserting d between a and c costs 2*sqrt(2) - 2
        assert metric_edit_distance("abc", "adc", m) == pytest.approx(2 * math.sqrt(2) - 2)
        # inserting first cannot use the free deletion: best merge is abdc, sqrt(2) + (2 - sqrt(2))
        assert insertion_first_edit_distance("abc", "adc", m) == pytest.approx(2.0)

    def test_matches_oracle(self, rng, backend):
        for _ in range(60):
            m = random_metric(rng, int(rng.integers(2, 5)))
            a, b = random_string(rng, m), random_string(rng, m)
            got = metric_edit_distance(a, b, m, backend=backend)
            assert got == pytest.approx(edit_graph_distance(a, b, m), abs=1e-9)

    def test_unrestricted_oracle_never_lower(self, rng):
        for _ in range(10):
            m = random_metric(rng, 3)
            a, b = random_string(rng, m, 1, 3), random_string(rng, m, 1, 3)
            free = edit_graph_distance(a, b, m, unrestricted=True, max_len=len(a) + len(b))
            assert free >= metric_edit_distance(a, b, m) - 1e-9

    def test_identity_and_symmetry(self, rng):
        for _ in range(30):
            m = random_metric(rng)
            a, b = random_string(rng, m), random_string(rng, m)
            assert metric_edit_distance(a, a, m) == 0.0
            assert metric_edit_distance(a, b, m) == pytest.approx(metric_edit_distance(b, a, m), abs=1e-9)

    def test_size_guard(self):
        with pytest.raises(SizeGuardError):
            metric_edit_distance("ab" * 7, "ab", LINE)

    def test_unknown_symbol(self):
        with pytest.raises(ValidationError):
            metric_edit_distance("az", "ab", LINE)

    def test_empty_string(self):
        with pytest.raises(ValidationError):
            metric_edit_distance("", "ab", LINE)


class TestInsertionFirst:
    def test_never_below_full(self, rng):
        for _ in range(80):
            m = random_metric(rng)
            a, b = random_string(rng, m), random_string(rng, m)
            assert insertion_first_edit_distance(a, b, m) >= metric_edit_distance(a, b, m) - 1e-9

    def test_symmetric(self, rng):
        for _ in range(30):
            m = random_metric(rng)
            a, b = random_string(rng, m), random_string(rng, m)
            assert insertion_first_edit_distance(a, b, m) == pytest.approx(insertion_first_edit_distance(b, a, m))

    def test_equal_strings(self):
        assert insertion_first_edit_distance("abc", "abc", LINE) == pytest.approx(0.0, abs=1e-12)

    def test_counterexample_values(self):
        m = LocationMetric.from_coordinates({"a": (0, 0), "b": (0, 1), "c": (1, 0), "d": (2, 1), "e": (2, 0)})
        assert insertion_first_edit_distance("ace", "ae", m) == pytest.approx(0.0)
        assert insertion_first_edit_distance("ae", "acde", m) == pytest.approx(math.sqrt(2))
        assert insertion_first_edit_distance("ace", "acde", m) == pytest.approx(math.sqrt(2))
