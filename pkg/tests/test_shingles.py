import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trajsim.core import SymbolTrajectory
from trajsim.shingles import UndefinedDistanceError, jaccard_distance, shingle_set

strings = st.text("abcd", min_size=2, max_size=8)


def test_shingles_are_contiguous():
    assert shingle_set("abcab", 2).shingles == {("a", "b"), ("b", "c"), ("c", "a")}
    assert len(shingle_set(SymbolTrajectory(["x", "y", "z"]), 3)) == 1


def test_short_string_has_no_shingles():
    assert len(shingle_set("a", 2)) == 0


def test_known_value():
    # {ab, bc} vs {ab, bd}: one shared of three
    assert jaccard_distance("abc", "abd", 2) == pytest.approx(2 / 3)


def test_both_empty_undefined():
    with pytest.raises(UndefinedDistanceError):
        jaccard_distance("a", "b", 2)
    with pytest.raises(ValueError):
        jaccard_distance("a", "b", 2)


@pytest.mark.parametrize("w", [0, -1, 1.5])
def test_bad_width(w):
    with pytest.raises(ValueError):
        shingle_set("abc", w)


@settings(max_examples=100, deadline=None)
@given(strings, strings, strings, st.integers(1, 2))
def test_metric_axioms(a, b, c, w):
    dab = jaccard_distance(a, b, w)
    assert 0.0 <= dab <= 1.0
    assert dab == jaccard_distance(b, a, w)
    assert jaccard_distance(a, a, w) == 0.0
    assert jaccard_distance(a, c, w) <= dab + jaccard_distance(b, c, w) + 1e-12


def test_reordering_blind_spot():
    # same shingle set, different strings: a pseudometric on strings
    assert jaccard_distance("abab", "baba", 1) == 0.0
