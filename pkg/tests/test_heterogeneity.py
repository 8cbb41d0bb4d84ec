import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rhythmform.errors import InsufficientDataError
from rhythmform.heterogeneity import (count_patterns, heterogeneity, ordinal_pattern, pattern_distribution,
                                      permutation_entropy)


def enumerate_patterns(dim):
    """Distinct dense-rank vectors over all tuples in {1..dim}^dim."""
    return {ordinal_pattern(t) for t in itertools.product(range(1, dim + 1), repeat=dim)}


@pytest.mark.parametrize("window, ranks", [((2, 2), (0, 0)), ((1, 3, 2), (0, 2, 1)), ((2, 1, 2), (1, 0, 1))])
def test_ordinal_pattern(window, ranks):
    assert ordinal_pattern(window) == ranks


def test_ordinal_pattern_needs_two_values():
    with pytest.raises(ValueError):
        ordinal_pattern((1,))


@pytest.mark.parametrize("dim, expected", [(2, 3), (3, 13), (4, 75)])
def test_count_patterns_values(dim, expected):
    assert count_patterns(dim) == expected


@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_count_patterns_matches_enumeration(dim):
    assert count_patterns(dim) == len(enumerate_patterns(dim))


@pytest.mark.parametrize("dim", [1, 9])
def test_count_patterns_range(dim):
    with pytest.raises(ValueError):
        count_patterns(dim)


def test_distribution_worked_example():
    dist = pattern_distribution((2, 2, 1, 1, 2), 2)
    assert dist.counts == {(0, 0): 2, (1, 0): 1, (0, 1): 1}
    assert dist.total == 4


def test_entropy_worked_example():
    expected = -(0.5 * math.log(0.5) + 2 * 0.25 * math.log(0.25)) / math.log(3)
    assert heterogeneity((2, 2, 1, 1, 2), 2) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.9464, abs=5e-5)


def test_constant_series():
    dist = pattern_distribution([4] * 10, 3)
    assert dist.counts == {(0, 0, 0): 8}
    assert permutation_entropy(dist) == 0.0


def test_increasing_series():
    assert pattern_distribution(range(1, 10), 3).counts == {(0, 1, 2): 7}


def test_stride():
    dist = pattern_distribution((1, 2, 3, 3, 2, 1, 1), 3, stride=2)
    assert dist.total == 3
    assert dist.counts == {(0, 1, 2): 1, (1, 1, 0): 1, (1, 0, 0): 1}


def test_too_short():
    with pytest.raises(InsufficientDataError):
        pattern_distribution((1, 2), 3)


def test_uniform_over_all_patterns_is_one():
    # concatenating one window per pattern, evaluated with stride = dim
    windows = sorted(enumerate_patterns(3))
    series = [v + 1 for w in windows for v in w]
    assert heterogeneity(series, 3, stride=3) == pytest.approx(1.0)


durations = st.lists(st.integers(1, 12), min_size=3, max_size=60)


@settings(max_examples=300, deadline=None)
@given(durations, st.integers(2, 5))
def test_entropy_bounds(values, dim):
    if len(values) < dim:
        return
    h = heterogeneity(values, dim)
    assert -1e-12 <= h <= 1 + 1e-12


@settings(max_examples=200, deadline=None)
@given(durations, st.integers(1, 50))
def test_scale_invariance(values, factor):
    assert heterogeneity(values) == heterogeneity([v * factor for v in values])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=1, max_size=13))
def test_label_permutation_symmetry(counts):
    from rhythmform.heterogeneity import PatternDistribution

    patterns = sorted(enumerate_patterns(3))
    a = PatternDistribution(dict(zip(patterns, counts)), 3, sum(counts))
    b = PatternDistribution(dict(zip(reversed(patterns), counts)), 3, sum(counts))
    assert permutation_entropy(a) == pytest.approx(permutation_entropy(b))
