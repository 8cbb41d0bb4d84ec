from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from rhythmform.errors import EmptyPieceError
from rhythmform.score import NoteEvent, Score, TimeSignature, measure_grid
from rhythmform.syncopation import (BeatSpec, OffbeatHistogram, emd_1d, measure_proportions, offbeat_histogram,
                                    offbeat_proportion, syncopation)


def transport_cost(p, r):
    """Optimal transport cost by linear programming over the full coupling."""
    n = len(p)
    cost = np.abs(np.subtract.outer(np.arange(n), np.arange(n))).ravel()
    a_eq = np.zeros((2 * n, n * n))
    for i in range(n):
        a_eq[i, i * n:(i + 1) * n] = 1
        a_eq[n + i, i::n] = 1
    res = linprog(cost, A_eq=a_eq, b_eq=np.concatenate([p, r]), bounds=(0, None), method="highs")
    assert res.success
    return res.fun


BEAT = BeatSpec(240)


class TestOffbeatProportion:
    def test_two_of_four(self):
        assert offbeat_proportion([0, 120, 240, 360], 0, BEAT) == Fraction(1, 2)

    def test_three_of_five(self):
        assert offbeat_proportion([0, 120, 240, 360, 600], 0, BEAT) == Fraction(3, 5)

    def test_all_on_beat(self):
        assert offbeat_proportion([0, 240, 480], 0, BEAT) == 0

    def test_relative_to_measure_start(self):
        assert offbeat_proportion([1920, 2040], 1920, BEAT) == Fraction(1, 2)

    def test_empty_measure(self):
        assert offbeat_proportion([], 0, BEAT) is None

    def test_outside_measure(self):
        with pytest.raises(ValueError):
            offbeat_proportion([2000], 0, BEAT, measure_end=1920)

    def test_tolerance(self):
        assert offbeat_proportion([5, 235], 0, BeatSpec(240, tolerance=5)) == 0
        assert offbeat_proportion([6], 0, BeatSpec(240, tolerance=5)) == 1

    def test_tolerance_must_be_below_half_beat(self):
        with pytest.raises(ValueError):
            BeatSpec(240, tolerance=120)


class TestHistogram:
    def test_figure_example(self):
        h = offbeat_histogram([0.5, 0.6], 11)
        assert h.bins[5] == 0.5 and h.bins[6] == 0.5
        assert sum(h.bins) == 1

    def test_all_zero(self):
        assert offbeat_histogram([0, 0, 0]).bins[0] == 1

    def test_nearest_centre(self):
        h = offbeat_histogram([0.24, 0.26], 11)
        assert h.bins[2] == 0.5 and h.bins[3] == 0.5

    def test_ties_go_low(self):
        assert offbeat_histogram([Fraction(1, 4)], 11).bins[2] == 1
        assert offbeat_histogram([0.25], 11).bins[2] == 1

    def test_empty(self):
        with pytest.raises(EmptyPieceError):
            offbeat_histogram([])

    def test_range(self):
        with pytest.raises(ValueError):
            offbeat_histogram([1.2])


class TestEmd:
    def test_identity(self):
        h = offbeat_histogram([0.1, 0.7, 0.7])
        assert emd_1d(h, h) == 0

    def test_figure_example(self):
        assert emd_1d(offbeat_histogram([0.5, 0.6]), OffbeatHistogram.delta(0)) == 5.5

    def test_maximal_transport(self):
        assert emd_1d(OffbeatHistogram.delta(10), OffbeatHistogram.delta(0)) == 10

    def test_mismatched_bins(self):
        with pytest.raises(ValueError):
            emd_1d(OffbeatHistogram.delta(0, 5), OffbeatHistogram.delta(0, 6))


class TestSyncopation:
    def test_figure_example(self):
        assert syncopation(offbeat_histogram([0.5, 0.6])) == 0.55

    def test_on_beat(self):
        assert syncopation(offbeat_histogram([0, 0])) == 0

    @pytest.mark.parametrize("k", range(11))
    def test_delta(self, k):
        assert syncopation(OffbeatHistogram.delta(k)) == pytest.approx(k / 10, abs=1e-15)


def rational_histogram(n_bins):
    return st.lists(st.integers(0, 6), min_size=n_bins, max_size=n_bins).filter(lambda c: sum(c) > 0)


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(rational_histogram(n), rational_histogram(n))))
def test_emd_equals_lp_transport(pair):
    a, b = (np.array(c, dtype=float) / sum(c) for c in pair)
    assert emd_1d(OffbeatHistogram(tuple(a)), OffbeatHistogram(tuple(b))) == pytest.approx(transport_cost(a, b), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 8).flatmap(lambda n: st.tuples(*(rational_histogram(n) for _ in range(3)))))
def test_emd_metric_axioms(triple):
    p, q, r = (OffbeatHistogram(tuple(np.array(c) / sum(c))) for c in triple)
    assert emd_1d(p, q) == pytest.approx(emd_1d(q, p))
    assert emd_1d(p, r) <= emd_1d(p, q) + emd_1d(q, r) + 1e-12
    assert (emd_1d(p, q) < 1e-12) == np.allclose(p.bins, q.bins)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.fractions(0, 1), min_size=1, max_size=30), st.integers(2, 21))
def test_syncopation_bounds(props, n_bins):
    q = syncopation(offbeat_histogram(props, n_bins))
    assert -1e-12 <= q <= 1 + 1e-12


def test_measure_proportions_empty_measure_modes():
    s = Score(480, (TimeSignature(4, 4),), ((NoteEvent(0, 480), NoteEvent(4080, 480)),), 5760)
    grid = measure_grid(s)
    assert measure_proportions([0, 4080], grid, empty_measure="skip") == [0, 1]
    assert measure_proportions([0, 4080], grid, empty_measure="zero") == [0, 0, 1]


def test_measure_proportions_anacrusis_phase():
    # 6/8 with an eighth-note pickup: the pickup note sits on the last eighth of a notional bar
    s = Score(480, (TimeSignature(6, 8),), ((NoteEvent(0, 240), NoteEvent(240, 1440)),), 1680)
    grid = measure_grid(s, "compound", pickup=240)
    assert measure_proportions([0, 240], grid) == [1, 0]
