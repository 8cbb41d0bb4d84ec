"""Syncopation as a normalised earth mover's distance.

Each measure contributes the share of its onsets that miss the beat grid.
Those shares are binned on [0, 1] and compared with the histogram that has
all of its mass at 0 (every note on the beat).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyPieceError
from .score import MeasureGrid, onsets_by_measure

DEFAULT_BINS = 11
EMPTY_MEASURE_MODES = ("skip", "zero")


@dataclass(frozen=True)
class BeatSpec:
    beat_length: int
    tolerance: int = 0

    def __post_init__(self):
        if self.beat_length <= 0:
            raise ValueError(f"beat_length must be positive, got {self.beat_length}")
        if self.tolerance < 0 or 2 * self.tolerance >= self.beat_length:
            raise ValueError(f"tolerance must lie in [0, beat_length/2), got {self.tolerance}")


@dataclass(frozen=True)
class OffbeatHistogram:
    bins: tuple[float, ...]

    @property
    def n_bins(self) -> int:
        return len(self.bins)

    @classmethod
    def delta(cls, index: int, n_bins: int = DEFAULT_BINS) -> "OffbeatHistogram":
        mass = [0.0] * n_bins
        mass[index] = 1.0
        return cls(tuple(mass))


def is_offbeat(onset: int, origin: int, beat: BeatSpec) -> bool:
    phase = (onset - origin) % beat.beat_length
    return min(phase, beat.beat_length - phase) > beat.tolerance


def offbeat_proportion(onsets: Sequence[int], measure_start: int, beat: BeatSpec,
                       measure_end: int | None = None) -> Fraction | None:
    """Exact fraction of ``onsets`` that are off the beat; ``None`` for an empty measure.

    ``measure_start`` is the tick beats are counted from. If ``measure_end``
    is given, onsets outside ``[measure_start, measure_end)`` are rejected.
    """
    if not onsets:
        return None
    for o in onsets:
        if o < measure_start or (measure_end is not None and o >= measure_end):
            raise ValueError(f"onset {o} lies outside the measure starting at {measure_start}")
    off = sum(is_offbeat(o, measure_start, beat) for o in onsets)
    return Fraction(off, len(onsets))


def _nearest_bin(p, n_bins: int) -> int:
    if not isinstance(p, Rational):
        p = Fraction(p).limit_denominator(10**9)
    if p < 0 or p > 1:
        raise ValueError(f"proportion {float(p)} lies outside [0, 1]")
    # nearest bin center k/(n_bins-1); exact halves go to the lower bin
    return math.ceil(p * (n_bins - 1) - Fraction(1, 2))


def offbeat_histogram(proportions: Iterable, n_bins: int = DEFAULT_BINS) -> OffbeatHistogram:
    """Normalised histogram of per-measure off-beat proportions."""
    if n_bins < 2:
        raise ValueError(f"need at least 2 bins, got {n_bins}")
    counts = [0] * n_bins
    total = 0
    for p in proportions:
        counts[_nearest_bin(p, n_bins)] += 1
        total += 1
    if not total:
        raise EmptyPieceError("no measure contributed an off-beat proportion")
    return OffbeatHistogram(tuple(c / total for c in counts))


def emd_1d(p: OffbeatHistogram, r: OffbeatHistogram) -> float:
    """Earth mover's distance on a line of unit-spaced bins."""
    if p.n_bins != r.n_bins:
        raise ValueError(f"histograms have {p.n_bins} and {r.n_bins} bins")
    diff = np.cumsum(np.asarray(p.bins, dtype=float) - np.asarray(r.bins, dtype=float))
    return float(np.abs(diff).sum())


def syncopation(p_off: OffbeatHistogram) -> float:
    """Transport cost to the all-on-beat histogram, scaled into [0, 1]."""
    target = OffbeatHistogram.delta(0, p_off.n_bins)
    return emd_1d(p_off, target) / (p_off.n_bins - 1)


def measure_proportions(onsets: Sequence[int], grid: MeasureGrid, tolerance: int = 0,
                        empty_measure: str = "skip", measures: range | None = None) -> list:
    """Off-beat proportion of every measure in ``measures`` (default: all)."""
    if empty_measure not in EMPTY_MEASURE_MODES:
        raise ValueError(f"empty_measure must be one of {EMPTY_MEASURE_MODES}")
    buckets = onsets_by_measure(onsets, grid)
    out = []
    for i in (measures if measures is not None else range(len(grid))):
        beat = BeatSpec(grid.beat_length[i], tolerance)
        p = offbeat_proportion(buckets[i], grid.origins[i], beat)
        if p is None:
            if empty_measure == "zero":
                out.append(Fraction(0))
            continue
        out.append(p)
    return out
