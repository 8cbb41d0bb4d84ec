"""Rhythmic heterogeneity: normalised permutation entropy with ties.

Ordinal patterns are dense rank vectors, so equal durations share a rank and
"same length" counts as its own pattern. The number of possible patterns of
length D is therefore the ordered Bell number (3, 13, 75, ... for
D = 2, 3, 4), not D!.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import InsufficientDataError

MIN_DIM, MAX_DIM = 2, 8
DEFAULT_DIM = 3


@dataclass(frozen=True)
class PatternDistribution:
    counts: dict
    dim: int
    total: int

    def probabilities(self) -> dict:
        return {pattern: c / self.total for pattern, c in self.counts.items()}


def ordinal_pattern(window: Sequence) -> tuple[int, ...]:
    """Dense rank of each value in ``window``.

    >>> ordinal_pattern((2, 1, 2))
    (1, 0, 1)
    """
    if len(window) < MIN_DIM:
        raise ValueError(f"ordinal patterns need at least {MIN_DIM} values, got {len(window)}")
    rank = {value: r for r, value in enumerate(sorted(set(window)))}
    return tuple(rank[v] for v in window)


@lru_cache(maxsize=None)
def _ordered_bell(n: int) -> int:
    if n == 0:
        return 1
    return sum(math.comb(n, k) * _ordered_bell(n - k) for k in range(1, n + 1))


def count_patterns(dim: int) -> int:
    """Number of distinct tie-aware ordinal patterns of length ``dim``."""
    if not MIN_DIM <= dim <= MAX_DIM:
        raise ValueError(f"embedding dimension must lie in [{MIN_DIM}, {MAX_DIM}], got {dim}")
    return _ordered_bell(dim)


def pattern_distribution(values: Sequence, dim: int = DEFAULT_DIM, stride: int = 1) -> PatternDistribution:
    """Count ordinal patterns over windows of ``dim`` values advanced by ``stride``."""
    count_patterns(dim)
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    values = tuple(values)
    if len(values) < dim:
        raise InsufficientDataError(f"series of length {len(values)} is shorter than the embedding dimension {dim}")
    counts = Counter(ordinal_pattern(values[i:i + dim]) for i in range(0, len(values) - dim + 1, stride))
    return PatternDistribution(dict(counts), dim, sum(counts.values()))


def permutation_entropy(dist: PatternDistribution) -> float:
    """Shannon entropy of ``dist`` divided by ``log N_D``; lies in [0, 1]."""
    if dist.total < 1:
        raise InsufficientDataError("pattern distribution is empty")
    h = 0.0
    for c in dist.counts.values():
        if c:
            p = c / dist.total
            h -= p * math.log(p)
    return h / math.log(count_patterns(dist.dim))


def heterogeneity(values: Sequence, dim: int = DEFAULT_DIM, stride: int = 1) -> float:
    return permutation_entropy(pattern_distribution(values, dim, stride))
