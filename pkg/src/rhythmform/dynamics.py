"""Static (whole piece) and dynamic (sliding measure window) evaluation."""

from __future__ import annotations

import bisect
import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields
from typing import Optional, Sequence

import networkx as nx

from . import heterogeneity as het
from . import syncopation as sync
from . import visibility as vis
from .errors import ComparabilityError, EmptyPieceError, InsufficientDataError
from .score import MeasureGrid, OnsetSeries, Score, extract_ioi, measure_grid, merge_voices

INCLUDE_FINAL_MODES = ("auto", "on", "off")
TIME_AXES = ("index", "onset")


@dataclass(frozen=True)
class AnalysisConfig:
    embedding_dim: int = het.DEFAULT_DIM
    stride: int = 1
    bins: int = sync.DEFAULT_BINS
    beat_rule: str = "denominator"
    beat_ticks: Optional[int] = None
    tolerance: int = 0
    empty_measure: str = "skip"
    window: int = 2
    slide: int = 1
    seed: int = vis.DEFAULT_SEED
    time_axis: str = "index"
    voices: Optional[tuple[int, ...]] = None
    include_final: str = "auto"
    min_duration: int = 0
    pickup: int = 0

    def __post_init__(self):
        het.count_patterns(self.embedding_dim)
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.include_final not in INCLUDE_FINAL_MODES:
            raise ValueError(f"include_final must be one of {INCLUDE_FINAL_MODES}")
        if self.time_axis not in TIME_AXES:
            raise ValueError(f"time_axis must be one of {TIME_AXES}")
        if self.empty_measure not in sync.EMPTY_MEASURE_MODES:
            raise ValueError(f"empty_measure must be one of {sync.EMPTY_MEASURE_MODES}")
        if not 1 <= self.slide <= self.window:
            raise ValueError(f"need 1 <= slide <= window, got window={self.window}, slide={self.slide}")
        if self.voices is not None:
            object.__setattr__(self, "voices", tuple(sorted(set(self.voices))))

    @property
    def final_for_heterogeneity(self) -> bool:
        return self.include_final == "on"

    @property
    def final_for_graph(self) -> bool:
        return self.include_final != "off"

    def echo(self) -> dict:
        d = asdict(self)
        d["voices"] = "all" if self.voices is None else list(self.voices)
        return d


@dataclass(frozen=True)
class StaticReport:
    heterogeneity: Optional[float]
    syncopation: float
    graph: vis.GraphSummary
    partition: vis.Partition
    config: AnalysisConfig
    input_hash: str = ""
    title: str = ""
    n_onsets: int = 0
    n_measures: int = 0

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "input_sha256": self.input_hash,
            "heterogeneity": self.heterogeneity,
            "syncopation": self.syncopation,
            "graph": self.graph.as_dict(),
            "communities": list(self.partition.membership),
            "n_onsets": self.n_onsets,
            "n_measures": self.n_measures,
            "config": self.config.echo(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "StaticReport":
        """Rebuild a report written by :meth:`to_json`."""
        config = dict(d["config"])
        config["voices"] = None if config.get("voices") == "all" else tuple(config["voices"])
        graph = vis.GraphSummary(**d["graph"])
        partition = vis.Partition(tuple(d["communities"]), graph.modularity)
        return cls(d["heterogeneity"], d["syncopation"], graph, partition, AnalysisConfig(**config),
                   d.get("input_sha256", ""), d.get("title", ""), d.get("n_onsets", 0), d.get("n_measures", 0))

    @staticmethod
    def looks_like(doc) -> bool:
        return isinstance(doc, dict) and {"config", "heterogeneity", "graph"} <= doc.keys()


@dataclass(frozen=True)
class WindowEntry:
    start_measure: int
    end_measure: int
    start_tick: int
    end_tick: int
    n_onsets: int
    heterogeneity: Optional[float]
    syncopation: Optional[float]


@dataclass(frozen=True)
class ComplexitySeries:
    entries: tuple[WindowEntry, ...]
    config: AnalysisConfig
    input_hash: str = ""
    title: str = ""

    def __len__(self):
        return len(self.entries)

    def _mean(self, attr):
        vals = [getattr(e, attr) for e in self.entries if getattr(e, attr) is not None]
        return (sum(vals) / len(vals)) if vals else None

    @property
    def mean_heterogeneity(self) -> Optional[float]:
        return self._mean("heterogeneity")

    @property
    def mean_syncopation(self) -> Optional[float]:
        return self._mean("syncopation")

    def coverage(self, attr: str = "heterogeneity") -> float:
        """Share of windows that produced a value for ``attr``."""
        if not self.entries:
            return 0.0
        return sum(getattr(e, attr) is not None for e in self.entries) / len(self.entries)

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "input_sha256": self.input_hash,
            "mean_heterogeneity": self.mean_heterogeneity,
            "mean_syncopation": self.mean_syncopation,
            "heterogeneity_coverage": self.coverage("heterogeneity"),
            "syncopation_coverage": self.coverage("syncopation"),
            "windows": [asdict(e) for e in self.entries],
            "config": self.config.echo(),
        }


@dataclass
class Prepared:
    """Intermediate products shared by the static, dynamic and graph analyses."""

    score: Score
    grid: MeasureGrid
    series: OnsetSeries


def content_hash(data) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def prepare(score: Score, config: AnalysisConfig) -> Prepared:
    score = score.drop_short(config.min_duration)
    grid = measure_grid(score, config.beat_rule, config.pickup, config.beat_ticks)
    series = merge_voices(score, config.voices, grid)
    return Prepared(score, grid, series)


def duration_graph(prep: Prepared, config: AnalysisConfig) -> nx.Graph:
    durations = extract_ioi(prep.series, config.final_for_graph)
    if len(durations) < 2:
        raise InsufficientDataError(f"visibility graph needs at least 2 events, got {len(durations)}")
    coords = None
    if config.time_axis == "onset":
        coords = prep.series.onsets[:len(durations)]
    return vis.build_visibility(durations.values, coords)


def _safe_heterogeneity(values: Sequence[int], config: AnalysisConfig) -> Optional[float]:
    try:
        return het.heterogeneity(values, config.embedding_dim, config.stride)
    except InsufficientDataError:
        return None


def _safe_syncopation(proportions, config: AnalysisConfig) -> Optional[float]:
    try:
        return sync.syncopation(sync.offbeat_histogram(proportions, config.bins))
    except EmptyPieceError:
        return None


def static_metrics(score: Score, config: AnalysisConfig = AnalysisConfig(), input_hash: str = "") -> StaticReport:
    """Whole-piece heterogeneity, syncopation and visibility-graph summary."""
    if not any(score.voices):
        raise EmptyPieceError("score has no notes")
    prep = prepare(score, config)
    onsets = prep.series.onsets

    h = None
    if len(onsets) >= 2 or config.final_for_heterogeneity:
        h = _safe_heterogeneity(extract_ioi(prep.series, config.final_for_heterogeneity).values, config)

    proportions = sync.measure_proportions(onsets, prep.grid, config.tolerance, config.empty_measure)
    q = sync.syncopation(sync.offbeat_histogram(proportions, config.bins))

    g = duration_graph(prep, config)
    partition = vis.detect_communities(g, config.seed)
    return StaticReport(h, q, vis.summarize(g, partition), partition, config, input_hash,
                        score.title, len(onsets), len(prep.grid))


def window_ioi(series: OnsetSeries, lo: int, hi: int, include_final: bool) -> list[int]:
    """IOIs of the onsets in ``[series.onsets[lo], series.onsets[hi-1]]``.

    With ``include_final`` the last onset contributes its interval to the
    next onset of the piece (or the final event length), so a window
    spanning the piece reproduces the static series.
    """
    on = series.onsets
    values = [on[i + 1] - on[i] for i in range(lo, hi - 1)]
    if include_final and hi > lo:
        values.append(on[hi] - on[hi - 1] if hi < len(on) else series.final_event_length)
    return values


def dynamic_metrics(score: Score, config: AnalysisConfig = AnalysisConfig(), input_hash: str = "") -> ComplexitySeries:
    """Heterogeneity and syncopation over windows of ``config.window`` measures.

    Windows start every ``config.slide`` measures; a trailing window that
    would run past the last measure is dropped. Onsets on a window's closing
    boundary belong to the next window.
    """
    prep = prepare(score, config)
    grid, series = prep.grid, prep.series
    n_measures = len(grid)
    if n_measures < config.window:
        raise InsufficientDataError(
            f"score has {n_measures} measures, shorter than a window of {config.window}"
        )

    onsets = series.onsets
    entries = []
    for start in range(0, n_measures - config.window + 1, config.slide):
        stop = start + config.window
        t0 = grid.boundaries[start]
        t1 = grid.bounds(stop - 1)[1]
        lo = bisect.bisect_left(onsets, t0)
        hi = bisect.bisect_left(onsets, t1)
        count = hi - lo

        h = None
        if count >= config.embedding_dim + 1:
            h = _safe_heterogeneity(window_ioi(series, lo, hi, config.final_for_heterogeneity), config)
        proportions = sync.measure_proportions(onsets[lo:hi], grid, config.tolerance,
                                               config.empty_measure, range(start, stop))
        q = _safe_syncopation(proportions, config)
        entries.append(WindowEntry(start, stop, t0, t1, count, h, q))
    return ComplexitySeries(tuple(entries), config, input_hash, score.title)


def compare_static(reports: Sequence[StaticReport], names: Optional[Sequence[str]] = None,
                   config: Optional[AnalysisConfig] = None) -> list[dict]:
    """Rows of the comparison table, ordered by increasing heterogeneity.

    Reports must share one configuration (``config`` when given, otherwise
    that of the first report); metrics computed with different parameters
    are not comparable.
    """
    if not reports:
        return []
    names = list(names) if names is not None else [r.title or f"piece{i}" for i, r in enumerate(reports)]
    ref = reports[0].config if config is None else config
    for name, rep in zip(names, reports):
        if rep.config != ref:
            diff = [f.name for f in fields(AnalysisConfig) if getattr(rep.config, f.name) != getattr(ref, f.name)]
            raise ComparabilityError(f"{name} uses different settings for: {', '.join(diff)}")
    rows = [
        {
            "name": name,
            "heterogeneity": r.heterogeneity,
            "syncopation": r.syncopation,
            "assortativity": r.graph.assortativity,
            "transitivity": r.graph.transitivity,
            "input_sha256": r.input_hash,
        }
        for name, r in zip(names, reports)
    ]
    rows.sort(key=lambda row: (row["heterogeneity"] is None,
                               row["heterogeneity"] if row["heterogeneity"] is not None else math.inf,
                               row["name"]))
    return rows
