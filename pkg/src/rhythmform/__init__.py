"""Rhythmic complexity of symbolic scores: heterogeneity, syncopation and structure."""

from .dynamics import (AnalysisConfig, ComplexitySeries, StaticReport, compare_static, dynamic_metrics,
                       static_metrics)
from .errors import (ComparabilityError, EmptyPieceError, InsufficientDataError, ParseError, RhythmFormError,
                     UnsupportedFormatError, ValidationError)
from .heterogeneity import count_patterns, ordinal_pattern, pattern_distribution, permutation_entropy
from .midi import parse_midi
from .score import extract_ioi, measure_grid, merge_voices, parse_rhythm_json
from .syncopation import emd_1d, offbeat_histogram, offbeat_proportion, syncopation
from .visibility import (assortativity, build_visibility, degree_correlation, detect_communities, modularity,
                         powerlaw_fit, transitivity)

__version__ = "0.1.0"
