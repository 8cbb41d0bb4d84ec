"""Score containers and the onset / inter-onset-interval (IOI) pipeline.

Everything downstream works on integer ticks. A :class:`Score` holds one
list of :class:`NoteEvent` per voice; :func:`merge_voices` collapses the
selected voices into a strictly increasing :class:`OnsetSeries` and
:func:`extract_ioi` turns that into the durations all metrics consume.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import EmptyPieceError, InsufficientDataError, ParseError, ValidationError

DEFAULT_TICKS_PER_QUARTER = 480
VALID_DENOMINATORS = (1, 2, 4, 8, 16, 32)
BEAT_RULES = ("denominator", "compound")


@dataclass(frozen=True)
class TimeSignature:
    numerator: int
    denominator: int
    start_measure: int = 0

    def __post_init__(self):
        if self.numerator < 1:
            raise ValidationError(f"time signature numerator must be >= 1, got {self.numerator}")
        if self.denominator not in VALID_DENOMINATORS:
            raise ValidationError(
                f"time signature denominator must be one of {VALID_DENOMINATORS}, got {self.denominator}"
            )
        if self.start_measure < 0:
            raise ValidationError(f"start_measure must be >= 0, got {self.start_measure}")

    def measure_ticks(self, ticks_per_quarter: int) -> int:
        whole = 4 * ticks_per_quarter
        if (whole * self.numerator) % self.denominator:
            raise ValidationError(
                f"{self.numerator}/{self.denominator} is not representable at {ticks_per_quarter} ticks per quarter"
            )
        return whole * self.numerator // self.denominator

    def beat_ticks(self, ticks_per_quarter: int, rule: str = "denominator") -> int:
        """Ticks per beat under ``rule``.

        ``denominator`` uses the note value in the denominator (an eighth in
        6/8). ``compound`` groups three denominator notes into a dotted beat
        whenever the numerator is a multiple of three greater than three.
        """
        if rule not in BEAT_RULES:
            raise ValueError(f"unknown beat rule {rule!r}; expected one of {BEAT_RULES}")
        unit = 4 * ticks_per_quarter // self.denominator
        if rule == "compound" and self.numerator > 3 and self.numerator % 3 == 0:
            return 3 * unit
        return unit


@dataclass(frozen=True)
class NoteEvent:
    onset: int
    duration: int
    voice: int = 0

    def __post_init__(self):
        if self.onset < 0:
            raise ValidationError(f"onset must be non-negative, got {self.onset}")
        if self.duration <= 0:
            raise ValidationError(f"duration must be positive, got {self.duration} (onset {self.onset})")

    @property
    def end(self) -> int:
        return self.onset + self.duration


@dataclass(frozen=True)
class Annotation:
    """A labelled span of measures, ``[start_measure, end_measure)``."""

    label: str
    start_measure: int
    end_measure: int


@dataclass(frozen=True)
class Score:
    ticks_per_quarter: int
    time_signatures: tuple[TimeSignature, ...]
    voices: tuple[tuple[NoteEvent, ...], ...]
    end_tick: int
    title: str = ""
    annotations: tuple[Annotation, ...] = field(default=())

    def __post_init__(self):
        if self.ticks_per_quarter <= 0:
            raise ValidationError(f"ticks_per_quarter must be positive, got {self.ticks_per_quarter}")
        if not self.time_signatures:
            raise ValidationError("score needs at least one time signature")
        starts = [ts.start_measure for ts in self.time_signatures]
        if starts[0] != 0:
            raise ValidationError("first time signature must start at measure 0")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValidationError("time signatures must have strictly increasing start_measure")
        last_end = max((ev.end for voice in self.voices for ev in voice), default=0)
        if self.end_tick < last_end:
            raise ValidationError(f"end_tick {self.end_tick} precedes the last note end {last_end}")

    @property
    def voice_ids(self) -> list[int]:
        return list(range(len(self.voices)))

    def events(self, selection: Optional[Iterable[int]] = None) -> list[NoteEvent]:
        ids = self.voice_ids if selection is None else sorted(set(selection))
        return sorted((ev for v in ids for ev in self.voices[v]), key=lambda e: (e.onset, e.voice))

    def drop_short(self, min_duration: int) -> "Score":
        """Copy of the score without events shorter than ``min_duration`` ticks."""
        if min_duration <= 0:
            return self
        voices = tuple(tuple(ev for ev in v if ev.duration >= min_duration) for v in self.voices)
        return Score(self.ticks_per_quarter, self.time_signatures, voices, self.end_tick,
                     self.title, self.annotations)


@dataclass(frozen=True)
class OnsetSeries:
    onsets: tuple[int, ...]
    final_event_length: int
    ticks_per_quarter: int = DEFAULT_TICKS_PER_QUARTER

    def __len__(self):
        return len(self.onsets)


@dataclass(frozen=True)
class IOISeries:
    values: tuple[int, ...]
    tick_unit: int = DEFAULT_TICKS_PER_QUARTER

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def in_quarters(self) -> list[float]:
        return [v / self.tick_unit for v in self.values]


@dataclass(frozen=True)
class MeasureGrid:
    """Measure layout of a score.

    ``boundaries[i]`` is the first tick of measure ``i`` and ``origins[i]`` the
    tick that beat positions are measured from. The two differ only for an
    anacrusis, whose origin lies before tick 0.
    """

    boundaries: tuple[int, ...]
    beat_length: tuple[int, ...]
    origins: tuple[int, ...]
    end: int

    def __len__(self):
        return len(self.boundaries)

    def bounds(self, index: int) -> tuple[int, int]:
        stop = self.boundaries[index + 1] if index + 1 < len(self.boundaries) else self.end
        return self.boundaries[index], stop

    def measure_of(self, tick: int) -> int:
        """Index of the measure containing ``tick``; boundary ticks open the next measure."""
        if tick < self.boundaries[0] or tick >= self.end:
            raise ValueError(f"tick {tick} lies outside the grid [{self.boundaries[0]}, {self.end})")
        return bisect.bisect_right(self.boundaries, tick) - 1

    def measure_ticks(self, index: int) -> int:
        start, stop = self.bounds(index)
        return stop - start


# --------------------------------------------------------------------------
# JSON rhythm format
# --------------------------------------------------------------------------

def _require_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {type(value).__name__}", field=name)
    if minimum is not None and value < minimum:
        raise ParseError(f"must be >= {minimum}, got {value}", field=name)
    return value


def parse_rhythm_json(text) -> Score:
    """Parse the JSON rhythm format into a :class:`Score`.

    Recognised top-level keys are ``ticks_per_quarter``, ``time_signatures``,
    ``voices`` (required), and the optional metadata keys ``title``,
    ``end_tick`` and ``annotations``. An event flagged ``"tie": true`` is
    merged into the preceding event of the same voice.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", field="$")

    tpq = _require_int(doc.get("ticks_per_quarter", DEFAULT_TICKS_PER_QUARTER), "ticks_per_quarter", 1)

    raw_sigs = doc.get("time_signatures", [{"measure": 0, "numerator": 4, "denominator": 4}])
    if not isinstance(raw_sigs, list) or not raw_sigs:
        raise ParseError("must be a non-empty array", field="time_signatures")
    sigs = []
    for i, item in enumerate(raw_sigs):
        where = f"time_signatures[{i}]"
        if not isinstance(item, dict):
            raise ParseError("must be an object", field=where)
        for key in ("numerator", "denominator"):
            if key not in item:
                raise ParseError("missing required field", field=f"{where}.{key}")
        sigs.append(TimeSignature(
            numerator=_require_int(item["numerator"], f"{where}.numerator", 1),
            denominator=_require_int(item["denominator"], f"{where}.denominator", 1),
            start_measure=_require_int(item.get("measure", 0), f"{where}.measure", 0),
        ))
    sigs.sort(key=lambda s: s.start_measure)

    if "voices" not in doc:
        raise ParseError("missing required field", field="voices")
    raw_voices = doc["voices"]
    if not isinstance(raw_voices, list):
        raise ParseError("must be an array of arrays", field="voices")

    voices = []
    for v, raw_events in enumerate(raw_voices):
        if not isinstance(raw_events, list):
            raise ParseError("must be an array", field=f"voices[{v}]")
        events: list[NoteEvent] = []
        prev_onset = -1
        for j, item in enumerate(raw_events):
            where = f"voices[{v}][{j}]"
            if not isinstance(item, dict):
                raise ParseError("must be an object", field=where)
            for key in ("onset", "duration"):
                if key not in item:
                    raise ParseError("missing required field", field=f"{where}.{key}")
            onset = _require_int(item["onset"], f"{where}.onset", 0)
            duration = _require_int(item["duration"], f"{where}.duration")
            if duration <= 0:
                raise ValidationError(f"{where}.duration: must be positive, got {duration}")
            if onset <= prev_onset:
                raise ValidationError(f"{where}.onset: onsets within a voice must strictly increase")
            prev_onset = onset
            tie = item.get("tie", False)
            if not isinstance(tie, bool):
                raise ParseError("must be a boolean", field=f"{where}.tie")
            if tie:
                if not events:
                    raise ValidationError(f"{where}.tie: first event of a voice cannot be tied")
                head = events[-1]
                events[-1] = NoteEvent(head.onset, onset + duration - head.onset, v)
            else:
                events.append(NoteEvent(onset, duration, v))
        voices.append(tuple(events))

    last_end = max((ev.end for voice in voices for ev in voice), default=0)
    end_tick = doc.get("end_tick")
    if end_tick is None:
        end_tick = last_end
    else:
        end_tick = _require_int(end_tick, "end_tick", 0)

    annotations = []
    for i, item in enumerate(doc.get("annotations", [])):
        where = f"annotations[{i}]"
        try:
            annotations.append(Annotation(str(item["label"]),
                                          _require_int(item["start_measure"], f"{where}.start_measure", 0),
                                          _require_int(item["end_measure"], f"{where}.end_measure", 0)))
        except (KeyError, TypeError) as exc:
            raise ParseError("expected {label, start_measure, end_measure}", field=where) from exc

    return Score(tpq, tuple(sigs), tuple(voices), end_tick, str(doc.get("title", "")), tuple(annotations))


def score_to_json(score: Score) -> str:
    doc = {
        "title": score.title,
        "ticks_per_quarter": score.ticks_per_quarter,
        "time_signatures": [
            {"measure": ts.start_measure, "numerator": ts.numerator, "denominator": ts.denominator}
            for ts in score.time_signatures
        ],
        "end_tick": score.end_tick,
        "voices": [[{"onset": ev.onset, "duration": ev.duration} for ev in voice] for voice in score.voices],
        "annotations": [
            {"label": a.label, "start_measure": a.start_measure, "end_measure": a.end_measure}
            for a in score.annotations
        ],
    }
    return json.dumps(doc, indent=1)


# --------------------------------------------------------------------------
# Onsets, IOIs and the measure grid
# --------------------------------------------------------------------------

def merge_voices(score: Score, selection: Optional[Iterable[int]] = None,
                 grid: Optional[MeasureGrid] = None) -> OnsetSeries:
    """Union of onsets over the selected voices, chords collapsed to one onset.

    The final event length is the longest note starting at the last onset,
    stretched over any trailing rest up to ``score.end_tick`` or, when a
    ``grid`` is given, up to the end of the measure where that note ends.
    """
    if selection is not None:
        selection = set(selection)
        if not selection:
            raise ValueError("voice selection is empty")
        unknown = selection.difference(score.voice_ids)
        if unknown:
            raise ValueError(f"unknown voice id(s) {sorted(unknown)}; score has {len(score.voices)} voices")

    events = score.events(selection)
    if not events:
        raise EmptyPieceError("selected voices contain no notes")

    onsets = sorted({ev.onset for ev in events})
    last = onsets[-1]
    final = max(ev.duration for ev in events if ev.onset == last)
    stop = score.end_tick
    if grid is not None:
        note_end = last + final
        stop = grid.end if note_end >= grid.end else grid.bounds(grid.measure_of(note_end - 1))[1]
    final = max(final, stop - last)
    return OnsetSeries(tuple(onsets), final, score.ticks_per_quarter)


def extract_ioi(series: OnsetSeries, include_final: bool = False) -> IOISeries:
    """Differences between successive onsets, optionally followed by the final event length."""
    onsets = series.onsets
    needed = 1 if include_final else 2
    if len(onsets) < needed:
        raise InsufficientDataError(
            f"need at least {needed} onset(s) to build an IOI series, got {len(onsets)}"
        )
    values = [b - a for a, b in zip(onsets, onsets[1:])]
    if include_final:
        values.append(series.final_event_length)
    return IOISeries(tuple(values), series.ticks_per_quarter)


def measure_grid(score: Score, beat_rule: str = "denominator", pickup: int = 0,
                 beat_ticks: Optional[int] = None) -> MeasureGrid:
    """Lay out measures from the time-signature map until ``score.end_tick`` is covered.

    With ``pickup > 0`` measure 0 is an anacrusis of ``pickup`` ticks whose beat
    phase is taken from the full measure it truncates. ``beat_ticks``
    overrides the beat length of every measure.
    """
    if beat_rule not in BEAT_RULES:
        raise ValueError(f"unknown beat rule {beat_rule!r}; expected one of {BEAT_RULES}")
    if pickup < 0:
        raise ValueError("pickup must be non-negative")
    if beat_ticks is not None and beat_ticks <= 0:
        raise ValueError("beat_ticks must be positive")

    tpq = score.ticks_per_quarter
    sigs = score.time_signatures
    boundaries, beats, origins = [], [], []
    tick, index, sig_pos = 0, 0, 0
    target = max(score.end_tick, 1)

    while tick < target:
        while sig_pos + 1 < len(sigs) and sigs[sig_pos + 1].start_measure <= index:
            sig_pos += 1
        sig = sigs[sig_pos]
        length = sig.measure_ticks(tpq)
        beat = beat_ticks or sig.beat_ticks(tpq, beat_rule)
        boundaries.append(tick)
        beats.append(beat)
        if index == 0 and pickup:
            if pickup >= length:
                raise ValidationError(f"pickup of {pickup} ticks is not shorter than a {length}-tick measure")
            origins.append(pickup - length)
            tick += pickup
        else:
            origins.append(tick)
            tick += length
        index += 1

    return MeasureGrid(tuple(boundaries), tuple(beats), tuple(origins), tick)


def onsets_by_measure(onsets: Sequence[int], grid: MeasureGrid) -> list[list[int]]:
    buckets: list[list[int]] = [[] for _ in range(len(grid))]
    for o in onsets:
        buckets[grid.measure_of(o)].append(o)
    return buckets
