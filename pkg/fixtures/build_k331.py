"""Regenerate mozart_k331_theme.json from the bar-by-bar rhythm table below.

Rhythm-only transcription of the theme of the first movement of Mozart's
Piano Sonata K. 331 (Andante grazioso, 6/8), with both repeats written out
(A A B B, 36 bars). Values are note lengths in sixteenths; ``r`` marks a
rest. Pitches are not encoded.

Run from the repository root::

    python fixtures/build_k331.py
"""

import json
from pathlib import Path

TPQ = 480
SIXTEENTH = TPQ // 4
BAR = 12  # sixteenths in 6/8

CELL = "3 1 2 4 2"  # dotted eighth, sixteenth, eighth, quarter, eighth

# right hand, bars 1-18
MELODY = {
    1: CELL,
    2: CELL,
    3: "4 2 4 2",
    4: "2 1 1 2 4 r2",
    5: CELL,
    6: CELL,
    7: "4 2 4 2",
    8: "4 2 4 r2",
    9: CELL,
    10: CELL,
    11: "3 1 2 3 1 2",
    12: "4 2 4 r2",
    13: CELL,
    14: CELL,
    15: "4 2 4 2",
    16: "2 1 1 2 4 2",
    17: "4 2 3 1 2",
    18: "4 r2 r6",
}

# left hand: quarter-eighth accompaniment, closing with a rest on cadence bars
ACCOMP = "4 2 4 2"
CADENCE = "4 2 4 r2"
BASS = {bar: (CADENCE if bar in (4, 8, 12, 18) else ACCOMP) for bar in MELODY}
BASS[18] = "4 r2 r6"

FORM = [
    ("A1", 1, 5), ("A2", 5, 9),
    ("A1", 1, 5), ("A2", 5, 9),
    ("B1", 9, 13), ("B2", 13, 19),
    ("B1", 9, 13), ("B2", 13, 19),
]


def performed_bars():
    bars = []
    for _, lo, hi in FORM:
        bars.extend(range(lo, hi))
    return bars


def realise(table):
    events = []
    for index, bar in enumerate(performed_bars()):
        pos = index * BAR
        for token in table[bar].split():
            length = int(token.lstrip("r"))
            if not token.startswith("r"):
                events.append({"onset": pos * SIXTEENTH, "duration": length * SIXTEENTH})
            pos += length
        if pos != (index + 1) * BAR:
            raise ValueError(f"bar {bar} does not fill 6/8")
    return events


def annotations():
    out, start = [], 0
    for label, lo, hi in FORM:
        out.append({"label": label, "start_measure": start, "end_measure": start + hi - lo})
        start += hi - lo
    return out


def main():
    bars = performed_bars()
    doc = {
        "title": "Mozart K331 I, Tema (rhythm, repeats expanded)",
        "ticks_per_quarter": TPQ,
        "time_signatures": [{"measure": 0, "numerator": 6, "denominator": 8}],
        "end_tick": len(bars) * BAR * SIXTEENTH,
        "annotations": annotations(),
        "score_bars": bars,
        "voices": [realise(MELODY), realise(BASS)],
    }
    out = Path(__file__).with_name("mozart_k331_theme.json")
    out.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {out} ({len(bars)} bars)")


if __name__ == "__main__":
    main()
