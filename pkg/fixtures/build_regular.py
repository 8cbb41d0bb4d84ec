"""Regenerate regular_etude.json: sixteen bars of a steady quarter-eighth figure in 6/8.

A deliberately regular reference piece for the ``compare`` mode. Run from
the repository root::

    python fixtures/build_regular.py
"""

import json
from pathlib import Path

TPQ = 480
BARS = 16
FIGURE = (480, 240, 480, 240)  # quarter, eighth, quarter, eighth


def main():
    events, pos = [], 0
    for _ in range(BARS):
        for length in FIGURE:
            events.append({"onset": pos, "duration": length})
            pos += length
    doc = {
        "title": "Regular etude (6/8, quarter-eighth)",
        "ticks_per_quarter": TPQ,
        "time_signatures": [{"measure": 0, "numerator": 6, "denominator": 8}],
        "end_tick": pos,
        "voices": [events],
    }
    out = Path(__file__).with_name("regular_etude.json")
    out.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {out} ({BARS} bars)")


if __name__ == "__main__":
    main()
