"""Minimal Standard MIDI File reader (formats 0 and 1, PPQ division).

Only what the rhythm metrics need is decoded: note on/off pairs, time
signature meta events, the division field and track lengths. Everything
else is skipped by length.
"""

from __future__ import annotations

import struct
from collections import defaultdict

from .errors import ParseError, UnsupportedFormatError, ValidationError
from .score import NoteEvent, Score, TimeSignature


class _Reader:
    def __init__(self, data: bytes, pos: int = 0, end: int | None = None):
        self.data = data
        self.pos = pos
        self.end = len(data) if end is None else end

    def byte(self) -> int:
        if self.pos >= self.end:
            raise ParseError("unexpected end of track data", offset=self.pos)
        b = self.data[self.pos]
        self.pos += 1
        return b

    def take(self, n: int) -> bytes:
        if self.pos + n > self.end:
            raise ParseError(f"truncated data: wanted {n} bytes", offset=self.pos)
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def varlen(self) -> int:
        value = 0
        for _ in range(4):
            b = self.byte()
            value = (value << 7) | (b & 0x7F)
            if not b & 0x80:
                return value
        raise ParseError("variable-length quantity longer than 4 bytes", offset=self.pos)


def _read_track(data: bytes, start: int, end: int):
    """Yield ``(tick, status, payload)`` for every event in one track chunk."""
    r = _Reader(data, start, end)
    tick = 0
    running = None
    while r.pos < r.end:
        tick += r.varlen()
        where = r.pos
        status = r.byte()
        if status == 0xFF:
            kind = r.byte()
            payload = r.take(r.varlen())
            yield tick, 0xFF, (kind, payload)
            if kind == 0x2F:
                return
            continue
        if status in (0xF0, 0xF7):
            r.take(r.varlen())
            continue
        if status < 0x80:
            if running is None:
                raise ParseError("data byte without running status", offset=where)
            r.pos -= 1
            status = running
        elif status >= 0xF0:
            raise ParseError(f"unsupported system message 0x{status:02X} in track", offset=where)
        running = status
        nbytes = 1 if status & 0xF0 in (0xC0, 0xD0) else 2
        yield tick, status, r.take(nbytes)
    yield tick, None, None


def parse_midi(data: bytes) -> Score:
    """Decode a Standard MIDI File into a :class:`Score`.

    One voice is produced per (track, channel) pair that carries notes, in
    track-then-channel order. A note-on with velocity 0 is a note-off; a
    second note-on of a sounding pitch ends the first one at its onset.
    """
    data = bytes(data)
    if len(data) < 14 or data[:4] != b"MThd":
        raise ParseError("missing MThd header chunk", offset=0)
    (hlen,) = struct.unpack(">I", data[4:8])
    if hlen < 6:
        raise ParseError(f"header chunk too short ({hlen} bytes)", offset=4)
    fmt, ntrks, division = struct.unpack(">HHH", data[8:14])
    if fmt not in (0, 1):
        raise UnsupportedFormatError(f"SMF format {fmt} is not supported", offset=8)
    if division & 0x8000:
        raise UnsupportedFormatError("SMPTE time division is not supported", offset=12)
    if division == 0:
        raise ParseError("division of zero ticks per quarter", offset=12)

    pos = 8 + hlen
    notes: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
    signatures: dict[int, tuple[int, int]] = {}
    end_tick = 0

    for track in range(ntrks):
        if pos + 8 > len(data):
            raise ParseError(f"missing track chunk {track}", offset=pos)
        tag = data[pos:pos + 4]
        (length,) = struct.unpack(">I", data[pos + 4:pos + 8])
        body = pos + 8
        if body + length > len(data):
            raise ParseError(f"track chunk {track} overruns the file", offset=pos)
        if tag != b"MTrk":
            # alien chunks are allowed and skipped
            pos = body + length
            continue

        sounding: dict[tuple[int, int], int] = {}
        tick = 0
        for tick, status, payload in _read_track(data, body, body + length):
            if status is None:
                break
            if status == 0xFF:
                kind, meta = payload
                if kind == 0x58:
                    if len(meta) < 2:
                        raise ParseError("time signature meta event too short", offset=body)
                    signatures[tick] = (meta[0], 2 ** meta[1])
                continue
            kind, channel = status & 0xF0, status & 0x0F
            if kind not in (0x80, 0x90):
                continue
            pitch, velocity = payload
            key = (channel, pitch)
            if key in sounding:
                begun = sounding.pop(key)
                if tick > begun:
                    notes[(track, channel)].append((begun, tick - begun))
            if kind == 0x90 and velocity > 0:
                sounding[key] = tick
        for (channel, _), begun in sounding.items():
            if tick > begun:
                notes[(track, channel)].append((begun, tick - begun))
        end_tick = max(end_tick, tick)
        pos = body + length

    voices = []
    for v, key in enumerate(sorted(k for k, evs in notes.items() if evs)):
        events = sorted(notes[key])
        voices.append(tuple(NoteEvent(onset, dur, v) for onset, dur in events))
        end_tick = max(end_tick, max(o + d for o, d in events))

    return Score(division, _signature_map(signatures, division), tuple(voices), end_tick)


def _signature_map(signatures: dict[int, tuple[int, int]], tpq: int) -> tuple[TimeSignature, ...]:
    """Convert tick-stamped signatures into measure-indexed ones."""
    if 0 not in signatures:
        signatures = {0: (4, 4), **signatures}
    result: list[TimeSignature] = []
    measure, last_tick = 0, 0
    for tick in sorted(signatures):
        num, den = signatures[tick]
        if result:
            length = result[-1].measure_ticks(tpq)
            span = tick - last_tick
            if span % length:
                raise ValidationError(f"time signature change at tick {tick} does not fall on a measure boundary")
            measure += span // length
            if result[-1].start_measure == measure:
                result.pop()
        result.append(TimeSignature(num, den, measure))
        last_tick = tick
    return tuple(result)


def _varlen(value: int) -> bytes:
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def write_midi(score: Score, pitch: int = 60) -> bytes:
    """Encode a score as a format-1 SMF, one track per voice.

    Pitches are not part of a :class:`Score`, so every note uses ``pitch``
    on the voice's own channel.
    """
    tpq = score.ticks_per_quarter
    conductor = bytearray()
    prev = 0
    grid_tick, measure = 0, 0
    sigs = list(score.time_signatures)
    for i, ts in enumerate(sigs):
        grid_tick += (ts.start_measure - measure) * sigs[i - 1].measure_ticks(tpq) if i else 0
        measure = ts.start_measure
        dd = ts.denominator.bit_length() - 1
        conductor += _varlen(grid_tick - prev) + bytes([0xFF, 0x58, 0x04, ts.numerator, dd, 24, 8])
        prev = grid_tick
    conductor += _varlen(max(score.end_tick - prev, 0)) + b"\xFF\x2F\x00"
    chunks = [conductor]

    for v, voice in enumerate(score.voices):
        channel = v % 16
        messages = []
        for ev in voice:
            messages.append((ev.onset, 1, bytes([0x90 | channel, pitch, 64])))
            messages.append((ev.end, 0, bytes([0x80 | channel, pitch, 0])))
        messages.sort(key=lambda m: (m[0], m[1]))
        track = bytearray()
        now = 0
        for tick, _, msg in messages:
            track += _varlen(tick - now) + msg
            now = tick
        track += _varlen(max(score.end_tick - now, 0)) + b"\xFF\x2F\x00"
        chunks.append(track)

    out = bytearray(b"MThd" + struct.pack(">IHHH", 6, 1, len(chunks), tpq))
    for chunk in chunks:
        out += b"MTrk" + struct.pack(">I", len(chunk)) + chunk
    return bytes(out)
