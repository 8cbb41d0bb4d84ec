"""Command-line front end.

Exit codes
----------
0  success
1  unexpected internal error
2  usage error (unknown flag, bad value)
3  input file missing or unreadable
4  input could not be parsed or failed validation
5  reports are not comparable (differing configurations)
6  not enough musical material for the requested analysis
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import export
from .dynamics import (AnalysisConfig, StaticReport, compare_static, content_hash, duration_graph, dynamic_metrics,
                       prepare, static_metrics)
from .errors import ComparabilityError, InsufficientDataError, ParseError, RhythmFormError, ValidationError
from .midi import parse_midi
from .score import Score, parse_rhythm_json
from .visibility import detect_communities

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_UNREADABLE = 3
EXIT_PARSE = 4
EXIT_COMPARABILITY = 5
EXIT_INSUFFICIENT = 6

MODE_FORMATS = {
    "static": {"json"},
    "dynamic": {"csv", "json"},
    "graph": {"csv", "dot"},
    "compare": {"csv"},
}
FORMATS = ("json", "csv", "dot", "svg")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def load_score(path: Path) -> tuple[Score, str]:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_UNREADABLE) from exc
    if path.suffix.lower() in (".mid", ".midi", ".smf"):
        score = parse_midi(data)
    else:
        score = parse_rhythm_json(data)
    return score, content_hash(data)


def _voices(text):
    if text is None or text == "all":
        return None
    try:
        return tuple(sorted({int(v) for v in text.split(",") if v.strip()}))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'all' or comma-separated voice ids, got {text!r}")


def _formats(text):
    items = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in items if t not in FORMATS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format(s) {bad}; choose from {FORMATS}")
    return items


def _default_seed():
    raw = os.environ.get("RHYTHMFORM_SEED")
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"RHYTHMFORM_SEED must be an integer, got {raw!r}", EXIT_USAGE)


def build_parser(default_seed: int = 42) -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("analysis")
    g.add_argument("--embedding-dim", type=int, default=3, help="ordinal pattern length D (default: 3)")
    g.add_argument("--stride", type=int, default=1, help="step between pattern windows (default: 1)")
    g.add_argument("--bins", type=int, default=11, help="off-beat histogram bins (default: 11)")
    g.add_argument("--beat-rule", choices=("denominator", "compound"), default="denominator")
    g.add_argument("--beat-ticks", type=int, default=None, help="override the beat length in ticks")
    g.add_argument("--tolerance", type=int, default=0, help="on-beat tolerance in ticks (default: 0)")
    g.add_argument("--empty-measure", choices=("skip", "zero"), default="skip")
    g.add_argument("--window", type=int, default=2, help="window length W in measures (default: 2)")
    g.add_argument("--slide", type=int, default=1, help="window step in measures (default: 1)")
    g.add_argument("--seed", type=int, default=default_seed, help="community detection seed")
    g.add_argument("--time-axis", choices=("index", "onset"), default="index")
    g.add_argument("--voices", type=_voices, default=None, help="'all' or comma-separated voice ids")
    g.add_argument("--include-final", choices=("auto", "on", "off"), default="auto")
    g.add_argument("--min-duration", type=int, default=0, help="drop notes shorter than this many ticks")
    g.add_argument("--pickup", type=int, default=0, help="anacrusis length in ticks")
    o = shared.add_argument_group("output")
    o.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    o.add_argument("--format", type=_formats, action="append", default=None,
                   help=f"restrict outputs to these formats, from {', '.join(FORMATS)}")

    parser = argparse.ArgumentParser(prog="rhythmform", description="Rhythmic complexity of symbolic scores.")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, help_text in (("static", "whole-piece metrics"), ("dynamic", "sliding-window metrics"),
                            ("graph", "visibility graph and communities")):
        p = sub.add_parser(mode, parents=[shared], help=help_text)
        p.add_argument("input", type=Path)
    p = sub.add_parser("compare", parents=[shared], help="static metrics of several pieces, ordered by heterogeneity",
                       description="Scores are analysed with the given settings. Previously written *.static.json "
                                   "reports are reused as they are and must have been made with the same settings.")
    p.add_argument("inputs", type=Path, nargs="+")
    return parser


def config_from_args(args) -> AnalysisConfig:
    return AnalysisConfig(
        embedding_dim=args.embedding_dim, stride=args.stride, bins=args.bins,
        beat_rule=args.beat_rule, beat_ticks=args.beat_ticks, tolerance=args.tolerance,
        empty_measure=args.empty_measure, window=args.window, slide=args.slide, seed=args.seed,
        time_axis=args.time_axis, voices=args.voices, include_final=args.include_final,
        min_duration=args.min_duration, pickup=args.pickup,
    )


def _wanted(args) -> set[str]:
    if args.format is None:
        return set(MODE_FORMATS[args.mode])
    return {f for group in args.format for f in group}


def _run_static(args, config, out, wanted):
    score, digest = load_score(args.input)
    report = static_metrics(score, config, digest)
    stem = args.input.stem
    if "json" in wanted:
        (out / f"{stem}.static.json").write_text(report.to_json())
    h = "undefined" if report.heterogeneity is None else f"{report.heterogeneity:.4f}"
    print(f"{stem}: H={h} Q={report.syncopation:.4f}")


def _run_dynamic(args, config, out, wanted):
    score, digest = load_score(args.input)
    series = dynamic_metrics(score, config, digest)
    stem = args.input.stem
    if "csv" in wanted or "svg" in wanted:
        export.emit_plot_data(out, stem, series=series, annotations=score.annotations, svg="svg" in wanted)
        if "csv" not in wanted:
            (out / f"{stem}.dynamic.csv").unlink()
    if "json" in wanted:
        (out / f"{stem}.dynamic.json").write_text(export.series_json(series))
    mh, mq = series.mean_heterogeneity, series.mean_syncopation
    print(f"{stem}: {len(series)} windows, mean H={'undefined' if mh is None else f'{mh:.4f}'}, "
          f"mean Q={'undefined' if mq is None else f'{mq:.4f}'}")


def _run_graph(args, config, out, wanted):
    score, digest = load_score(args.input)
    prep = prepare(score, config)
    g = duration_graph(prep, config)
    partition = detect_communities(g, config.seed)
    comment = export.provenance(config.echo(), digest)
    stem = args.input.stem
    onsets = prep.series.onsets
    (out / f"{stem}.edges").write_text(export.edge_list(g, comment))
    if "dot" in wanted:
        (out / f"{stem}.dot").write_text(export.dot(g, partition, comment))
    if "csv" in wanted or "svg" in wanted:
        measure_of_node = [prep.grid.measure_of(o) for o in onsets[:g.number_of_nodes()]]
        export.emit_plot_data(out, stem, graph=g, partition=partition, onsets=onsets,
                              annotations=score.annotations, measure_of_node=measure_of_node,
                              svg="svg" in wanted, comment=comment)
        if "csv" not in wanted:
            (out / f"{stem}.partition.csv").unlink()
    print(f"{stem}: {g.number_of_nodes()} nodes, {g.number_of_edges()} edges, "
          f"{partition.n_communities} communities (modularity {partition.modularity:.4f})")


def _load_report(path: Path):
    """A previously written static report, or ``None`` if ``path`` is not one."""
    if not path.name.endswith(".static.json"):
        return None
    try:
        doc = json.loads(path.read_bytes())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_UNREADABLE) from exc
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not StaticReport.looks_like(doc):
        return None
    try:
        return StaticReport.from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed static report ({exc})") from exc


def _run_compare(args, config, out, wanted):
    reports, names, hashes = [], [], []
    for path in args.inputs:
        report = _load_report(path)
        if report is None:
            score, digest = load_score(path)
            report = static_metrics(score, config, digest)
            names.append(path.stem)
        else:
            names.append(path.name[:-len(".static.json")])
        reports.append(report)
        hashes.append(report.input_hash)
    # cached reports must match the settings of this run
    rows = compare_static(reports, names, config)
    combined = content_hash("".join(hashes))
    if "csv" in wanted:
        (out / "compare.csv").write_text(export.compare_csv(rows, export.provenance(config.echo(), combined)))
    for row in rows:
        h = row["heterogeneity"]
        print(f"{row['name']}: H={'undefined' if h is None else f'{h:.4f}'} Q={row['syncopation']:.4f}")


RUNNERS = {"static": _run_static, "dynamic": _run_dynamic, "graph": _run_graph, "compare": _run_compare}


def run(argv=None) -> int:
    try:
        parser = build_parser(_default_seed())
    except CliError as exc:
        print(f"rhythmform: error: {exc}", file=sys.stderr)
        return exc.code
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    try:
        config = config_from_args(args)
    except ValueError as exc:
        print(f"rhythmform: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        args.out.mkdir(parents=True, exist_ok=True)
        RUNNERS[args.mode](args, config, args.out, _wanted(args))
    except CliError as exc:
        print(f"rhythmform: error: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, ValidationError) as exc:
        print(f"rhythmform: error: cannot parse input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ComparabilityError as exc:
        print(f"rhythmform: error: {exc}", file=sys.stderr)
        return EXIT_COMPARABILITY
    except InsufficientDataError as exc:
        print(f"rhythmform: error: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except ValueError as exc:
        print(f"rhythmform: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RhythmFormError as exc:
        print(f"rhythmform: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
