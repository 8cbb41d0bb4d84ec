"""Writers for reports, graphs and plot-ready data.

Every text artefact starts with comment lines carrying the configuration
echo and the input hash, so a file on its own says how it was produced.
Outputs contain no timestamps; identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Optional, Sequence

import networkx as nx

from .dynamics import ComplexitySeries, StaticReport
from .score import Annotation
from .visibility import Partition

SERIES_COLUMNS = ("window_start_measure", "window_end_measure", "heterogeneity", "syncopation")
PARTITION_COLUMNS = ("node", "onset_tick", "duration", "community")
COMPARE_COLUMNS = ("name", "heterogeneity", "syncopation", "assortativity", "transitivity", "input_sha256")


def provenance(config: dict, input_hash: str) -> str:
    return json.dumps({"config": config, "input_sha256": input_hash}, sort_keys=True, separators=(",", ":"))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv(header_comment: str, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(f"# {header_comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def series_csv(series: ComplexitySeries) -> str:
    rows = ((e.start_measure, e.end_measure, e.heterogeneity, e.syncopation) for e in series.entries)
    return _csv(provenance(series.config.echo(), series.input_hash), SERIES_COLUMNS, rows)


def series_json(series: ComplexitySeries) -> str:
    return json.dumps(series.to_dict(), indent=2, sort_keys=True) + "\n"


def report_json(report: StaticReport) -> str:
    return report.to_json()


def partition_csv(g: nx.Graph, partition: Partition, onsets: Sequence[int], comment: str = "") -> str:
    rows = (
        (node, onsets[node] if node < len(onsets) else "", g.nodes[node]["y"], partition.membership[node])
        for node in sorted(g.nodes())
    )
    return _csv(comment, PARTITION_COLUMNS, rows)


def edge_list(g: nx.Graph, comment: str = "") -> str:
    lines = [f"# {comment}"] if comment else []
    lines.extend(f"{u} {v}" for u, v in sorted(tuple(sorted(e)) for e in g.edges()))
    return "\n".join(lines) + "\n"


def dot(g: nx.Graph, partition: Partition, comment: str = "", name: str = "visibility") -> str:
    lines = []
    if comment:
        lines.append("// " + comment)
    lines.append(f"graph {name} {{")
    for node in sorted(g.nodes()):
        lines.append(f'  {node} [community={partition.membership[node]}, duration={g.nodes[node]["y"]}];')
    for u, v in sorted(tuple(sorted(e)) for e in g.edges()):
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def compare_csv(rows: Sequence[dict], comment: str = "") -> str:
    return _csv(comment, COMPARE_COLUMNS, ([row[c] for c in COMPARE_COLUMNS] for row in rows))


# --------------------------------------------------------------------------
# SVG charts
# --------------------------------------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "rhythmform"
    plt.rcParams["svg.fonttype"] = "none"
    return plt


def _save_svg(fig, path: Path, description: str):
    fig.savefig(path, format="svg", metadata={"Date": None, "Description": description})


def series_svg(series: ComplexitySeries, path: Path, annotations: Sequence[Annotation] = ()):
    """Line chart of windowed heterogeneity and syncopation with section markers."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(9, 3.2))
    xs = [e.start_measure for e in series.entries]
    h = [float("nan") if e.heterogeneity is None else e.heterogeneity for e in series.entries]
    q = [float("nan") if e.syncopation is None else e.syncopation for e in series.entries]
    ax.plot(xs, h, color="black", marker="o", ms=3, label="heterogeneity")
    ax.plot(xs, q, color="gray", marker="s", ms=3, label="syncopation")
    palette = plt.get_cmap("tab10")
    labels = sorted({a.label for a in annotations})
    for a in annotations:
        ax.axvline(a.start_measure, color=palette(labels.index(a.label) % 10), lw=1.5)
        ax.text(a.start_measure + 0.1, 1.02, a.label, fontsize=7, va="bottom")
    ax.set_ylim(0, 1)
    ax.set_xlabel("window start (measure)")
    ax.set_ylabel("complexity")
    ax.legend(loc="lower right", fontsize=7)
    fig.tight_layout()
    _save_svg(fig, path, provenance(series.config.echo(), series.input_hash))
    plt.close(fig)


def partition_svg(g: nx.Graph, partition: Partition, path: Path, description: str = "",
                  measure_of_node: Optional[Sequence[int]] = None, annotations: Sequence[Annotation] = ()):
    """Bar chart of event durations coloured by community."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(10, 3))
    palette = plt.get_cmap("tab20")
    nodes = sorted(g.nodes())
    ax.bar(nodes, [g.nodes[n]["y"] for n in nodes], width=0.8,
           color=[palette(partition.membership[n] % 20) for n in nodes])
    if measure_of_node is not None:
        for a in annotations:
            first = next((n for n in nodes if measure_of_node[n] >= a.start_measure), None)
            if first is not None:
                ax.axvline(first - 0.5, color="black", lw=0.8)
                ax.text(first - 0.4, ax.get_ylim()[1], a.label, fontsize=7, va="top")
    ax.set_xlabel("event")
    ax.set_ylabel("duration (ticks)")
    fig.tight_layout()
    _save_svg(fig, path, description)
    plt.close(fig)


def emit_plot_data(out_dir, stem: str, series: Optional[ComplexitySeries] = None,
                   graph: Optional[nx.Graph] = None, partition: Optional[Partition] = None,
                   onsets: Sequence[int] = (), annotations: Sequence[Annotation] = (),
                   measure_of_node: Optional[Sequence[int]] = None, svg: bool = True,
                   comment: str = "") -> list[Path]:
    """Write plot-ready CSV files and, optionally, SVG charts. Returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if series is not None:
        if not series.entries:
            raise ValueError("complexity series is empty")
        path = out_dir / f"{stem}.dynamic.csv"
        path.write_text(series_csv(series))
        written.append(path)
        if svg:
            path = out_dir / f"{stem}.dynamic.svg"
            series_svg(series, path, annotations)
            written.append(path)
    if graph is not None and partition is not None:
        path = out_dir / f"{stem}.partition.csv"
        path.write_text(partition_csv(graph, partition, onsets, comment))
        written.append(path)
        if svg:
            path = out_dir / f"{stem}.graph.svg"
            partition_svg(graph, partition, path, comment, measure_of_node, annotations)
            written.append(path)
    return written
