"""Natural visibility graphs of duration series and their structure metrics.

Each event becomes a node carrying its position ``x`` and duration ``y``.
Two events are linked when the straight line between the tops of their bars
passes strictly above every bar in between. Communities are found with a
seeded Louvain modularity optimisation.
"""

from __future__ import annotations

import math
import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional, Sequence

import networkx as nx
import numpy as np

DEFAULT_SEED = 42
DEFAULT_RESTARTS = 20


@dataclass(frozen=True)
class Partition:
    membership: tuple[int, ...]
    modularity: float
    level_modularity: tuple[float, ...] = ()

    @property
    def n_communities(self) -> int:
        return len(set(self.membership))

    def communities(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.n_communities)]
        for node, c in enumerate(self.membership):
            groups[c].append(node)
        return groups

    def boundaries(self) -> list[int]:
        """Node indices where the community label changes from the previous node."""
        m = self.membership
        return [i for i in range(1, len(m)) if m[i] != m[i - 1]]


@dataclass(frozen=True)
class GraphSummary:
    n_nodes: int
    n_edges: int
    assortativity: Optional[float]
    transitivity: float
    powerlaw_slope: Optional[float]
    powerlaw_intercept: Optional[float]
    n_communities: int
    modularity: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def build_visibility(values: Sequence, coords: Optional[Sequence] = None) -> nx.Graph:
    """Natural visibility graph of ``values`` placed at ``coords`` (default: indices).

    Sightlines are compared by cross-multiplication, so integer inputs are
    handled exactly and collinear bars block each other.
    """
    n = len(values)
    if n < 2:
        raise ValueError(f"visibility graph needs at least 2 points, got {n}")
    xs = list(range(n)) if coords is None else list(coords)
    if len(xs) != n:
        raise ValueError("values and coords differ in length")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("coords must be strictly increasing")

    g = nx.Graph()
    for i, (x, y) in enumerate(zip(xs, values)):
        g.add_node(i, x=x, y=y)
    for i in range(n - 1):
        xi, yi = xs[i], values[i]
        # steepest slope seen so far from i, kept as (rise, run) with run > 0
        best_dy, best_dx = None, 1
        for j in range(i + 1, n):
            dy, dx = values[j] - yi, xs[j] - xi
            if best_dy is None or dy * best_dx > best_dy * dx:
                g.add_edge(i, j)
                best_dy, best_dx = dy, dx
    return g


# --------------------------------------------------------------------------
# Modularity and Louvain
# --------------------------------------------------------------------------

def modularity(g: nx.Graph, membership: Sequence[int], resolution: float = 1.0) -> float:
    """Newman-Girvan modularity of the partition ``membership`` (indexed by node)."""
    m = g.number_of_edges()
    if m == 0:
        return 0.0
    internal = defaultdict(int)
    degree = defaultdict(int)
    for u, v in g.edges():
        if membership[u] == membership[v]:
            internal[membership[u]] += 1
    for u, k in g.degree():
        degree[membership[u]] += k
    return sum(internal[c] / m - resolution * (degree[c] / (2 * m)) ** 2 for c in degree)


def _one_level(adj, k, m2, order, resolution, start=None):
    """Local moving phase. Returns community per node and whether anything moved."""
    comm = list(range(len(adj))) if start is None else list(start)
    tot = [0.0] * len(adj)
    size = [0] * len(adj)
    for i, c in enumerate(comm):
        tot[c] += k[i]
        size[c] += 1
    moved_any = start is not None and len(set(comm)) < len(comm)
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = comm[i]
            links = defaultdict(float)
            for j, w in adj[i].items():
                links[comm[j]] += w
            tot[ci] -= k[i]
            size[ci] -= 1
            base = links.get(ci, 0.0) - resolution * tot[ci] * k[i] / m2
            best_c, best_gain = ci, base
            if size[i] == 0 and 0.0 > best_gain + 1e-12:
                # leaving for an empty community scores zero
                best_c, best_gain = i, 0.0
            for c, w in links.items():
                gain = w - resolution * tot[c] * k[i] / m2
                if gain > best_gain + 1e-12:
                    best_c, best_gain = c, gain
            tot[best_c] += k[i]
            size[best_c] += 1
            if best_c != ci:
                comm[i] = best_c
                improved = moved_any = True
    return comm, moved_any


def _louvain(g: nx.Graph, rng: random.Random, resolution: float, groups: int = 0) -> Partition:
    nodes = sorted(g.nodes())
    index = {u: i for i, u in enumerate(nodes)}
    n = len(nodes)
    adj = [defaultdict(float) for _ in range(n)]
    for u, v in g.edges():
        adj[index[u]][index[v]] += 1.0
        adj[index[v]][index[u]] += 1.0
    # weight of edges folded inside each super node
    self_w = [0.0] * n
    m2 = 2.0 * g.number_of_edges()
    owner = list(range(n))  # original node -> current super node
    history = []
    # optional random coarse partition to start the first level from
    start = [rng.randrange(min(groups, n)) for _ in range(n)] if groups else None

    while True:
        size = len(adj)
        k = [sum(adj[i].values()) + 2 * self_w[i] for i in range(size)]
        order = list(range(size))
        rng.shuffle(order)
        comm, moved = _one_level(adj, k, m2, order, resolution, start)
        start = None
        if not moved:
            break
        relabel = {}
        for c in comm:
            relabel.setdefault(c, len(relabel))
        comm = [relabel[c] for c in comm]
        owner = [comm[s] for s in owner]
        history.append(modularity(g, [owner[index[u]] for u in nodes], resolution))

        new_adj = [defaultdict(float) for _ in range(len(relabel))]
        new_self = [0.0] * len(relabel)
        for i in range(size):
            ci = comm[i]
            new_self[ci] += self_w[i]
            for j, w in adj[i].items():
                cj = comm[j]
                if ci == cj:
                    new_self[ci] += w / 2
                else:
                    new_adj[ci][cj] += w
        adj, self_w = new_adj, new_self

    first_seen = {}
    for s in owner:
        first_seen.setdefault(s, len(first_seen))
    membership = tuple(first_seen[s] for s in owner)
    return Partition(membership, modularity(g, membership, resolution), tuple(history))


def detect_communities(g: nx.Graph, seed: int = DEFAULT_SEED, resolution: float = 1.0,
                       restarts: int = DEFAULT_RESTARTS) -> Partition:
    """Louvain community detection with node visiting orders drawn from ``seed``.

    Each run alternates local node moves and community aggregation until a
    level brings no further change. The first run starts from singletons.
    Greedy moves can stall in a poor local optimum, so the remaining
    ``restarts - 1`` runs start from random coarse partitions with fresh
    visiting orders, and the partition with the highest modularity is kept
    (the earliest run wins ties). ``restarts=1`` is plain Louvain. Community
    ids are renumbered by the smallest node they contain.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    n = g.number_of_nodes()
    if n == 0:
        return Partition((), 0.0)
    if g.number_of_edges() == 0:
        return Partition(tuple(range(n)), 0.0)
    rng = random.Random(seed)
    best = None
    for run in range(restarts):
        p = _louvain(g, rng, resolution, groups=0 if run == 0 else rng.randint(2, 4))
        if best is None or p.modularity > best.modularity + 1e-12:
            best = p
    return best


# --------------------------------------------------------------------------
# Degree structure
# --------------------------------------------------------------------------

def degree_correlation(g: nx.Graph) -> dict[int, float]:
    """Mean neighbour degree ``k_m(k)`` averaged over all nodes of degree ``k``."""
    if g.number_of_edges() == 0:
        return {}
    deg = dict(g.degree())
    per_k = defaultdict(list)
    for u, k in deg.items():
        if k:
            per_k[k].append(sum(deg[v] for v in g[u]) / k)
    return {k: float(np.mean(v)) for k, v in sorted(per_k.items())}


def powerlaw_fit(corr: dict) -> Optional[tuple[float, float]]:
    """Least-squares fit of ``k_m(k) = a k^b`` in log-log space; ``None`` if undefined."""
    pts = [(k, km) for k, km in corr.items() if k > 0 and km > 0]
    if len({k for k, _ in pts}) < 2:
        return None
    lx = np.log([k for k, _ in pts])
    ly = np.log([km for _, km in pts])
    b, log_a = np.polyfit(lx, ly, 1)
    return float(math.exp(log_a)), float(b)


def assortativity(g: nx.Graph) -> Optional[float]:
    """Degree assortativity; ``None`` when every edge end has the same degree."""
    if g.number_of_edges() == 0:
        return None
    deg = dict(g.degree())
    s1 = s2 = sxy = 0
    for u, v in g.edges():
        a, b = deg[u], deg[v]
        s1 += a + b
        s2 += a * a + b * b
        sxy += 2 * a * b
    count = 2 * g.number_of_edges()
    var = count * s2 - s1 * s1
    if var == 0:
        return None
    r = (count * sxy - s1 * s1) / var
    return max(-1.0, min(1.0, r))


def transitivity(g: nx.Graph) -> float:
    """Three times the number of triangles over the number of connected triples."""
    nbrs = {u: set(g[u]) - {u} for u in g}
    triples = sum(len(s) * (len(s) - 1) // 2 for s in nbrs.values())
    if triples == 0:
        return 0.0
    # each triangle is seen once from every corner
    closed = sum(len(nbrs[u] & nbrs[v]) for u in g for v in nbrs[u] if v > u)
    return closed / triples


def summarize(g: nx.Graph, partition: Partition) -> GraphSummary:
    fit = powerlaw_fit(degree_correlation(g))
    return GraphSummary(
        n_nodes=g.number_of_nodes(),
        n_edges=g.number_of_edges(),
        assortativity=assortativity(g),
        transitivity=transitivity(g),
        powerlaw_slope=None if fit is None else fit[1],
        powerlaw_intercept=None if fit is None else fit[0],
        n_communities=partition.n_communities,
        modularity=partition.modularity,
    )
