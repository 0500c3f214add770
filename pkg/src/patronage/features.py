"""Structural node features: degrees, recursive k-hop aggregation vectors,
cosine similarities, and neighbor-rank statistics.

All feature computation runs on the direction-ignoring, unweighted view of
a graph.  The base triple per node is (degree, edges inside the 1-hop
egonet, edges leaving the egonet); each aggregation round concatenates the
current vector with its neighbor mean and neighbor sum, so k rounds give
3 * 3^k entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy import sparse

from .errors import LengthMismatch, MissingRank, NoNeighbors, UnknownNode
from .graphs import PatronageGraph


def total_degree(g: PatronageGraph, u: int) -> int:
    """In-degree plus out-degree (directed) or plain degree (undirected)."""
    if not g.has_node(u):
        raise UnknownNode(f"node {u} not in graph")
    if g.directed:
        return len(g.out_neighbors(u)) + len(g.in_neighbors(u))
    return len(g.neighbors(u))


def _symmetric_adjacency(g: PatronageGraph) -> tuple[sparse.csr_matrix, dict[int, int]]:
    index = {u: i for i, u in enumerate(g.nodes)}
    n = len(g.nodes)
    rows, cols = [], []
    seen = set()
    for src, dst, _w in g.edges:
        a, b = index[src], index[dst]
        if (a, b) in seen or (b, a) in seen:
            continue
        seen.add((a, b))
        rows += [a, b]
        cols += [b, a]
    data = np.ones(len(rows), dtype=np.float64)
    adj = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
    return adj, index


def _base_features_all(adj: sparse.csr_matrix) -> np.ndarray:
    deg = np.asarray(adj.sum(axis=1)).ravel()
    nbr_deg_sum = adj @ deg
    # edges among the neighbors of u = (A^2 . A) row sum / 2
    tri = np.asarray((adj @ adj).multiply(adj).sum(axis=1)).ravel() / 2.0
    internal = deg + tri
    boundary = deg + nbr_deg_sum - 2.0 * internal
    return np.column_stack([deg, internal, boundary])


def base_features(g: PatronageGraph, u: int) -> np.ndarray:
    """Base triple for one node: degree, egonet-internal edges, egonet-boundary edges."""
    if not g.has_node(u):
        raise UnknownNode(f"node {u} not in graph")
    nbrs = set(g.neighbors(u))
    ego = nbrs | {u}
    internal = 0
    boundary = 0
    for v in sorted(ego):
        for w in g.neighbors(v):
            if w in ego:
                internal += 1
            else:
                boundary += 1
    return np.array([len(nbrs), internal // 2, boundary], dtype=np.float64)


@dataclass(frozen=True)
class FeatureMatrix:
    node_order: tuple[int, ...]
    hops: int
    values: np.ndarray  # (n_nodes, 3 * 3**hops)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def vector(self, u: int) -> np.ndarray:
        try:
            row = self.node_order.index(u)
        except ValueError:
            raise UnknownNode(f"node {u} not in feature matrix") from None
        return self.values[row]

    def write(self, path: str | Path) -> None:
        header = "id," + ",".join(f"f{i}" for i in range(self.width))
        lines = [header]
        for u, row in zip(self.node_order, self.values):
            lines.append(f"{u}," + ",".join(repr(x) for x in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def aggregate_features(g: PatronageGraph, hops: int = 2) -> FeatureMatrix:
    """Recursive neighbor aggregation: v' = concat(v, mean over neighbors, sum).

    Degree-0 nodes contribute zero vectors for both mean and sum, keeping
    the matrix complete.
    """
    if hops < 0:
        raise ValueError("hops must be >= 0")
    adj, _index = _symmetric_adjacency(g)
    deg = np.asarray(adj.sum(axis=1)).ravel()
    safe_deg = np.where(deg > 0, deg, 1.0)
    vec = _base_features_all(adj)
    for _ in range(hops):
        sums = adj @ vec
        means = sums / safe_deg[:, None]
        vec = np.hstack([vec, means, sums])
    return FeatureMatrix(node_order=g.nodes, hops=hops, values=vec)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine with zero-vector conventions: both zero -> 1, one zero -> 0."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatch(f"vector lengths differ: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 and nb == 0.0:
        return 1.0
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    @property
    def proportions(self) -> np.ndarray:
        total = self.counts.sum()
        return self.counts / total if total else self.counts.astype(float)


def similarity_distribution(fm: FeatureMatrix, anchor: int, bins: int = 40) -> Histogram:
    """Histogram of cosine similarity between `anchor` and every other node.

    Bin edges are uniform on [-1, 1]; nonnegative features keep the mass in
    [0, 1].
    """
    anchor_vec = fm.vector(anchor)
    sims = []
    for u, row in zip(fm.node_order, fm.values):
        if u == anchor:
            continue
        sims.append(cosine_similarity(anchor_vec, row))
    counts, edges = np.histogram(np.array(sims), bins=bins, range=(-1.0, 1.0))
    return Histogram(edges=edges, counts=counts)


def neighbor_rank(g: PatronageGraph, ranks: Mapping[int, int], u: int) -> float:
    """Mean rank over direction-ignoring 1-hop neighbors."""
    if not g.has_node(u):
        raise UnknownNode(f"node {u} not in graph")
    nbrs = g.neighbors(u)
    if not nbrs:
        raise NoNeighbors(f"node {u} has no neighbors")
    total = 0
    for v in nbrs:
        if v not in ranks:
            raise MissingRank(f"no rank for neighbor {v}")
        total += ranks[v]
    return total / len(nbrs)


@dataclass(frozen=True)
class DegreeReport:
    """Total degrees with a node grouping (e.g. by gender)."""

    degrees: dict[int, int]
    groups: dict[str, tuple[int, ...]]

    def proportions(self, key: str) -> dict[int, float]:
        members = self.groups[key]
        if not members:
            return {}
        values: dict[int, int] = {}
        for u in members:
            d = self.degrees[u]
            values[d] = values.get(d, 0) + 1
        return {d: c / len(members) for d, c in sorted(values.items())}

    def mean(self, key: str) -> float | None:
        members = self.groups[key]
        if not members:
            return None
        return sum(self.degrees[u] for u in members) / len(members)


def degree_report(g: PatronageGraph, group_of: Mapping[int, str]) -> DegreeReport:
    degrees = {u: total_degree(g, u) for u in g.nodes}
    groups: dict[str, list[int]] = {}
    for u in g.nodes:
        groups.setdefault(group_of[u], []).append(u)
    return DegreeReport(
        degrees=degrees,
        groups={k: tuple(v) for k, v in sorted(groups.items())},
    )
