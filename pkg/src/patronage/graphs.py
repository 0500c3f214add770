"""Patronage-network construction and the shared graph container.

Three builders turn a dataset into networks over the full politician set:

* home-origin: undirected, politicians from the same city (optionally
  restricted to pairs who also served in the same organization at
  overlapping times);
* overlap: directed and weighted, one edge per pair with at least six
  summed co-location months, weight = total months, direction from the
  junior to the senior (time-weighted average rank over the shared months);
* promotion: directed and unweighted, promotee to promoter.

Every politician in the dataset is a node of every graph, so isolated
nodes are preserved.
"""

from __future__ import annotations

from bisect import insort
from enum import Enum
from pathlib import Path

import numpy as np

from .dataset import Dataset, canonical_promotion_order, canonical_spell_order
from .errors import UnknownNode
from .model import JobSpell, YearMonth

#: summed co-location months required for an overlap edge
OVERLAP_MIN_MONTHS = 6


class GraphKind(str, Enum):
    HOME_ORIGIN_FULL = "home_origin_full"
    HOME_ORIGIN_WORKED = "home_origin_worked"
    OVERLAP = "overlap"
    PROMOTION = "promotion"


class PatronageGraph:
    """Immutable edge-list graph with adjacency indexes.

    Edges are stored canonically sorted by (src, dst); undirected edges are
    stored once with src < dst.  Self-loops and duplicate pairs are
    rejected.
    """

    __slots__ = ("kind", "directed", "weighted", "nodes", "edges",
                 "_out", "_in", "_nbr", "_weights")

    def __init__(self, nodes, edges, *, directed: bool, weighted: bool,
                 kind: GraphKind | None = None):
        self.kind = kind
        self.directed = directed
        self.weighted = weighted
        self.nodes = tuple(sorted(set(nodes)))
        node_set = set(self.nodes)

        canonical = []
        for src, dst, weight in edges:
            if src == dst:
                raise ValueError(f"self-loop on node {src}")
            if src not in node_set or dst not in node_set:
                raise ValueError(f"edge ({src},{dst}) references unknown node")
            if weighted and weight is None:
                raise ValueError(f"edge ({src},{dst}) missing weight")
            if not weighted:
                weight = None
            if not directed and src > dst:
                src, dst = dst, src
            canonical.append((src, dst, weight))
        canonical.sort(key=lambda e: (e[0], e[1]))
        for a, b in zip(canonical, canonical[1:]):
            if a[0] == b[0] and a[1] == b[1]:
                raise ValueError(f"duplicate edge ({a[0]},{a[1]})")
        self.edges = tuple(canonical)

        out: dict[int, list[int]] = {u: [] for u in self.nodes}
        inc: dict[int, list[int]] = {u: [] for u in self.nodes}
        weights: dict[tuple[int, int], int | None] = {}
        for src, dst, weight in self.edges:
            out[src].append(dst)
            inc[dst].append(src)
            weights[(src, dst)] = weight
        self._out = out
        self._in = inc
        self._weights = weights
        nbr = {}
        for u in self.nodes:
            nbr[u] = tuple(sorted(set(out[u]) | set(inc[u])))
        self._nbr = nbr

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def has_node(self, u: int) -> bool:
        return u in self._nbr

    def _check(self, u: int) -> None:
        if u not in self._nbr:
            raise UnknownNode(f"node {u} not in graph")

    def out_neighbors(self, u: int) -> tuple[int, ...]:
        self._check(u)
        return tuple(self._out[u])

    def in_neighbors(self, u: int) -> tuple[int, ...]:
        self._check(u)
        return tuple(self._in[u])

    def neighbors(self, u: int) -> tuple[int, ...]:
        """Direction-ignoring neighbor set."""
        self._check(u)
        return self._nbr[u]

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._nbr.get(u, ())

    def weight(self, u: int, v: int) -> int | None:
        if not self.directed and u > v:
            u, v = v, u
        return self._weights[(u, v)]

    def __eq__(self, other):
        if not isinstance(other, PatronageGraph):
            return NotImplemented
        return (self.directed == other.directed and self.weighted == other.weighted
                and self.nodes == other.nodes and self.edges == other.edges)

    def __repr__(self):
        label = self.kind.value if self.kind else "graph"
        return f"<PatronageGraph {label}: {self.n_nodes} nodes, {self.n_edges} edges>"


def write_edge_list(g: PatronageGraph, path: str | Path) -> None:
    """`src,dst,weight` rows sorted by (src, dst); weight column only when weighted."""
    lines = ["src,dst,weight" if g.weighted else "src,dst"]
    for src, dst, weight in g.edges:
        if g.weighted:
            lines.append(f"{src},{dst},{weight}")
        else:
            lines.append(f"{src},{dst}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _spell_buckets(spells, key) -> dict:
    buckets: dict = {}
    for s in spells:
        buckets.setdefault(key(s), []).append(s)
    return buckets


def _pair_sweep(entries: list[tuple[int, int, int]]):
    """Yield (u, v, lo, hi) co-location intervals from (lo, hi, pid) entries."""
    active: list[tuple[int, int, int]] = []  # (hi, lo, pid)
    for lo, hi, pid in sorted(entries):
        active = [a for a in active if a[0] >= lo]
        for ahi, _alo, apid in active:
            if apid != pid:
                yield pid, apid, lo, min(hi, ahi)
        insort(active, (hi, lo, pid))


def _merge_intervals(intervals: list[tuple[int, int]]) -> list[tuple[int, int]]:
    merged: list[list[int]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1] + 1:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


class _RankTimelines:
    """Per-politician month-indexed rank-in-force arrays.

    The rank in force during a month is the maximum rank over all spells
    covering it (concurrent posts resolve upward, matching final-rank
    semantics).
    """

    def __init__(self, ds: Dataset):
        self._lo: dict[int, int] = {}
        self._arr: dict[int, np.ndarray] = {}
        for pid in ds.politicians:
            spells = ds.spells_of(pid)
            if not spells:
                continue
            lo = min(s.start.index for s in spells)
            hi = max(s.end.index for s in spells)
            arr = np.full(hi - lo + 1, -1, dtype=np.int16)
            for s in spells:
                a, b = s.start.index - lo, s.end.index - lo
                np.maximum(arr[a:b + 1], s.rank, out=arr[a:b + 1])
            self._lo[pid] = lo
            self._arr[pid] = arr

    def average(self, pid: int, intervals: list[tuple[int, int]]) -> float:
        lo = self._lo[pid]
        arr = self._arr[pid]
        chunks = [arr[a - lo:b - lo + 1] for a, b in intervals]
        vals = np.concatenate(chunks)
        return float(vals.mean())


def build_home_origin(ds: Dataset, variant: str = "full") -> PatronageGraph:
    """Connect politicians sharing a home city.

    ``full`` joins every same-city pair (each city induces a complete
    subgraph); ``worked`` additionally requires a pair of spells in the
    same organization overlapping by at least one month.
    """
    if variant not in ("full", "worked"):
        raise ValueError(f"variant must be 'full' or 'worked', got {variant!r}")
    by_city: dict[str, list[int]] = {}
    for pid in sorted(ds.politicians):
        by_city.setdefault(ds.politicians[pid].home_city, []).append(pid)

    worked_pairs: set[tuple[int, int]] | None = None
    if variant == "worked":
        worked_pairs = set()
        by_org = _spell_buckets(ds.spells, key=lambda s: s.organization)
        for org in sorted(by_org):
            entries = [(s.start.index, s.end.index, s.politician_id) for s in by_org[org]]
            for u, v, _lo, _hi in _pair_sweep(entries):
                worked_pairs.add((u, v) if u < v else (v, u))

    edges = []
    for city in sorted(by_city):
        members = by_city[city]
        for i, u in enumerate(members):
            for v in members[i + 1:]:
                if worked_pairs is None or (u, v) in worked_pairs:
                    edges.append((u, v, None))
    kind = GraphKind.HOME_ORIGIN_FULL if variant == "full" else GraphKind.HOME_ORIGIN_WORKED
    return PatronageGraph(ds.politicians, edges, directed=False, weighted=False, kind=kind)


def build_overlap(ds: Dataset) -> PatronageGraph:
    """Directed weighted network over pairs with >= 6 summed co-location months.

    The weight sums overlap months across all spell pairs in the same
    (province, municipality); the edge points from the junior to the senior,
    where seniority compares time-weighted average rank over the union of
    shared months (ties: earlier party-join year, then smaller id, is
    senior).
    """
    totals: dict[tuple[int, int], int] = {}
    windows: dict[tuple[int, int], list[tuple[int, int]]] = {}
    buckets = _spell_buckets(ds.spells, key=lambda s: (s.province, s.municipality))
    for place in sorted(buckets):
        entries = [(s.start.index, s.end.index, s.politician_id) for s in buckets[place]]
        for u, v, lo, hi in _pair_sweep(entries):
            key = (u, v) if u < v else (v, u)
            totals[key] = totals.get(key, 0) + hi - lo + 1
            windows.setdefault(key, []).append((lo, hi))

    timelines = _RankTimelines(ds)
    edges = []
    for (u, v), months in sorted(totals.items()):
        if months < OVERLAP_MIN_MONTHS:
            continue
        union = _merge_intervals(windows[(u, v)])
        avg_u = timelines.average(u, union)
        avg_v = timelines.average(v, union)
        if avg_u != avg_v:
            senior = v if avg_v > avg_u else u
        else:
            pu, pv = ds.politicians[u], ds.politicians[v]
            if pu.party_join_year != pv.party_join_year:
                senior = u if pu.party_join_year < pv.party_join_year else v
            else:
                senior = min(u, v)
        junior = v if senior == u else u
        edges.append((junior, senior, months))
    return PatronageGraph(ds.politicians, edges, directed=True, weighted=True,
                          kind=GraphKind.OVERLAP)


def build_promotion(ds: Dataset) -> PatronageGraph:
    """Directed unweighted promotee-to-promoter edges; duplicates collapse."""
    pairs = set()
    for ev in ds.promotions:
        for promoter in ev.promoters:
            pairs.add((ev.promotee, promoter))
    edges = [(u, v, None) for u, v in sorted(pairs)]
    return PatronageGraph(ds.politicians, edges, directed=True, weighted=False,
                          kind=GraphKind.PROMOTION)


def build_graph(ds: Dataset, kind: GraphKind) -> PatronageGraph:
    if kind == GraphKind.HOME_ORIGIN_FULL:
        return build_home_origin(ds, "full")
    if kind == GraphKind.HOME_ORIGIN_WORKED:
        return build_home_origin(ds, "worked")
    if kind == GraphKind.OVERLAP:
        return build_overlap(ds)
    if kind == GraphKind.PROMOTION:
        return build_promotion(ds)
    raise ValueError(f"unknown graph kind {kind!r}")


def undirect(g: PatronageGraph) -> PatronageGraph:
    """Down-grade to an undirected, unweighted copy; antiparallel pairs merge."""
    pairs = {(min(u, v), max(u, v)) for u, v, _w in g.edges}
    edges = [(u, v, None) for u, v in sorted(pairs)]
    return PatronageGraph(g.nodes, edges, directed=False, weighted=False, kind=g.kind)


def ego_subgraph(g: PatronageGraph, center: int, hops: int = 1) -> PatronageGraph:
    """Induced subgraph on nodes within `hops` (direction-ignoring) of center."""
    if not g.has_node(center):
        raise UnknownNode(f"node {center} not in graph")
    if hops < 1:
        raise ValueError("hops must be >= 1")
    keep = {center}
    frontier = [center]
    for _ in range(hops):
        nxt = []
        for u in frontier:
            for v in g.neighbors(u):
                if v not in keep:
                    keep.add(v)
                    nxt.append(v)
        frontier = nxt
    edges = [(u, v, w) for u, v, w in g.edges if u in keep and v in keep]
    return PatronageGraph(keep, edges, directed=g.directed, weighted=g.weighted,
                          kind=g.kind)


def truncate_before(ds: Dataset, cutoff: YearMonth) -> Dataset:
    """Clip the dataset to information available up to `cutoff` inclusive.

    Spells starting after the cutoff drop; spells straddling it are
    shortened; promotion events after it drop.  Politicians and the end
    year are unchanged.
    """
    spells = []
    for s in ds.spells:
        if s.start > cutoff:
            continue
        if s.end > cutoff:
            s = JobSpell(
                politician_id=s.politician_id, start=s.start, end=cutoff,
                province=s.province, municipality=s.municipality,
                organization=s.organization, rank=s.rank,
            )
        spells.append(s)
    promotions = [ev for ev in ds.promotions if ev.date <= cutoff]
    return Dataset(
        politicians=dict(ds.politicians),
        spells=sorted(spells, key=canonical_spell_order),
        promotions=sorted(promotions, key=canonical_promotion_order),
        end_year=ds.end_year,
    )
