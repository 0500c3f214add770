"""Faction analytics: clique ratios, gender reports, home-origin tables.

Cliques are attribute groups (home city by default, home province
optionally), not detected communities.  The clique ratio of a node is its
within-clique edge count over its between-clique edge count, capped at 30
(a node with no between-clique edges reports the cap).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .dataset import Dataset
from .errors import DegenerateSample, MissingClique, MissingGender
from .features import degree_report, neighbor_rank, total_degree
from .graphs import PatronageGraph
from .model import Gender, is_high_rank
from .stats import WelchResult, welch_t_test

RATIO_CAP = 30.0
#: per-rank ratio aggregates cover levels >= this by default
RATIO_MIN_LEVEL = 5


def build_clique_assignment(ds: Dataset, level: str = "city") -> dict[int, str]:
    """Assign every politician to its home city or home province."""
    if level not in ("city", "province"):
        raise ValueError(f"level must be 'city' or 'province', got {level!r}")
    if level == "city":
        return {pid: p.home_city for pid, p in sorted(ds.politicians.items())}
    return {pid: p.home_province for pid, p in sorted(ds.politicians.items())}


@dataclass(frozen=True)
class LevelRatio:
    mean_ratio: float
    count: int


@dataclass(frozen=True)
class CliqueRatioReport:
    within: dict[int, int]
    between: dict[int, int]
    ratio: dict[int, float]              # capped; degree-0 nodes are absent
    per_level: dict[int, LevelRatio]     # levels >= min_level with >= 1 node
    level_ratios: dict[int, tuple[float, ...]]
    zero_degree_nodes: int
    unranked_nodes: int
    min_level: int


def clique_ratio(
    g: PatronageGraph,
    cliques: Mapping[int, str],
    ranks: Mapping[int, int],
    min_level: int = RATIO_MIN_LEVEL,
    strict: bool = False,
    cap: float = RATIO_CAP,
) -> CliqueRatioReport:
    """Within/between edge counts and capped ratios on an undirected graph.

    ``strict`` restricts per-level aggregates to levels strictly above
    `min_level` instead of at-or-above.
    """
    if g.directed:
        raise ValueError("clique ratios run on the down-graded (undirected) graph")
    within: dict[int, int] = {}
    between: dict[int, int] = {}
    for u in g.nodes:
        if u not in cliques:
            raise MissingClique(f"node {u} has no clique assignment")
        w = b = 0
        mine = cliques[u]
        for v in g.neighbors(u):
            if v not in cliques:
                raise MissingClique(f"node {v} has no clique assignment")
            if cliques[v] == mine:
                w += 1
            else:
                b += 1
        within[u] = w
        between[u] = b

    ratio: dict[int, float] = {}
    zero_degree = 0
    for u in g.nodes:
        w, b = within[u], between[u]
        if w + b == 0:
            zero_degree += 1
            continue
        ratio[u] = min(w / b, cap) if b else cap

    floor = min_level + 1 if strict else min_level
    level_lists: dict[int, list[float]] = {}
    unranked = 0
    for u, r in sorted(ratio.items()):
        if u not in ranks:
            unranked += 1
            continue
        level = ranks[u]
        if level >= floor:
            level_lists.setdefault(level, []).append(r)
    per_level = {
        level: LevelRatio(mean_ratio=sum(vals) / len(vals), count=len(vals))
        for level, vals in sorted(level_lists.items())
    }
    return CliqueRatioReport(
        within=within, between=between, ratio=ratio, per_level=per_level,
        level_ratios={lvl: tuple(vals) for lvl, vals in sorted(level_lists.items())},
        zero_degree_nodes=zero_degree, unranked_nodes=unranked, min_level=floor,
    )


def clique_jump_tests(report: CliqueRatioReport) -> dict[str, WelchResult | str]:
    """Welch tests of per-node ratios between consecutive rank levels."""
    out: dict[str, WelchResult | str] = {}
    levels = sorted(report.level_ratios)
    for a, b in zip(levels, levels[1:]):
        key = f"{a}->{b}"
        try:
            out[key] = welch_t_test(report.level_ratios[a], report.level_ratios[b])
        except DegenerateSample as exc:
            out[key] = f"degenerate: {exc}"
    return out


@dataclass(frozen=True)
class GenderGroupStats:
    count: int
    mean_degree: float | None
    degree_proportions: dict[int, float]
    rank_proportions: dict[int, float]
    high_rank_count: int
    mean_neighbor_rank: float | None
    neighbor_rank_n: int


@dataclass(frozen=True)
class GenderReport:
    groups: dict[str, GenderGroupStats]
    tests: dict[str, WelchResult | str]


def gender_report(g: PatronageGraph, ds: Dataset) -> GenderReport:
    """Degree, rank, and neighbor-rank statistics split by gender.

    Each male/female comparison carries a Welch t-test; degenerate
    comparisons (an empty or constant group) are reported as notes.
    """
    for u in g.nodes:
        if u not in ds.politicians:
            raise MissingGender(f"node {u} has no politician record")
    ranks = ds.final_ranks()
    report = degree_report(g, {u: ds.politicians[u].gender.value for u in g.nodes})

    samples: dict[str, dict[str, list[float]]] = {}
    groups: dict[str, GenderGroupStats] = {}
    for gender in (Gender.MALE, Gender.FEMALE):
        key = gender.value
        members = report.groups.get(key, ())
        degrees = [report.degrees[u] for u in members]
        ranked = [ranks[u] for u in members if u in ranks]
        rank_prop: dict[int, float] = {}
        for r in ranked:
            rank_prop[r] = rank_prop.get(r, 0) + 1
        rank_prop = {r: c / len(ranked) for r, c in sorted(rank_prop.items())} if ranked else {}
        nbr_ranks = []
        for u in members:
            if g.neighbors(u):
                try:
                    nbr_ranks.append(neighbor_rank(g, ranks, u))
                except Exception:
                    continue
        groups[key] = GenderGroupStats(
            count=len(members),
            mean_degree=(sum(degrees) / len(degrees)) if degrees else None,
            degree_proportions=report.proportions(key) if members else {},
            rank_proportions=rank_prop,
            high_rank_count=sum(1 for r in ranked if is_high_rank(r)),
            mean_neighbor_rank=(sum(nbr_ranks) / len(nbr_ranks)) if nbr_ranks else None,
            neighbor_rank_n=len(nbr_ranks),
        )
        samples[key] = {
            "degree": [float(d) for d in degrees],
            "rank": [float(r) for r in ranked],
            "neighbor_rank": nbr_ranks,
        }

    tests: dict[str, WelchResult | str] = {}
    for name in ("degree", "rank", "neighbor_rank"):
        try:
            tests[name] = welch_t_test(samples["M"][name], samples["F"][name])
        except DegenerateSample as exc:
            tests[name] = f"degenerate: {exc}"
    return GenderReport(groups=groups, tests=tests)


@dataclass(frozen=True)
class OriginTable:
    min_rank: int
    counts: tuple[tuple[str, int], ...]  # (province, count), descending

    def top(self, n: int = 10) -> tuple[tuple[str, int], ...]:
        return self.counts[:n]

    @property
    def total(self) -> int:
        return sum(c for _p, c in self.counts)


def origin_distribution(ds: Dataset, min_rank: int = 0) -> OriginTable:
    """Politicians at or above `min_rank` (final rank), counted per home province.

    Politicians without any job spell have no final rank and are not
    counted.  Every home province in the dataset appears, zeros included.
    """
    ranks = ds.final_ranks()
    counts: dict[str, int] = {}
    for pid, p in sorted(ds.politicians.items()):
        counts.setdefault(p.home_province, 0)
        if pid in ranks and ranks[pid] >= min_rank:
            counts[p.home_province] += 1
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return OriginTable(min_rank=min_rank, counts=tuple(ordered))


def paired_group_t_test(group_values_a, group_values_b) -> WelchResult:
    """Welch test between two aligned group-level value lists (e.g. counts vs GDP)."""
    return welch_t_test(group_values_a, group_values_b)


def degree_summary(g: PatronageGraph) -> dict[int, int]:
    """Total degree per node (helper for study exports)."""
    return {u: total_degree(g, u) for u in g.nodes}
