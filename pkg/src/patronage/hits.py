"""Hub/authority scoring and the score-versus-final-rank analysis.

The mutual-reinforcement iteration runs on unit adjacency (edge weights
are ignored): authority <- normalize(A^T hub), hub <- normalize(A
authority), from uniform starting vectors, stopping when the largest
per-node change falls below the tolerance.  Normalization is L2, which
makes the converged vectors principal eigenvectors of A^T A and A A^T.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import EmptyGraph, FewerThanThreeRanks, MissingRank
from .graphs import PatronageGraph
from .stats import LinearFit, linear_fit, significance_stars

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1000


@dataclass(frozen=True)
class HitsScores:
    node_order: tuple[int, ...]
    hub: np.ndarray
    authority: np.ndarray
    iterations_used: int
    converged: bool

    def hub_of(self, u: int) -> float:
        return float(self.hub[self.node_order.index(u)])

    def authority_of(self, u: int) -> float:
        return float(self.authority[self.node_order.index(u)])

    def as_mapping(self, which: str) -> dict[int, float]:
        vec = self.hub if which == "hub" else self.authority
        return {u: float(v) for u, v in zip(self.node_order, vec)}

    def write(self, path: str | Path) -> None:
        lines = ["id,hub,authority"]
        for u, h, a in zip(self.node_order, self.hub, self.authority):
            lines.append(f"{u},{h!r},{a!r}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def hits_scores(
    g: PatronageGraph,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> HitsScores:
    """Run the hub/authority iteration on a directed graph."""
    if not g.directed:
        raise ValueError("hub/authority scores need a directed graph")
    if g.n_nodes == 0:
        raise EmptyGraph("graph has no nodes")
    n = g.n_nodes
    index = {u: i for i, u in enumerate(g.nodes)}
    if g.n_edges == 0:
        zeros = np.zeros(n)
        return HitsScores(g.nodes, zeros, zeros.copy(), 0, True)
    src = np.array([index[u] for u, _v, _w in g.edges])
    dst = np.array([index[v] for _u, v, _w in g.edges])

    hub = np.full(n, 1.0 / np.sqrt(n))
    authority = np.full(n, 1.0 / np.sqrt(n))
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new_auth = np.zeros(n)
        np.add.at(new_auth, dst, hub[src])
        new_auth /= np.linalg.norm(new_auth)
        new_hub = np.zeros(n)
        np.add.at(new_hub, src, new_auth[dst])
        new_hub /= np.linalg.norm(new_hub)
        delta = max(np.max(np.abs(new_hub - hub)), np.max(np.abs(new_auth - authority)))
        hub, authority = new_hub, new_auth
        if delta < tol:
            converged = True
            break
    return HitsScores(g.nodes, hub, authority, iterations, converged)


@dataclass(frozen=True)
class RankScoreFit:
    pairs: tuple[tuple[int, float], ...]     # (final rank, score) per node
    rank_means: dict[int, float]
    fit: LinearFit


def score_vs_rank(scores: Mapping[int, float], final_ranks: Mapping[int, int]) -> RankScoreFit:
    """Per-rank mean scores and an OLS line of mean score on rank level."""
    pairs = []
    by_rank: dict[int, list[float]] = {}
    for u in sorted(scores):
        if u not in final_ranks:
            raise MissingRank(f"no final rank for scored node {u}")
        level = final_ranks[u]
        pairs.append((level, float(scores[u])))
        by_rank.setdefault(level, []).append(float(scores[u]))
    rank_means = {level: sum(vals) / len(vals) for level, vals in sorted(by_rank.items())}
    if len(rank_means) < 3:
        raise FewerThanThreeRanks(f"{len(rank_means)} distinct ranks; need >= 3 for a line")
    levels = np.array(sorted(rank_means))
    means = np.array([rank_means[level] for level in sorted(rank_means)])
    return RankScoreFit(pairs=tuple(pairs), rank_means=rank_means,
                        fit=linear_fit(levels, means))


def format_rank_fit_report(result: RankScoreFit, score_name: str) -> str:
    """Key-value block with estimates, standard errors, and significance stars."""
    fit = result.fit
    lines = [
        f"dependent_variable: mean {score_name} per final rank",
        f"observations: {len(result.rank_means)}",
        f"slope: {fit.slope!r} (se {fit.se_slope!r}) {significance_stars(fit.p_slope)}",
        f"slope_t: {fit.t_slope!r}  slope_p: {fit.p_slope!r}",
        f"intercept: {fit.intercept!r} (se {fit.se_intercept!r}) {significance_stars(fit.p_intercept)}",
        f"intercept_t: {fit.t_intercept!r}  intercept_p: {fit.p_intercept!r}",
        f"r_squared: {fit.r_squared!r}",
        "stars: . p<0.15  * p<0.05  ** p<0.005",
    ]
    return "\n".join(lines) + "\n"
