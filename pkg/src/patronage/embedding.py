"""Biased random walks and skip-gram embeddings for the down-graded network.

Walks follow second-order transition weights keyed by the graph distance
between the previous node and each candidate: weight 1 for stepping back,
1 for staying at distance one, 2 for moving to distance two (the defaults;
all three are configurable).  A seeded fraction of nodes is sampled first
and walks run on the induced subgraph.

Training is skip-gram with negative sampling over node-context pairs
within a window, negatives drawn from the unigram^(3/4) table, and a
linearly decayed learning rate.  Single-worker mode is deterministic given
the seed; multi-worker mode updates shared weight matrices without locks
and is therefore fast but not reproducible.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from random import Random

import numpy as np

from .dataset import Dataset
from .errors import ConfigError, EmptyCorpus, MissingProvince, NotAdjacent, UnknownNode
from .graphs import PatronageGraph

BATCH_SIZE = 512
MIN_LR_FRACTION = 1e-4


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 80
    return_weight: float = 1.0
    same_distance_weight: float = 1.0
    explore_weight: float = 2.0
    seed: int = 0
    node_sample_fraction: float = 0.1

    def validate(self) -> None:
        if self.walks_per_node <= 0 or self.walk_length <= 0:
            raise ConfigError("walks_per_node and walk_length must be positive")
        if min(self.return_weight, self.same_distance_weight, self.explore_weight) <= 0:
            raise ConfigError("transition weights must be positive")
        if not 0.0 < self.node_sample_fraction <= 1.0:
            raise ConfigError(
                f"node_sample_fraction must lie in (0,1], got {self.node_sample_fraction}"
            )


@dataclass(frozen=True)
class EmbedConfig:
    dimensions: int = 128
    window: int = 10
    negatives_per_positive: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    seed: int = 0

    def validate(self) -> None:
        if min(self.dimensions, self.window, self.negatives_per_positive) <= 0:
            raise ConfigError("dimensions, window, and negatives must be positive")
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")


def transition_weights(g: PatronageGraph, prev: int, cur: int,
                       alphas: tuple[float, float, float] = (1.0, 1.0, 2.0)) -> dict[int, float]:
    """Unnormalized next-step weights out of `cur` after arriving from `prev`."""
    if not g.has_node(prev) or not g.has_node(cur):
        raise UnknownNode(f"{prev} or {cur} not in graph")
    if not g.adjacent(prev, cur):
        raise NotAdjacent(f"no edge between {prev} and {cur}")
    prev_nbrs = set(g.neighbors(prev))
    weights = {}
    for x in g.neighbors(cur):
        if x == prev:
            weights[x] = alphas[0]
        elif x in prev_nbrs:
            weights[x] = alphas[1]
        else:
            weights[x] = alphas[2]
    return weights


def sample_nodes(g: PatronageGraph, fraction: float, seed: int) -> tuple[int, ...]:
    count = max(1, round(fraction * g.n_nodes))
    rng = Random(f"{seed}/sample")
    return tuple(sorted(rng.sample(list(g.nodes), count)))


def _walk(nbrs: dict[int, tuple[int, ...]], nbr_sets: dict[int, frozenset],
          start: int, steps: int, alphas, rng: Random) -> list[int]:
    walk = [start]
    for _ in range(steps):
        cur = walk[-1]
        candidates = nbrs[cur]
        if not candidates:
            break
        if len(walk) == 1:
            walk.append(candidates[rng.randrange(len(candidates))])
            continue
        prev = walk[-2]
        prev_set = nbr_sets[prev]
        weights = []
        total = 0.0
        for x in candidates:
            if x == prev:
                w = alphas[0]
            elif x in prev_set:
                w = alphas[1]
            else:
                w = alphas[2]
            total += w
            weights.append(total)
        r = rng.random() * total
        for x, cum in zip(candidates, weights):
            if r < cum:
                walk.append(x)
                break
        else:
            walk.append(candidates[-1])
    return walk


def random_walks(g: PatronageGraph, wc: WalkConfig, threads: int = 1) -> list[list[int]]:
    """`walks_per_node` biased walks of `walk_length` steps from every sampled node."""
    wc.validate()
    if g.n_nodes == 0:
        raise EmptyCorpus("graph has no nodes")
    sampled = sample_nodes(g, wc.node_sample_fraction, wc.seed)
    keep = set(sampled)
    nbrs = {u: tuple(v for v in g.neighbors(u) if v in keep) for u in sampled}
    nbr_sets = {u: frozenset(vs) for u, vs in nbrs.items()}
    alphas = (wc.return_weight, wc.same_distance_weight, wc.explore_weight)

    tasks = [(node, i) for node in sampled for i in range(wc.walks_per_node)]

    def run(task):
        node, i = task
        rng = Random(f"{wc.seed}/walk/{node}/{i}")
        return _walk(nbrs, nbr_sets, node, wc.walk_length, alphas, rng)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, tasks))
    return [run(task) for task in tasks]


@dataclass(frozen=True)
class Embedding:
    node_order: tuple[int, ...]
    vectors: np.ndarray
    epoch_losses: tuple[float, ...] = ()

    def vector(self, u: int) -> np.ndarray:
        try:
            row = self.node_order.index(u)
        except ValueError:
            raise UnknownNode(f"node {u} not embedded") from None
        return self.vectors[row]

    def write(self, path: str | Path) -> None:
        dim = self.vectors.shape[1]
        lines = ["id," + ",".join(f"v{i}" for i in range(dim))]
        for u, row in zip(self.node_order, self.vectors):
            lines.append(f"{u}," + ",".join(repr(x) for x in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_walks(walks: list[list[int]], path: str | Path) -> None:
    lines = [" ".join(str(u) for u in walk) for walk in walks]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def train_skipgram(walks: list[list[int]], ec: EmbedConfig, workers: int = 1) -> Embedding:
    """Skip-gram with negative sampling over the walk corpus."""
    ec.validate()
    tokens = [u for walk in walks for u in walk]
    if not tokens:
        raise EmptyCorpus("no walks to train on")
    vocab = tuple(sorted(set(tokens)))
    index = {u: i for i, u in enumerate(vocab)}
    n_vocab = len(vocab)

    centers = []
    contexts = []
    for walk in walks:
        idx_walk = [index[u] for u in walk]
        for i, center in enumerate(idx_walk):
            lo = max(0, i - ec.window)
            hi = min(len(idx_walk), i + ec.window + 1)
            for j in range(lo, hi):
                if j != i:
                    centers.append(center)
                    contexts.append(idx_walk[j])
    rng = np.random.Generator(np.random.PCG64(ec.seed))
    w_in = (rng.random((n_vocab, ec.dimensions)) - 0.5) / ec.dimensions
    w_out = np.zeros((n_vocab, ec.dimensions))

    if not centers or ec.epochs == 0:
        return Embedding(node_order=vocab, vectors=w_in, epoch_losses=())

    centers = np.array(centers, dtype=np.int64)
    contexts = np.array(contexts, dtype=np.int64)
    counts = np.bincount(np.array([index[u] for u in tokens]), minlength=n_vocab)
    noise = counts.astype(np.float64) ** 0.75
    noise_cum = np.cumsum(noise / noise.sum())

    n_pairs = len(centers)
    total = n_pairs * ec.epochs
    batches = [(s, min(s + BATCH_SIZE, n_pairs)) for s in range(0, n_pairs, BATCH_SIZE)]

    def train_batch(lo: int, hi: int, lr: float, neg_uniform: np.ndarray) -> float:
        c_idx = centers[lo:hi]
        o_idx = contexts[lo:hi]
        negs = np.searchsorted(noise_cum, neg_uniform)
        c = w_in[c_idx]
        pos = w_out[o_idx]
        neg = w_out[negs]
        pos_sig = _sigmoid(np.einsum("bd,bd->b", c, pos))
        neg_sig = _sigmoid(np.einsum("bd,bkd->bk", c, neg))
        live = negs != o_idx[:, None]  # skip negatives colliding with the target
        g_pos = pos_sig - 1.0
        g_neg = np.where(live, neg_sig, 0.0)
        grad_c = g_pos[:, None] * pos + np.einsum("bk,bkd->bd", g_neg, neg)
        np.add.at(w_in, c_idx, -lr * grad_c)
        np.add.at(w_out, o_idx, -lr * g_pos[:, None] * c)
        np.add.at(w_out, negs.ravel(),
                  (-lr * g_neg[:, :, None] * c[:, None, :]).reshape(-1, ec.dimensions))
        loss = -np.log(np.maximum(pos_sig, 1e-12)).sum()
        loss += -np.log(np.maximum(np.where(live, 1.0 - neg_sig, 1.0), 1e-12)).sum()
        return float(loss)

    epoch_losses = []
    processed = 0
    for _epoch in range(ec.epochs):
        uniforms = rng.random((n_pairs, ec.negatives_per_positive))
        jobs = []
        for lo, hi in batches:
            lr = ec.learning_rate * max(1.0 - processed / total, MIN_LR_FRACTION)
            jobs.append((lo, hi, lr, uniforms[lo:hi]))
            processed += hi - lo
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                losses = list(pool.map(lambda j: train_batch(*j), jobs))
        else:
            losses = [train_batch(*j) for j in jobs]
        epoch_losses.append(sum(losses) / n_pairs)
    return Embedding(node_order=vocab, vectors=w_in, epoch_losses=tuple(epoch_losses))


@dataclass(frozen=True)
class ProvinceSimilarity:
    province: str
    n_members: int
    in_set_avg: float | None
    out_set_avg: float | None


def province_similarity(emb: Embedding, ds: Dataset) -> dict[str, ProvinceSimilarity]:
    """Average embedded dot products for same-province vs other-province pairs.

    Scores are collected per node against every other embedded node and
    averaged flat per province; empty score lists report as None.
    """
    provinces = []
    for u in emb.node_order:
        pol = ds.politicians.get(u)
        if pol is None:
            raise MissingProvince(f"embedded node {u} has no politician record")
        provinces.append(pol.home_province)
    provinces = np.array(provinces)
    sims = emb.vectors @ emb.vectors.T
    n = len(emb.node_order)
    out: dict[str, ProvinceSimilarity] = {}
    for prov in sorted(set(provinces)):
        members = np.where(provinces == prov)[0]
        others = np.where(provinces != prov)[0]
        k = len(members)
        if k >= 2:
            block = sims[np.ix_(members, members)]
            in_avg = float((block.sum() - np.trace(block)) / (k * (k - 1)))
        else:
            in_avg = None
        if len(others) and k:
            out_avg = float(sims[np.ix_(members, others)].mean())
        else:
            out_avg = None
        out[prov] = ProvinceSimilarity(province=prov, n_members=k,
                                       in_set_avg=in_avg, out_set_avg=out_avg)
    return out
