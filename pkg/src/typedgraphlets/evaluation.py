"""Experiment harness: cluster scoring, link prediction, compression proxy.

Everything here is seeded and deterministic: the same (graph, signature,
dimension, seed, operator) tuple always reproduces the same report.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import ZeroVolumeError
from .graph import HeteroGraph, _validate_cut, permute_graph
from .graphlets import TypedGraphletSignature
from .spectral import spectral_embedding

EDGE_OPERATORS = ("mean", "hadamard", "absdiff", "sqdiff", "max", "sum")

# Cap on exhaustive non-edge enumeration; beyond it sampling falls back to
# seeded rejection with a retry budget.
_ENUMERATE_PAIR_LIMIT = 2_000_000


def external_conductance(g: HeteroGraph, s: Iterable[int]) -> Fraction:
    """Plain edge conductance of a cluster in the original graph.

    This is the clustering quality score: it ignores motifs and types
    entirely and measures how well the cluster separates in raw edges.
    """
    side = _validate_cut(g.node_count, s)
    cut = sum(1 for u, v in g.edges if (u in side) != (v in side))
    vol_s = int(g.degrees[sorted(side)].sum())
    vol_rest = int(g.degrees.sum()) - vol_s
    denom = min(vol_s, vol_rest)
    if denom == 0:
        raise ZeroVolumeError("one side of the cut has zero volume")
    return Fraction(cut, denom)


@dataclass
class EdgeDataset:
    """Held-out edge split for link prediction."""

    train: HeteroGraph
    positives: list[tuple[int, int]]
    negatives: list[tuple[int, int]]
    seed: int
    edge_type: int | None


def _type_patterns(g: HeteroGraph, edge_indices: Sequence[int]) -> set[tuple[int, int]]:
    pats = set()
    for i in edge_indices:
        u, v = g.edges[i]
        tu, tv = g.node_types[u], g.node_types[v]
        pats.add((tu, tv) if tu <= tv else (tv, tu))
    return pats


def _sample_nonedges(
    g: HeteroGraph,
    patterns: set[tuple[int, int]],
    count: int,
    rng: random.Random,
    exclude: set[tuple[int, int]],
) -> list[tuple[int, int]]:
    """Seeded sample of non-edges whose endpoint types match a pattern."""
    n = g.node_count
    edge_set = set(g.edges)
    if n * (n - 1) // 2 <= _ENUMERATE_PAIR_LIMIT:
        cands = []
        for u, v in combinations(range(n), 2):
            if (u, v) in edge_set or (u, v) in exclude:
                continue
            tu, tv = g.node_types[u], g.node_types[v]
            key = (tu, tv) if tu <= tv else (tv, tu)
            if key in patterns:
                cands.append((u, v))
        if len(cands) < count:
            raise ValueError(
                f"not enough type-compatible non-edges: need {count}, found {len(cands)}"
            )
        return rng.sample(cands, count)
    picked: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    budget = 200 * count + 10_000
    while len(picked) < count and budget > 0:
        budget -= 1
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        pair = (u, v) if u < v else (v, u)
        if pair in edge_set or pair in exclude or pair in seen:
            continue
        tu, tv = g.node_types[pair[0]], g.node_types[pair[1]]
        key = (tu, tv) if tu <= tv else (tv, tu)
        if key not in patterns:
            continue
        seen.add(pair)
        picked.append(pair)
    if len(picked) < count:
        raise ValueError("not enough type-compatible non-edges within sampling budget")
    return picked


def split_edges(
    g: HeteroGraph,
    fraction: float,
    seed: int,
    edge_type: int | None = None,
) -> EdgeDataset:
    """Remove a seeded uniform fraction of (optionally one type of) edges.

    Removed edges become the positive test pairs; an equal number of
    non-edges whose endpoint-type pattern matches the predicted edge type
    become the negatives. Uniform node pairs would make the task trivially
    easy on typed graphs, hence the pattern restriction. The remaining graph
    is returned for embedding.
    """
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie strictly between 0 and 1")
    rng = random.Random(seed)
    eligible = [
        i for i in range(g.edge_count) if edge_type is None or g.edge_types[i] == edge_type
    ]
    if not eligible:
        raise ValueError("edge type filter matches no edges")
    k = math.ceil(fraction * len(eligible))
    removed = sorted(rng.sample(eligible, k))
    removed_set = set(removed)
    positives = [g.edges[i] for i in removed]
    keep_edges = [g.edges[i] for i in range(g.edge_count) if i not in removed_set]
    keep_types = [g.edge_types[i] for i in range(g.edge_count) if i not in removed_set]
    train = HeteroGraph(
        g.node_names,
        g.node_types,
        keep_edges,
        keep_types,
        g.node_type_names,
        g.edge_type_names,
    )
    patterns = _type_patterns(g, eligible)
    negatives = _sample_nonedges(g, patterns, len(positives), rng, exclude=set())
    return EdgeDataset(train, positives, negatives, seed, edge_type)


def edge_embed(zi: np.ndarray, zj: np.ndarray, op: str) -> np.ndarray:
    """Combine two node embeddings into one edge embedding, element-wise.

    All six operators are symmetric in their arguments, so undirected edges
    get a well-defined feature vector.
    """
    zi = np.asarray(zi, dtype=np.float64)
    zj = np.asarray(zj, dtype=np.float64)
    if zi.shape != zj.shape:
        raise ValueError("embedding dimensions differ")
    if op == "mean":
        return (zi + zj) / 2.0
    if op == "hadamard":
        return zi * zj
    if op == "absdiff":
        return np.abs(zi - zj)
    if op == "sqdiff":
        return (zi - zj) ** 2
    if op == "max":
        return np.maximum(zi, zj)
    if op == "sum":
        return zi + zj
    raise ValueError(f"unknown edge operator '{op}'")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -35.0, 35.0)))


def _logistic_loss(Xb: np.ndarray, y: np.ndarray, w: np.ndarray, l2: float) -> float:
    p = _sigmoid(Xb @ w)
    eps = 1e-12
    data = -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
    return float(data + 0.5 * l2 * np.dot(w[:-1], w[:-1]))


def train_linear_classifier(
    X: np.ndarray,
    y: np.ndarray,
    l2: float = 1e-4,
    iters: int = 500,
    seed: int = 0,
    step: float = 0.1,
) -> np.ndarray:
    """Full-batch gradient-descent logistic regression with L2 penalty.

    The step halves whenever a move would increase the loss, so training
    loss is monotone non-increasing. The intercept sits in the last weight
    slot and is not penalised. Returns the weight vector of length d+1.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X and y shapes are inconsistent")
    if len(np.unique(y)) < 2:
        raise ValueError("training labels contain a single class")
    n, d = X.shape
    Xb = np.hstack([X, np.ones((n, 1))])
    rng = np.random.default_rng(seed)
    w = 0.01 * rng.standard_normal(d + 1)
    loss = _logistic_loss(Xb, y, w, l2)
    for _ in range(iters):
        p = _sigmoid(Xb @ w)
        grad = Xb.T @ (p - y) / n
        grad[:-1] += l2 * w[:-1]
        cand = w - step * grad
        cand_loss = _logistic_loss(Xb, y, cand, l2)
        while cand_loss > loss and step > 1e-12:
            step *= 0.5
            cand = w - step * grad
            cand_loss = _logistic_loss(Xb, y, cand, l2)
        if cand_loss <= loss:
            w = cand
            loss = cand_loss
    return w


def predict_scores(X: np.ndarray, w: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return _sigmoid(X @ w[:-1] + w[-1])


@dataclass
class MetricsReport:
    f1: float
    precision: float
    recall: float
    auc: float | None
    threshold: float


def compute_metrics(
    scores: Sequence[float], labels: Sequence[int], threshold: float = 0.5
) -> MetricsReport:
    """Threshold metrics plus rank AUC (ties counted half).

    With a single label class AUC is undefined and comes back as None while
    the threshold metrics are still produced.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if len(s) != len(y):
        raise ValueError("scores and labels lengths differ")
    pred = s >= threshold
    tp = int(np.sum(pred & (y == 1)))
    fp = int(np.sum(pred & (y == 0)))
    fn = int(np.sum(~pred & (y == 1)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        auc = None
    else:
        ranks = _average_ranks(s)
        auc = float((ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))
    return MetricsReport(f1, precision, recall, auc, threshold)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


@dataclass
class LinkPredResult:
    """Per-operator test metrics for one seeded run."""

    per_operator: dict[str, MetricsReport]
    best_operator: str
    seed: int
    dim: int
    n_train_examples: int
    n_test_examples: int


def link_prediction_eval(
    g: HeteroGraph,
    sig: TypedGraphletSignature,
    dim: int,
    fraction: float = 0.5,
    seed: int = 0,
    edge_type: int | None = None,
    operators: Sequence[str] = EDGE_OPERATORS,
    drop_trivial: bool = False,
    l2: float = 1e-4,
    iters: int = 500,
) -> LinkPredResult:
    """End-to-end seeded link-prediction run for one motif signature.

    Embeds the post-split train graph, fits the logistic model on train
    edges against freshly sampled type-compatible non-edges, and scores the
    held-out positives and negatives under every requested operator. The
    best operator is picked by AUC (F1 breaks ties).
    """
    ds = split_edges(g, fraction, seed, edge_type)
    Z = spectral_embedding(ds.train, sig, dim, drop_trivial=drop_trivial)

    train_idx = [
        i
        for i in range(ds.train.edge_count)
        if edge_type is None or ds.train.edge_types[i] == edge_type
    ]
    train_pos = [ds.train.edges[i] for i in train_idx]
    patterns = _type_patterns(ds.train, train_idx)
    rng = random.Random(seed + 10_000_019)
    train_neg = _sample_nonedges(
        g, patterns, len(train_pos), rng, exclude=set(ds.negatives)
    )

    train_pairs = train_pos + train_neg
    y_train = np.array([1] * len(train_pos) + [0] * len(train_neg), dtype=np.int64)
    test_pairs = ds.positives + ds.negatives
    y_test = np.array([1] * len(ds.positives) + [0] * len(ds.negatives), dtype=np.int64)

    reports: dict[str, MetricsReport] = {}
    for op in operators:
        X_train = np.array([edge_embed(Z[u], Z[v], op) for u, v in train_pairs])
        X_test = np.array([edge_embed(Z[u], Z[v], op) for u, v in test_pairs])
        w = train_linear_classifier(X_train, y_train, l2=l2, iters=iters, seed=seed)
        reports[op] = compute_metrics(predict_scores(X_test, w), y_test)
    best = max(
        operators,
        key=lambda op: (
            -1.0 if reports[op].auc is None else reports[op].auc,
            reports[op].f1,
        ),
    )
    return LinkPredResult(
        per_operator=reports,
        best_operator=best,
        seed=seed,
        dim=dim,
        n_train_examples=len(train_pairs),
        n_test_examples=len(test_pairs),
    )


def summarize_trials(results: Sequence[LinkPredResult]) -> dict[str, dict[str, float]]:
    """Mean and standard deviation of each metric over seeded trials."""
    out: dict[str, dict[str, float]] = {}
    for op in results[0].per_operator:
        stats: dict[str, float] = {}
        for metric in ("f1", "precision", "recall", "auc"):
            vals = [getattr(r.per_operator[op], metric) for r in results]
            vals = [v for v in vals if v is not None]
            if not vals:
                continue
            arr = np.array(vals, dtype=np.float64)
            stats[f"{metric}_mean"] = float(arr.mean())
            stats[f"{metric}_std"] = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
        out[op] = stats
    return out


def _varint_size(value: int) -> int:
    size = 1
    while value >= 128:
        value >>= 7
        size += 1
    return size


def compressed_size_estimate(g: HeteroGraph, order: Sequence[int]) -> int:
    """Byte size of the gap-encoded adjacency lists under an ordering.

    Codec, fixed byte-exactly: relabel nodes by ``order``, sort each
    adjacency list ascending, write a varint list length per node, then the
    first neighbour as a zig-zag gap from the node's own id (2x for positive
    x, 2|x|+1 for negative) and every following neighbour as the plain gap
    from its predecessor, each as a 7-bit-per-byte varint. An empty list
    still costs its one-byte length marker.
    """
    h = permute_graph(g, order)
    total = 0
    for v in range(h.node_count):
        nbrs = sorted(h.adjacency[v])
        total += _varint_size(len(nbrs))
        if not nbrs:
            continue
        first = nbrs[0] - v
        zig = 2 * first if first > 0 else 2 * (-first) + 1
        total += _varint_size(zig)
        for prev, cur in zip(nbrs, nbrs[1:]):
            total += _varint_size(cur - prev)
    return total


def planted_partition(
    block_sizes: Sequence[int],
    p_in: float,
    p_out: float,
    type_count: int = 2,
    seed: int = 0,
    types_follow_blocks: bool = False,
    shuffle: bool = False,
) -> tuple[HeteroGraph, np.ndarray]:
    """Seeded planted-partition graph with typed nodes.

    Node types are drawn uniformly unless ``types_follow_blocks`` ties each
    type to its block. ``shuffle`` relabels node ids by a seeded permutation
    so the native order carries no block information. Returns the graph and
    the per-node block labels.
    """
    rng = random.Random(seed)
    n = sum(block_sizes)
    blocks = np.repeat(np.arange(len(block_sizes)), block_sizes)
    if types_follow_blocks:
        type_count = len(block_sizes)
        types = [int(b) for b in blocks]
    else:
        types = [rng.randrange(type_count) for _ in range(n)]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            p = p_in if blocks[i] == blocks[j] else p_out
            if rng.random() < p:
                edges.append((i, j))
    g = HeteroGraph(
        [f"n{i}" for i in range(n)],
        types,
        edges,
        [0] * len(edges),
        [f"t{t}" for t in range(type_count)],
        ["link"],
    )
    if shuffle:
        perm = list(range(n))
        rng.shuffle(perm)
        g = permute_graph(g, perm)
        blocks = blocks[perm]
    return g, blocks
