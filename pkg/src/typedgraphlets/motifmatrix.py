"""Motif-weighted adjacency, normalized Laplacian, and typed cut measures.

The motif matrix W counts, per graph edge, the induced occurrences of one
typed graphlet containing that edge. W induces a weighted graph whose
volumes coincide exactly with the typed-graphlet volumes, while weighted
cut weight only bounds the typed cut count (it counts how many times an
occurrence is severed, not whether). All counts here are exact integers;
only conductances are ratios, returned as Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateCutError, GraphletAbsentError, ZeroVolumeError
from .graph import HeteroGraph, WeightedGraph, _validate_cut
from .graphlets import (
    GraphletInstance,
    TypedGraphletSignature,
    _induced_edges,
    instances_matching,
)

BRUTE_FORCE_MAX_CUT_NODES = 20


@dataclass
class MotifMatrix:
    """W, its degree vector, and the occurrence list it was built from."""

    graph: HeteroGraph
    signature: TypedGraphletSignature
    weights: dict[tuple[int, int], int]
    degrees: np.ndarray
    instances: list[GraphletInstance]

    def induced_graph(self) -> WeightedGraph:
        return WeightedGraph(self.graph.node_count, self.weights)

    def covered_nodes(self) -> list[int]:
        return [v for v in range(self.graph.node_count) if self.degrees[v] > 0]

    def uncovered_nodes(self) -> list[int]:
        return [v for v in range(self.graph.node_count) if self.degrees[v] == 0]

    def dump(self) -> str:
        """Coordinate-triple dump: header ``n nnz`` then ``i j w`` lines."""
        lines = [f"{self.graph.node_count} {len(self.weights)}"]
        for (u, v), w in sorted(self.weights.items()):
            lines.append(f"{u} {v} {w}")
        return "\n".join(lines) + "\n"


@dataclass
class NormalizedLaplacian:
    """I - D^{-1/2} W D^{-1/2} restricted to positive-degree nodes.

    ``nodes[i]`` maps restricted row i back to the original node id.
    """

    matrix: sp.csr_matrix
    nodes: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_motif_matrix(g: HeteroGraph, sig: TypedGraphletSignature) -> MotifMatrix:
    instances = instances_matching(g, sig)
    weights: dict[tuple[int, int], int] = {}
    for inst in instances:
        for e in _induced_edges(g, inst.nodes):
            weights[e] = weights.get(e, 0) + 1
    degrees = np.zeros(g.node_count, dtype=np.int64)
    for (u, v), w in weights.items():
        degrees[u] += w
        degrees[v] += w
    return MotifMatrix(g, sig, weights, degrees, instances)


def typed_degree(mm: MotifMatrix, v: int) -> int:
    """Incident-edge count of ``v`` summed over occurrences.

    Computed from the occurrence stream, not from W, so volume identities
    against W stay a genuine cross-check.
    """
    total = 0
    for inst in mm.instances:
        if v in inst.nodes:
            for a, b in _induced_edges(mm.graph, inst.nodes):
                if v == a or v == b:
                    total += 1
    return total


def typed_volume(mm: MotifMatrix, s: Iterable[int]) -> int:
    side = set(s)
    return sum(typed_degree(mm, v) for v in side)


def _instance_cut(instances: Sequence[GraphletInstance], side: frozenset) -> int:
    count = 0
    for inst in instances:
        inside = sum(1 for v in inst.nodes if v in side)
        if 0 < inside < len(inst.nodes):
            count += 1
    return count


def typed_cut(g: HeteroGraph, sig: TypedGraphletSignature, s: Iterable[int]) -> int:
    """Number of occurrences with nodes on both sides of the cut."""
    side = _validate_cut(g.node_count, s)
    return _instance_cut(instances_matching(g, sig), side)


def typed_conductance(
    g: HeteroGraph, sig: TypedGraphletSignature, s: Iterable[int]
) -> Fraction:
    """Typed cut count over the smaller side's typed volume, exact.

    A side whose typed volume is zero (no occurrence touches it) makes the
    measure undefined and raises ZeroVolumeError.
    """
    side = _validate_cut(g.node_count, s)
    mm = build_motif_matrix(g, sig)
    vol_s = int(mm.degrees[sorted(side)].sum())
    vol_rest = int(mm.degrees.sum()) - vol_s
    denom = min(vol_s, vol_rest)
    if denom == 0:
        raise ZeroVolumeError("one side of the cut has zero typed-graphlet volume")
    return Fraction(_instance_cut(mm.instances, side), denom)


def edge_expansion_measure(
    g: HeteroGraph, sig: TypedGraphletSignature, s: Iterable[int]
) -> Fraction:
    """Contrast measure: typed cut over node-membership cluster size.

    Cluster size counts, over all occurrences, how many of their nodes fall
    in the side; degrees play no role. Kept for comparison only, the sweep
    never optimises it.
    """
    side = _validate_cut(g.node_count, s)
    instances = instances_matching(g, sig)
    size_s = 0
    size_rest = 0
    for inst in instances:
        for v in inst.nodes:
            if v in side:
                size_s += 1
            else:
                size_rest += 1
    denom = min(size_s, size_rest)
    if denom == 0:
        raise ZeroVolumeError("one side of the cut touches no occurrence")
    return Fraction(_instance_cut(instances, side), denom)


def brute_force_min_conductance(
    g: HeteroGraph, sig: TypedGraphletSignature, max_nodes: int = BRUTE_FORCE_MAX_CUT_NODES
) -> tuple[frozenset, Fraction]:
    """Exact minimum typed-graphlet conductance over all cuts.

    Exhausts 2^(n-1) bipartitions, skipping cuts where a side has zero typed
    volume (nodes outside every occurrence make such cuts degenerate, and
    the minimum is taken over well-defined cuts only). Ties break toward the
    smaller side, then lexicographic membership. Guarded to 20 nodes.
    """
    n = g.node_count
    if n > max_nodes:
        raise ValueError(f"brute force limited to {max_nodes} nodes, got {n}")
    if n < 2:
        raise DegenerateCutError("graph too small to cut")
    mm = build_motif_matrix(g, sig)
    if not mm.instances:
        raise GraphletAbsentError("typed graphlet has no instance in the graph")
    masks = np.array(
        [sum(1 << v for v in inst.nodes) for inst in mm.instances], dtype=np.uint64
    )
    deg = mm.degrees
    total = int(deg.sum())
    full = np.uint64((1 << n) - 1)

    best: tuple[int, int, tuple[int, tuple[int, ...]]] | None = None
    best_side: frozenset | None = None
    for bits in range(1, 1 << (n - 1)):
        vol = 0
        members = []
        b = bits
        while b:
            v = (b & -b).bit_length() - 1
            vol += int(deg[v])
            members.append(v)
            b &= b - 1
        minvol = min(vol, total - vol)
        if minvol == 0:
            continue
        sb = np.uint64(bits)
        crossing = ((masks & sb) != 0) & ((masks & ~sb & full) != 0)
        cut = int(np.count_nonzero(crossing))
        side = frozenset(members)
        other = frozenset(range(n)) - side
        canon_s = (len(side), tuple(sorted(side)))
        canon_o = (len(other), tuple(sorted(other)))
        canon = min(canon_s, canon_o)
        key = (cut, minvol, canon)
        if best is None or _ratio_less(key, best):
            best = key
            best_side = side if canon == canon_s else other
    if best is None:
        raise ZeroVolumeError("every cut has a zero typed-volume side")
    cut, minvol, _ = best
    return best_side, Fraction(cut, minvol)


def _ratio_less(a: tuple, b: tuple) -> bool:
    left = a[0] * b[1]
    right = b[0] * a[1]
    if left != right:
        return left < right
    return a[2] < b[2]


def build_normalized_laplacian(
    wg: WeightedGraph, nodes: Sequence[int] | None = None
) -> NormalizedLaplacian:
    """Normalized Laplacian of ``wg`` restricted to ``nodes`` (default: all).

    Rows with zero degree inside the restriction are excluded; D^{-1/2} is
    undefined there.
    """
    if nodes is None:
        nodes = range(wg.node_count)
    keep = sorted(set(nodes))
    keep_set = set(keep)
    deg = {v: 0.0 for v in keep}
    entries = []
    for (u, v), w in wg.weights.items():
        if u in keep_set and v in keep_set:
            deg[u] += w
            deg[v] += w
            entries.append((u, v, w))
    kept = [v for v in keep if deg[v] > 0]
    if not kept:
        raise GraphletAbsentError("graphlet absent from graph: empty matrix support")
    index = {v: i for i, v in enumerate(kept)}
    inv_sqrt = {v: 1.0 / np.sqrt(deg[v]) for v in kept}
    dim = len(kept)
    rows = list(range(dim))
    cols = list(range(dim))
    data = [1.0] * dim
    for u, v, w in entries:
        val = -w * inv_sqrt[u] * inv_sqrt[v]
        rows.extend((index[u], index[v]))
        cols.extend((index[v], index[u]))
        data.extend((val, val))
    mat = sp.csr_matrix((data, (rows, cols)), shape=(dim, dim))
    return NormalizedLaplacian(mat, np.array(kept, dtype=np.int64))


def normalized_laplacian(mm: MotifMatrix) -> NormalizedLaplacian:
    """Laplacian of the motif-induced weighted graph on covered nodes."""
    if not mm.instances:
        raise GraphletAbsentError("graphlet absent from graph")
    return build_normalized_laplacian(mm.induced_graph())
