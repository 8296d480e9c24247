"""Heterogeneous graph model, typed edge-list I/O, and weighted-graph primitives."""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateCutError, EdgeListFormatError, ZeroVolumeError

# Label used when the input carries no edge-type column.
DEFAULT_EDGE_TYPE = "-"


class HeteroGraph:
    """Undirected simple graph whose nodes and edges each carry one type.

    Nodes are dense integers ``0..node_count-1``. External string ids from
    input files are kept in ``node_names`` so output can be written back in
    the caller's vocabulary. Type labels are interned into
    ``node_type_names`` / ``edge_type_names`` and referenced by integer id.
    Instances are immutable after construction and safe to share across
    workers.
    """

    def __init__(
        self,
        node_names: Sequence[str],
        node_types: Sequence[int],
        edges: Sequence[tuple[int, int]],
        edge_types: Sequence[int],
        node_type_names: Sequence[str],
        edge_type_names: Sequence[str],
        collapsed_duplicates: int = 0,
    ):
        self.node_names = tuple(node_names)
        self.node_types = tuple(node_types)
        self.node_type_names = tuple(node_type_names)
        self.edge_type_names = tuple(edge_type_names)
        self.collapsed_duplicates = collapsed_duplicates

        n = len(self.node_names)
        if len(self.node_types) != n:
            raise ValueError("node_types length does not match node_names")
        if len(set(self.node_names)) != n:
            raise ValueError("duplicate external node ids")
        if len(edges) != len(edge_types):
            raise ValueError("edge_types length does not match edges")
        for t in self.node_types:
            if not 0 <= t < len(self.node_type_names):
                raise ValueError(f"node type id {t} out of range")
        for t in edge_types:
            if not 0 <= t < len(self.edge_type_names):
                raise ValueError(f"edge type id {t} out of range")

        norm_edges = []
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references unknown node")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate undirected edge {key}")
            seen.add(key)
            norm_edges.append(key)
        self.edges = tuple(norm_edges)
        self.edge_types = tuple(edge_types)

    @property
    def node_count(self) -> int:
        return len(self.node_names)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def node_type_count(self) -> int:
        return len(self.node_type_names)

    @property
    def edge_type_count(self) -> int:
        return len(self.edge_type_names)

    @cached_property
    def adjacency(self) -> tuple[frozenset, ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.node_count)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.node_count, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def edge_type_of(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        return self.edge_types[self.edge_index[key]]

    def node_type_id(self, label: str) -> int:
        try:
            return self.node_type_names.index(label)
        except ValueError:
            raise KeyError(label) from None

    def subgraph(self, nodes: Iterable[int]) -> tuple["HeteroGraph", list[int]]:
        """Induced subgraph on ``nodes``; returns (graph, new-to-old id map).

        Type tables are carried over unchanged so type ids stay comparable
        with the parent graph.
        """
        keep = sorted(set(nodes))
        old_to_new = {old: new for new, old in enumerate(keep)}
        edges = []
        etypes = []
        for (u, v), t in zip(self.edges, self.edge_types):
            if u in old_to_new and v in old_to_new:
                edges.append((old_to_new[u], old_to_new[v]))
                etypes.append(t)
        sub = HeteroGraph(
            [self.node_names[i] for i in keep],
            [self.node_types[i] for i in keep],
            edges,
            etypes,
            self.node_type_names,
            self.edge_type_names,
        )
        return sub, keep

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"HeteroGraph(n={self.node_count}, m={self.edge_count}, "
            f"node_types={self.node_type_count}, edge_types={self.edge_type_count})"
        )


class WeightedGraph:
    """Symmetric nonnegative edge weights over dense integer nodes.

    Zero-weight pairs are dropped from the support; negative weights are
    rejected. Weighted degrees are kept as exact integers whenever every
    weight is integral.
    """

    def __init__(self, node_count: int, weights: Mapping[tuple[int, int], float]):
        self.node_count = node_count
        norm: dict[tuple[int, int], float] = {}
        for (u, v), w in weights.items():
            if u == v:
                raise ValueError("weighted graph has zero diagonal; no self-loops")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"weight key ({u}, {v}) out of range")
            if w < 0:
                raise ValueError(f"negative weight at ({u}, {v})")
            if w == 0:
                continue
            key = (u, v) if u < v else (v, u)
            if key in norm and norm[key] != w:
                raise ValueError(f"conflicting weights for {key}")
            norm[key] = w
        self.weights = norm
        integral = all(float(w).is_integer() for w in norm.values())
        dtype = np.int64 if integral else np.float64
        deg = np.zeros(node_count, dtype=dtype)
        for (u, v), w in norm.items():
            deg[u] += w
            deg[v] += w
        self.degrees = deg

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        nbrs: list[list[tuple[int, float]]] = [[] for _ in range(self.node_count)]
        for (u, v), w in self.weights.items():
            nbrs[u].append((v, w))
            nbrs[v].append((u, w))
        return tuple(tuple(sorted(lst)) for lst in nbrs)

    @property
    def total_volume(self):
        return self.degrees.sum()

    def __repr__(self) -> str:  # pragma: no cover
        return f"WeightedGraph(n={self.node_count}, nnz={len(self.weights)})"


def load_typed_edge_list(text: str) -> HeteroGraph:
    """Parse a typed edge-list document into a HeteroGraph.

    One record per line: ``src dst src_type dst_type [edge_type]``. Lines
    starting with ``#`` are comments; ``%node <id> <type>`` declares a node
    without requiring an incident edge (used for isolated nodes). Node ids
    and type labels are interned densely in first-appearance order. The two
    directions of an undirected edge collapse into one (counted in
    ``collapsed_duplicates``); collapsed duplicates that disagree on edge
    type are an error, as are self-loops and extra columns (edge weights are
    not accepted).
    """
    node_ids: dict[str, int] = {}
    node_types: list[int] = []
    node_type_ids: dict[str, int] = {}
    edge_type_ids: dict[str, int] = {}
    edge_map: dict[tuple[int, int], int] = {}
    collapsed = 0

    def intern_node_type(label: str) -> int:
        if label not in node_type_ids:
            node_type_ids[label] = len(node_type_ids)
        return node_type_ids[label]

    def intern_edge_type(label: str) -> int:
        if label not in edge_type_ids:
            edge_type_ids[label] = len(edge_type_ids)
        return edge_type_ids[label]

    def intern_node(name: str, type_label: str, lineno: int) -> int:
        tid = intern_node_type(type_label)
        if name in node_ids:
            nid = node_ids[name]
            if node_types[nid] != tid:
                raise EdgeListFormatError(
                    f"line {lineno}: node '{name}' declared with conflicting types "
                    f"'{_name_of(node_type_ids, node_types[nid])}' and '{type_label}'"
                )
            return nid
        nid = len(node_ids)
        node_ids[name] = nid
        node_types.append(tid)
        return nid

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0].startswith("%"):
            if parts[0] != "%node" or len(parts) != 3:
                raise EdgeListFormatError(
                    f"line {lineno}: unrecognised directive (expected '%node <id> <type>')"
                )
            intern_node(parts[1], parts[2], lineno)
            continue
        if len(parts) not in (4, 5):
            raise EdgeListFormatError(
                f"line {lineno}: expected 'src dst src_type dst_type [edge_type]', "
                f"got {len(parts)} columns"
            )
        src, dst, stype, dtype = parts[:4]
        if src == dst:
            raise EdgeListFormatError(f"line {lineno}: self-loop at '{src}'")
        etype = parts[4] if len(parts) == 5 else DEFAULT_EDGE_TYPE
        u = intern_node(src, stype, lineno)
        v = intern_node(dst, dtype, lineno)
        eid = intern_edge_type(etype)
        key = (u, v) if u < v else (v, u)
        if key in edge_map:
            if edge_map[key] != eid:
                raise EdgeListFormatError(
                    f"line {lineno}: edge {src}-{dst} repeats with conflicting edge types"
                )
            collapsed += 1
            continue
        edge_map[key] = eid

    names = sorted(node_ids, key=node_ids.get)
    edges = list(edge_map)
    etypes = [edge_map[e] for e in edges]
    return HeteroGraph(
        names,
        node_types,
        edges,
        etypes,
        sorted(node_type_ids, key=node_type_ids.get),
        sorted(edge_type_ids, key=edge_type_ids.get),
        collapsed_duplicates=collapsed,
    )


def read_typed_edge_list(path) -> HeteroGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return load_typed_edge_list(fh.read())


def _name_of(table: dict[str, int], tid: int) -> str:
    for name, i in table.items():
        if i == tid:
            return name
    return str(tid)


def connected_components(g: WeightedGraph) -> tuple[np.ndarray, int]:
    """Label connected components of the positive-weight support.

    Labels are ``0..C-1`` ordered by the smallest node id each component
    contains, so the labelling is canonical. Zero-degree nodes come out as
    singleton components.
    """
    labels = np.full(g.node_count, -1, dtype=np.int64)
    current = 0
    for start in range(g.node_count):
        if labels[start] != -1:
            continue
        labels[start] = current
        stack = [start]
        while stack:
            u = stack.pop()
            for v, _w in g.adjacency[u]:
                if labels[v] == -1:
                    labels[v] = current
                    stack.append(v)
        current += 1
    return labels, current


def _validate_cut(node_count: int, s: Iterable[int]) -> frozenset:
    side = frozenset(s)
    for v in side:
        if not 0 <= v < node_count:
            raise ValueError(f"node id {v} out of range")
    if not side or len(side) == node_count:
        raise DegenerateCutError("cut requires both sides nonempty")
    return side


def weighted_cut(g: WeightedGraph, s: Iterable[int]):
    """Total weight crossing the cut (s, complement)."""
    side = _validate_cut(g.node_count, s)
    return sum(w for (u, v), w in g.weights.items() if (u in side) != (v in side))


def weighted_volume(g: WeightedGraph, s: Iterable[int]):
    idx = sorted(set(s))
    if not idx:
        return 0
    val = g.degrees[idx].sum()
    return int(val) if g.degrees.dtype == np.int64 else float(val)


def weighted_conductance(g: WeightedGraph, s: Iterable[int]) -> float:
    """Cut weight over the smaller side's weighted volume.

    Symmetric under complementing ``s``. A cut with an empty side raises
    DegenerateCutError; zero minimum volume (an all-isolated side) raises
    ZeroVolumeError rather than returning 0 or infinity.
    """
    side = _validate_cut(g.node_count, s)
    vol_s = weighted_volume(g, side)
    vol_rest = g.total_volume - vol_s
    denom = min(vol_s, vol_rest)
    if denom <= 0:
        raise ZeroVolumeError("one side of the cut has zero weighted volume")
    return weighted_cut(g, side) / denom


def brute_force_min_weighted_conductance(
    g: WeightedGraph, max_nodes: int = 20
) -> tuple[frozenset, Fraction]:
    """Exact minimum weighted conductance by exhausting all cuts.

    Requires integer weights so the minimum is an exact Fraction. Cuts where
    one side has zero volume are excluded. Ties break toward the cut whose
    smaller side is smallest, then lexicographically by membership.
    """
    n = g.node_count
    if n > max_nodes:
        raise ValueError(f"brute force limited to {max_nodes} nodes, got {n}")
    if n < 2:
        raise DegenerateCutError("graph too small to cut")
    if g.degrees.dtype != np.int64:
        raise ValueError("exact brute force requires integer weights")
    us = np.array([u for (u, v) in g.weights], dtype=np.uint32)
    vs = np.array([v for (u, v) in g.weights], dtype=np.uint32)
    ws = np.array([w for w in g.weights.values()], dtype=np.int64)
    deg = g.degrees
    total = int(deg.sum())

    best: tuple[int, int, tuple[int, tuple[int, ...]]] | None = None
    best_side: frozenset | None = None
    # Node n-1 stays on the complement side so each cut is seen once.
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
        sb = np.uint32(bits)
        crossing = ((sb >> us) & 1) != ((sb >> vs) & 1)
        cut = int(ws[crossing].sum()) if len(ws) else 0
        side = frozenset(members)
        other = frozenset(range(n)) - side
        canon = min(
            (len(side), tuple(sorted(side))), (len(other), tuple(sorted(other)))
        )
        key = (cut, minvol, canon)
        if best is None or _frac_less(key, best):
            best = key
            best_side = side if canon[1] == tuple(sorted(side)) else other
    if best is None:
        raise ZeroVolumeError("all cuts have a zero-volume side")
    cut, minvol, _ = best
    return best_side, Fraction(cut, minvol)


def _frac_less(a: tuple, b: tuple) -> bool:
    """Compare (cut, minvol, tiebreak) candidates as cut/minvol fractions."""
    left = a[0] * b[1]
    right = b[0] * a[1]
    if left != right:
        return left < right
    return a[2] < b[2]


def permute_graph(g: HeteroGraph, order: Sequence[int]) -> HeteroGraph:
    """Relabel nodes so that ``order[k]`` becomes node ``k``.

    ``order`` must be a bijection on ``0..n-1``. Types and external names are
    carried along; applying ``inverse_permutation(order)`` afterwards restores
    the original graph.
    """
    n = g.node_count
    if sorted(order) != list(range(n)):
        raise ValueError("order is not a bijection on node ids")
    pos = {old: new for new, old in enumerate(order)}
    edges = [(pos[u], pos[v]) for u, v in g.edges]
    return HeteroGraph(
        [g.node_names[old] for old in order],
        [g.node_types[old] for old in order],
        edges,
        g.edge_types,
        g.node_type_names,
        g.edge_type_names,
        collapsed_duplicates=g.collapsed_duplicates,
    )


def inverse_permutation(order: Sequence[int]) -> list[int]:
    inv = [0] * len(order)
    for k, old in enumerate(order):
        inv[old] = k
    return inv
