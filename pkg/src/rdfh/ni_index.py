"""Neighborhood Interval (NI) index.

For every node the index keeps its forward and backward neighbors grouped by
shortest-path distance (1..depth). Each distance layer is a sorted list of
IdMap label IDs; the index rows ("entries") are that list cut into chunks of
at most ``m`` IDs, each tagged with its ID interval. Positive distances are
forward neighbors, negative distances backward neighbors.

Two variants exist: a full index with one depth for every node, and the
vertex-cover index where nodes of a 2-approximate vertex cover are indexed
two hops deep and every other node one hop deep.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from rdfh.graph import RdfGraph
from rdfh.idmap import IdInterval, IdMap

__all__ = [
    "NiEntry",
    "NiIndex",
    "build_ni_index",
    "build_vc_ni_index",
    "approx_vertex_cover",
    "entries_within",
    "bfs_layers",
]

DEFAULT_DMAX = 3
DEFAULT_BINNING = 5


@dataclass(frozen=True)
class NiEntry:
    node: int
    distance: int
    interval: IdInterval
    count: int
    neighbor_ids: tuple[int, ...]


def bfs_layers(adj: list[tuple[int, ...]], source: int, depth: int) -> list[list[int]]:
    """Nodes at shortest distance 1..depth from ``source``; trailing empty layers dropped."""
    seen = {source}
    frontier = [source]
    layers: list[list[int]] = []
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        if not nxt:
            break
        layers.append(nxt)
        frontier = nxt
    return layers


class NiIndex:
    """Per-node signed-distance neighbor layers, exposed as binned entries."""

    def __init__(
        self,
        depth: list[int],
        forward: list[list[tuple[int, ...]]],
        backward: list[list[tuple[int, ...]]],
        m: int,
        variant: str,
        d_max: int,
    ):
        self.depth = depth
        self.forward = forward
        self.backward = backward
        self.m = m
        self.variant = variant  # "full" or "vc"
        self.d_max = d_max

    @property
    def name(self) -> str:
        return "vc" if self.variant == "vc" else f"d{self.d_max}"

    def depth_of(self, node: int) -> int:
        return self.depth[node]

    def layer(self, node: int, distance: int) -> tuple[int, ...]:
        """Sorted label IDs at exactly ``distance`` (signed) from ``node``."""
        layers = self.forward[node] if distance > 0 else self.backward[node]
        d = abs(distance)
        if d == 0 or d > len(layers):
            return ()
        return layers[d - 1]

    def count_within(self, node: int, distance: int, interval: IdInterval) -> int:
        """Distinct indexed neighbors within ``|distance|`` hops (signed direction) whose ID is in ``interval``."""
        layers = self.forward[node] if distance > 0 else self.backward[node]
        lo, hi = interval.lo, interval.hi
        total = 0
        for ids in layers[: abs(distance)]:
            total += bisect_right(ids, hi) - bisect_left(ids, lo)
        return total

    def entries(self, node: int) -> list[NiEntry]:
        out = []
        for sign, layers in ((-1, self.backward[node]), (1, self.forward[node])):
            order = range(len(layers) - 1, -1, -1) if sign < 0 else range(len(layers))
            for i in order:
                ids = layers[i]
                for k in range(0, len(ids), self.m):
                    chunk = ids[k : k + self.m]
                    out.append(NiEntry(node, sign * (i + 1), IdInterval(chunk[0], chunk[-1]), len(chunk), chunk))
        return out

    def entry_count(self) -> int:
        m = self.m
        total = 0
        for layers in (self.forward, self.backward):
            for node_layers in layers:
                for ids in node_layers:
                    total += -(-len(ids) // m)
        return total

    def stored_ids(self) -> int:
        return sum(len(ids) for layers in (self.forward, self.backward) for nl in layers for ids in nl)

    def header(self) -> dict:
        return {"variant": self.variant, "d_max": self.d_max, "m": self.m}


def _build(graph: RdfGraph, idmap: IdMap, depth: list[int], m: int, variant: str, d_max: int) -> NiIndex:
    if m < 1:
        raise ValueError("binning factor m must be >= 1")
    node_id = idmap.node_id
    forward: list[list[tuple[int, ...]]] = []
    backward: list[list[tuple[int, ...]]] = []
    for node in range(graph.num_nodes):
        d = depth[node]
        forward.append([tuple(sorted(node_id[v] for v in layer)) for layer in bfs_layers(graph.succ, node, d)])
        backward.append([tuple(sorted(node_id[v] for v in layer)) for layer in bfs_layers(graph.pred, node, d)])
    return NiIndex(depth, forward, backward, m, variant, d_max)


def build_ni_index(graph: RdfGraph, idmap: IdMap, d_max: int = DEFAULT_DMAX, m: int = DEFAULT_BINNING) -> NiIndex:
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    return _build(graph, idmap, [d_max] * graph.num_nodes, m, "full", d_max)


def approx_vertex_cover(graph: RdfGraph) -> set[int]:
    """Matching-based 2-approximate vertex cover of the undirected skeleton.

    Edges are scanned in ascending (subject, object) node-id order; an
    uncovered edge puts both endpoints into the cover.
    """
    cover: set[int] = set()
    for s, o in sorted({(s, o) for s, _, o in graph.edges}):
        if s not in cover and o not in cover:
            cover.add(s)
            cover.add(o)
    return cover


def build_vc_ni_index(graph: RdfGraph, idmap: IdMap, m: int = DEFAULT_BINNING) -> NiIndex:
    cover = approx_vertex_cover(graph)
    depth = [2 if node in cover else 1 for node in range(graph.num_nodes)]
    return _build(graph, idmap, depth, m, "vc", 2)


def entries_within(
    index: NiIndex, node: int, dist_lo: int, dist_hi: int, filter: IdInterval | None = None
) -> list[NiEntry]:
    if node < 0 or node >= len(index.depth):
        return []
    return [
        e
        for e in index.entries(node)
        if dist_lo <= e.distance <= dist_hi and (filter is None or e.interval.intersects(filter))
    ]
