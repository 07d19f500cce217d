"""Random query templates grown from real subgraphs, with generalized keywords."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from rdfh.graph import LITERAL, RdfGraph
from rdfh.idmap import SortedLabels, build_idmap
from rdfh.query import ConnectionEdge, PredicateEdge, QueryNode, QueryTemplate

_LOCAL_START = re.compile(r"[/#:]")
_TRAILING_ID = re.compile(r"[-_.]?\d+$")
MAX_ATTEMPTS = 200


@dataclass(frozen=True)
class GenConfig:
    size: int = 4
    seed: int = 0
    match_cap: tuple[int, int] = (1, 200)
    connection_edge_prob: float = 0.0
    connection_distance: tuple[int, int] = (2, 5)

    def __post_init__(self) -> None:
        lo, hi = self.match_cap
        if self.size < 1:
            raise ValueError("template size must be >= 1")
        if not 1 <= lo <= hi:
            raise ValueError(f"bad match band {self.match_cap}")
        if not 0.0 <= self.connection_edge_prob <= 1.0:
            raise ValueError("connection_edge_prob must be in [0, 1]")
        if not 1 <= self.connection_distance[0] <= self.connection_distance[1]:
            raise ValueError(f"bad connection distance range {self.connection_distance}")


def strip_uri_id(label: str) -> str:
    """Drop the trailing number (and one separator before it) from the local name."""
    cut = max((m.end() for m in _LOCAL_START.finditer(label)), default=0)
    local = label[cut:]
    stripped = _TRAILING_ID.sub("", local)
    if not stripped:
        return label
    return label[:cut] + stripped


def generalize_keyword(
    label: str, literal: bool, labels: SortedLabels, rng: random.Random, match_cap: tuple[int, int] = (1, 200)
) -> str:
    if not literal:
        return strip_uri_id(label)
    lo, hi = match_cap
    counts = [(n, len(labels.lookup_prefix(label[:n]))) for n in range(1, len(label) + 1)]
    in_band = [n for n, c in counts if lo <= c <= hi]
    if in_band:
        return label[: rng.choice(in_band)]
    below = [n for n, c in counts if c <= hi]
    return label[: below[0]] if below else label


def incident_edges(graph: RdfGraph) -> list[list[int]]:
    adjacent: list[list[int]] = [[] for _ in range(graph.num_nodes)]
    for i, (s, _, o) in enumerate(graph.edges):
        adjacent[s].append(i)
        if o != s:
            adjacent[o].append(i)
    return adjacent


def _grow(
    graph: RdfGraph, adjacent: list[list[int]], size: int, rng: random.Random
) -> tuple[list[int], list[int]] | None:
    if size > 1:
        start = graph.edges[rng.randrange(len(graph.edges))][rng.choice((0, 2))]
    else:
        start = rng.randrange(graph.num_nodes)
    nodes = [start]
    seen = {start}
    chosen: list[int] = []
    picked: set[int] = set()
    while len(nodes) < size:
        frontier = sorted({e for v in nodes for e in adjacent[v]} - picked)
        if not frontier:
            return None
        e = rng.choice(frontier)
        picked.add(e)
        chosen.append(e)
        s, _, o = graph.edges[e]
        for v in (s, o):
            if v not in seen:
                seen.add(v)
                nodes.append(v)
    return nodes, chosen


def generate_query(
    graph: RdfGraph, config: GenConfig, labels: SortedLabels | None = None
) -> tuple[QueryTemplate, tuple[int, ...]]:
    """A template plus the graph nodes it was grown from (one of its matches)."""
    if graph.num_nodes == 0 or (config.size > 1 and not graph.edges):
        raise ValueError("graph too small for the requested template size")
    rng = random.Random(config.seed)
    adjacent = incident_edges(graph)
    for _ in range(MAX_ATTEMPTS):
        grown = _grow(graph, adjacent, config.size, rng)
        if grown is not None:
            break
    else:
        raise ValueError(f"no connected subgraph with {config.size} nodes found")
    nodes, chosen = grown
    labels = labels if labels is not None else build_idmap(graph)
    pos = {v: i for i, v in enumerate(nodes)}
    qnodes = []
    for i, v in enumerate(nodes):
        kw = generalize_keyword(graph.labels[v], graph.kinds[v] == LITERAL, labels, rng, config.match_cap)
        # "*" is reserved for wildcards; a shorter prefix still matches the seed node
        qnodes.append(QueryNode(f"n{i}", kw.split("*", 1)[0] or None))
    edges, conns = [], []
    for e in chosen:
        s, p, o = graph.edges[e]
        if s != o and rng.random() < config.connection_edge_prob:
            conns.append(ConnectionEdge(pos[s], pos[o], rng.randint(*config.connection_distance)))
        else:
            edges.append(PredicateEdge(pos[s], graph.predicates[p].split("*", 1)[0] or None, pos[o]))
    return QueryTemplate(tuple(qnodes), tuple(edges), tuple(conns)), tuple(nodes)
