"""Query templates: keyword nodes, predicate edges and connection edges.

JSON form::

    {"nodes": [{"id": "?p", "keyword": "Paper"}, {"id": "?t"}],
     "edges": [{"from": "?p", "predicate": "title", "to": "?t"}],
     "connections": [{"from": "?p", "to": "?t", "max_distance": 2, "directed": true}]}

A missing keyword/predicate or ``"*"`` is a wildcard. Keywords are label
prefixes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

__all__ = [
    "QueryError",
    "QueryNode",
    "PredicateEdge",
    "ConnectionEdge",
    "QueryTemplate",
    "QueryComponent",
    "Split",
    "parse_query",
    "template_from_dict",
    "template_to_dict",
    "dump_query",
    "split_components",
]

WILDCARD = "*"


class QueryError(ValueError):
    pass


@dataclass(frozen=True)
class QueryNode:
    name: str
    keyword: str | None = None  # None = wildcard


@dataclass(frozen=True)
class PredicateEdge:
    source: int
    predicate: str | None  # None = wildcard
    target: int


@dataclass(frozen=True)
class ConnectionEdge:
    source: int
    target: int
    max_distance: int
    directed: bool = True


@dataclass(frozen=True)
class QueryTemplate:
    nodes: tuple[QueryNode, ...]
    edges: tuple[PredicateEdge, ...] = ()
    connections: tuple[ConnectionEdge, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "connections", tuple(self.connections))
        _validate(self)

    def __len__(self) -> int:
        return len(self.nodes)

    def index_of(self, name: str) -> int:
        for i, n in enumerate(self.nodes):
            if n.name == name:
                return i
        raise KeyError(name)


def _check_keyword(value: str | None, what: str) -> None:
    if value is None:
        return
    if value == "":
        raise QueryError(f"{what}: empty keyword")
    if WILDCARD in value:
        raise QueryError(f"{what}: only prefix keywords are supported, got {value!r}")


def _validate(t: QueryTemplate) -> None:
    n = len(t.nodes)
    if n == 0:
        raise QueryError("template has no nodes")
    names = [q.name for q in t.nodes]
    if len(set(names)) != n:
        raise QueryError("duplicate node id")
    for q in t.nodes:
        _check_keyword(q.keyword, f"node {q.name!r}")
    for e in t.edges:
        if not (0 <= e.source < n and 0 <= e.target < n):
            raise QueryError(f"edge {e} references an unknown node")
        _check_keyword(e.predicate, f"edge {names[e.source]}->{names[e.target]}")
    for c in t.connections:
        if not (0 <= c.source < n and 0 <= c.target < n):
            raise QueryError(f"connection {c} references an unknown node")
        if c.max_distance < 1:
            raise QueryError(
                f"connection {names[c.source]}->{names[c.target]}: max_distance must be >= 1"
            )
        if c.source == c.target:
            raise QueryError(f"connection {names[c.source]}->{names[c.target]} is a self-loop")
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in [(e.source, e.target) for e in t.edges] + [(c.source, c.target) for c in t.connections]:
        parent[find(a)] = find(b)
    if len({find(i) for i in range(n)}) > 1:
        raise QueryError("template is disconnected")


# --- JSON ---------------------------------------------------------------------


def _keyword(raw: Any, what: str) -> str | None:
    if raw is None or raw == WILDCARD:
        return None
    if not isinstance(raw, str):
        raise QueryError(f"{what}: keyword must be a string")
    return raw


def template_from_dict(doc: dict) -> QueryTemplate:
    if not isinstance(doc, dict):
        raise QueryError("query must be a JSON object")
    raw_nodes = doc.get("nodes") or []
    nodes = []
    for i, raw in enumerate(raw_nodes):
        if "id" not in raw:
            raise QueryError(f"node #{i} has no id")
        name = str(raw["id"])
        nodes.append(QueryNode(name, _keyword(raw.get("keyword"), f"node {name!r}")))
    ids = {q.name: i for i, q in enumerate(nodes)}

    def ref(raw: dict, key: str, what: str) -> int:
        name = raw.get(key)
        if name is None or str(name) not in ids:
            raise QueryError(f"{what}: unknown node reference {name!r}")
        return ids[str(name)]

    edges = []
    for raw in doc.get("edges") or []:
        what = f"edge {raw.get('from')}->{raw.get('to')}"
        edges.append(PredicateEdge(ref(raw, "from", what), _keyword(raw.get("predicate"), what), ref(raw, "to", what)))
    conns = []
    for raw in doc.get("connections") or []:
        what = f"connection {raw.get('from')}->{raw.get('to')}"
        dist = raw.get("max_distance")
        if not isinstance(dist, int) or isinstance(dist, bool):
            raise QueryError(f"{what}: max_distance must be an integer")
        conns.append(
            ConnectionEdge(ref(raw, "from", what), ref(raw, "to", what), dist, bool(raw.get("directed", True)))
        )
    return QueryTemplate(tuple(nodes), tuple(edges), tuple(conns))


def parse_query(text: str) -> QueryTemplate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise QueryError(f"invalid JSON: {exc}") from exc
    return template_from_dict(doc)


def template_to_dict(t: QueryTemplate) -> dict:
    names = [q.name for q in t.nodes]
    out: dict[str, Any] = {"nodes": []}
    for q in t.nodes:
        node: dict[str, Any] = {"id": q.name}
        if q.keyword is not None:
            node["keyword"] = q.keyword
        out["nodes"].append(node)
    out["edges"] = [
        {"from": names[e.source], "predicate": e.predicate if e.predicate is not None else WILDCARD, "to": names[e.target]}
        for e in t.edges
    ]
    out["connections"] = [
        {"from": names[c.source], "to": names[c.target], "max_distance": c.max_distance, "directed": c.directed}
        for c in t.connections
    ]
    return out


def dump_query(t: QueryTemplate) -> str:
    return json.dumps(template_to_dict(t), indent=2)


# --- components ---------------------------------------------------------------


@dataclass
class QueryComponent:
    nodes: tuple[int, ...]
    edges: tuple[int, ...]  # indices into template.edges


@dataclass
class Split:
    components: list[QueryComponent]
    component_of: list[int]  # query node -> component index
    intra: list[int] = field(default_factory=list)  # connection indices
    inter: list[int] = field(default_factory=list)

    def is_intra(self, conn: int) -> bool:
        return conn in self.intra


def split_components(t: QueryTemplate) -> Split:
    """Connected components of the predicate-edge graph; connections classified intra/inter."""
    n = len(t.nodes)
    adj: list[list[int]] = [[] for _ in range(n)]
    for e in t.edges:
        adj[e.source].append(e.target)
        adj[e.target].append(e.source)
    comp_of = [-1] * n
    groups: list[list[int]] = []
    for start in range(n):
        if comp_of[start] >= 0:
            continue
        cid = len(groups)
        comp_of[start] = cid
        stack, members = [start], []
        while stack:
            u = stack.pop()
            members.append(u)
            for v in adj[u]:
                if comp_of[v] < 0:
                    comp_of[v] = cid
                    stack.append(v)
        groups.append(sorted(members))
    comps = [QueryComponent(tuple(g), ()) for g in groups]
    edge_lists: list[list[int]] = [[] for _ in groups]
    for i, e in enumerate(t.edges):
        edge_lists[comp_of[e.source]].append(i)
    for comp, el in zip(comps, edge_lists):
        comp.edges = tuple(el)
    split = Split(comps, comp_of)
    for i, c in enumerate(t.connections):
        (split.intra if comp_of[c.source] == comp_of[c.target] else split.inter).append(i)
    return split
