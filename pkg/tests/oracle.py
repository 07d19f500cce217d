"""Independent reference implementations used by the tests.

Nothing here touches the IdMap, the NI index or the D-tree machinery: label
and predicate matching are plain ``str.startswith``, reachability is a fresh
BFS, and matches come from backtracking over injective assignments.
"""

from __future__ import annotations

import itertools
import random
from collections import deque

from rdfh.graph import GraphBuilder, RdfGraph
from rdfh.query import ConnectionEdge, PredicateEdge, QueryNode, QueryTemplate


def bfs_dist(graph: RdfGraph, source: int, forward: bool = True, limit: int | None = None) -> dict[int, int]:
    adj: dict[int, set[int]] = {}
    for s, _, o in graph.edges:
        a, b = (s, o) if forward else (o, s)
        adj.setdefault(a, set()).add(b)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if limit is not None and dist[u] >= limit:
            continue
        for v in adj.get(u, ()):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def all_pairs_dist(graph: RdfGraph, limit: int) -> list[dict[int, int]]:
    return [bfs_dist(graph, n, True, limit) for n in range(graph.num_nodes)]


def brute_force_matches(graph: RdfGraph, template: QueryTemplate) -> set[tuple[int, ...]]:
    """Every injective assignment satisfying all label, edge and connection constraints."""
    n = len(template.nodes)
    max_d = max((c.max_distance for c in template.connections), default=0)
    dist = all_pairs_dist(graph, max_d) if max_d else None
    edge_preds: dict[tuple[int, int], set[str]] = {}
    for s, p, o in graph.edges:
        edge_preds.setdefault((s, o), set()).add(graph.predicates[p])

    def label_ok(q: int, v: int) -> bool:
        kw = template.nodes[q].keyword
        return kw is None or graph.labels[v].startswith(kw)

    domains = [[v for v in range(graph.num_nodes) if label_ok(q, v)] for q in range(n)]

    # assign query nodes in an order that keeps constraints checkable early
    order: list[int] = []
    links = [(e.source, e.target) for e in template.edges] + [(c.source, c.target) for c in template.connections]
    while len(order) < n:
        rest = [q for q in range(n) if q not in order]
        touching = [q for q in rest if any((a == q and b in order) or (b == q and a in order) for a, b in links)]
        order.append(min(touching or rest, key=lambda q: (len(domains[q]), q)))

    def edge_ok(e: PredicateEdge, a: dict[int, int]) -> bool:
        preds = edge_preds.get((a[e.source], a[e.target]), ())
        return any(e.predicate is None or p.startswith(e.predicate) for p in preds)

    def conn_ok(c: ConnectionEdge, a: dict[int, int]) -> bool:
        x, y = a[c.source], a[c.target]
        if dist[x].get(y, c.max_distance + 1) <= c.max_distance:
            return True
        return not c.directed and dist[y].get(x, c.max_distance + 1) <= c.max_distance

    checks_at: dict[int, list] = {q: [] for q in order}
    for e in template.edges:
        last = max(order.index(e.source), order.index(e.target))
        checks_at[order[last]].append(("e", e))
    for c in template.connections:
        last = max(order.index(c.source), order.index(c.target))
        checks_at[order[last]].append(("c", c))

    out: set[tuple[int, ...]] = set()
    assign: dict[int, int] = {}
    used: set[int] = set()

    def rec(i: int) -> None:
        if i == n:
            out.add(tuple(assign[q] for q in range(n)))
            return
        q = order[i]
        for v in domains[q]:
            if v in used:
                continue
            assign[q] = v
            if all(edge_ok(x, assign) if kind == "e" else conn_ok(x, assign) for kind, x in checks_at[q]):
                used.add(v)
                rec(i + 1)
                used.discard(v)
            del assign[q]

    rec(0)
    return out


def min_vertex_cover_size(graph: RdfGraph) -> int:
    pairs = {(s, o) for s, _, o in graph.edges}
    nodes = sorted({x for e in pairs for x in e})
    for size in range(len(nodes) + 1):
        for combo in itertools.combinations(nodes, size):
            chosen = set(combo)
            if all(a in chosen or b in chosen for a, b in pairs):
                return size
    return len(nodes)


# --- random instances -------------------------------------------------------------

_STEMS = ["ab", "abc", "abd", "b", "ba", "bcd", "c", "ca", "cab", "d"]


def random_graph(rng: random.Random, max_nodes: int = 40, max_edges: int | None = None) -> RdfGraph:
    """Small random RDF graph with overlapping label prefixes and a few predicates."""
    n_res = rng.randint(1, max(1, max_nodes * 2 // 3))
    n_lit = rng.randint(0, max(0, max_nodes - n_res))
    res = [f"r:{rng.choice(_STEMS)}{i}" for i in range(n_res)]
    lits = [f"{rng.choice(_STEMS).upper()} {i}" for i in range(n_lit)]
    preds = ["p:a", "p:ab", "p:b", "p:c"][: rng.randint(1, 4)]
    limit = max_edges if max_edges is not None else 3 * (n_res + n_lit)
    b = GraphBuilder()
    for label in res:
        b.node(label)
    for label in lits:
        b.node(label, literal=True)
    for _ in range(rng.randint(0, limit)):
        s = rng.choice(res)
        if lits and rng.random() < 0.3:
            b.add(s, rng.choice(preds), rng.choice(lits), True)
        else:
            b.add(s, rng.choice(preds), rng.choice(res))
    return b.build()


def random_template(rng: random.Random, graph: RdfGraph, max_size: int = 8, max_dc: int = 6) -> QueryTemplate:
    """Random connected template, usually grown from a real subgraph so it has matches."""
    size = rng.randint(1, max_size)
    und: dict[int, list[tuple[int, int, int]]] = {}
    for s, p, o in graph.edges:
        und.setdefault(s, []).append((s, p, o))
        und.setdefault(o, []).append((s, p, o))
    start = rng.randrange(graph.num_nodes)
    chosen_nodes = [start]
    chosen_edges: list[tuple[int, int, int]] = []
    for _ in range(size * 4):
        if len(chosen_nodes) >= size:
            break
        frontier = [e for v in chosen_nodes for e in und.get(v, ()) if e not in chosen_edges]
        if not frontier:
            break
        e = rng.choice(frontier)
        chosen_edges.append(e)
        for v in (e[0], e[2]):
            if v not in chosen_nodes:
                chosen_nodes.append(v)
    idx = {v: i for i, v in enumerate(chosen_nodes)}
    nodes = []
    for i, v in enumerate(chosen_nodes):
        label = graph.labels[v]
        r = rng.random()
        if r < 0.15:
            kw = None
        elif r < 0.3:
            kw = label
        else:
            kw = label[: rng.randint(1, max(1, len(label) - 1))]
        if rng.random() < 0.05:
            kw = "zz"
        nodes.append(QueryNode(f"q{i}", kw))
    edges, conns = [], []
    for s, p, o in chosen_edges:
        if s != o and rng.random() < 0.25:
            conns.append(ConnectionEdge(idx[s], idx[o], rng.randint(1, max_dc), rng.random() < 0.7))
        else:
            pred = graph.predicates[p]
            r = rng.random()
            pk = None if r < 0.15 else (pred[: rng.randint(1, len(pred))] if r < 0.4 else pred)
            edges.append(PredicateEdge(idx[s], pk, idx[o]))
    # occasional extra connection between random chosen nodes
    if len(chosen_nodes) > 2 and rng.random() < 0.3:
        a, b = rng.sample(range(len(chosen_nodes)), 2)
        conns.append(ConnectionEdge(a, b, rng.randint(1, max_dc), rng.random() < 0.5))
    return QueryTemplate(tuple(nodes), tuple(edges), tuple(conns))
