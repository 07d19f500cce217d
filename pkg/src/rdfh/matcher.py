"""Template matching over an RDF graph.

Pipeline for one template:

1. split off connection edges, leaving predicate-edge components;
2. per query node, unary candidates from the IdMap (prefix keyword -> ID run);
3. optionally prune candidates with the NI-index neighborhood check;
4. decompose each component into one-level D-trees, generate D-tree
   candidates by scanning root adjacency, and join them;
5. combine components and filter by connection edges (index-based
   reachability check), optionally instantiating shortest paths.

Matches are injective: two query nodes never bind the same graph node.
"""

from __future__ import annotations

import logging
import math
import time
from bisect import bisect_left, bisect_right
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from operator import itemgetter

from rdfh.graph import RdfGraph
from rdfh.idmap import IdInterval, IdMap, SortedLabels
from rdfh.ni_index import NiIndex
from rdfh.query import QueryComponent, QueryTemplate, Split, split_components

log = logging.getLogger(__name__)

DEFAULT_PATH_LIMIT = 1000


class RowLimitExceeded(RuntimeError):
    """An intermediate candidate set grew past the configured row limit."""

    def __init__(self, limit: int, where: str):
        super().__init__(f"more than {limit} intermediate rows during {where}")
        self.limit = limit
        self.where = where


def _check_rows(n: int, limit: int | None, where: str) -> None:
    if limit is not None and n > limit:
        raise RowLimitExceeded(limit, where)


class MatchContext:
    """Read-only graph + indexes shared by every query."""

    def __init__(self, graph: RdfGraph, idmap: IdMap, predmap: SortedLabels, index: NiIndex | None):
        self.graph = graph
        self.idmap = idmap
        self.predmap = predmap
        self.index = index
        self._pred_cache: dict[str | None, frozenset[int] | None] = {}

    def predicate_ids(self, keyword: str | None) -> frozenset[int] | None:
        """Graph predicate indices whose label starts with ``keyword``; None for a wildcard."""
        if keyword is None:
            return None
        hit = self._pred_cache.get(keyword)
        if hit is None:
            iv = self.predmap.lookup_prefix(keyword)
            labels = self.predmap.sorted_labels[iv.lo : iv.hi + 1] if not iv.empty else []
            hit = frozenset(self.graph.pred_of[label] for label in labels)
            self._pred_cache[keyword] = hit
        return hit

    def keyword_interval(self, keyword: str) -> IdInterval:
        return self.idmap.lookup_prefix(keyword)


# --- candidate sets -------------------------------------------------------------


class NodeCandidates:
    """Graph nodes a query node may bind to."""

    __slots__ = ("nodes", "_set")

    def __init__(self, nodes: list[int]):
        self.nodes = nodes
        self._set: set[int] | frozenset[int] | None = None

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def __contains__(self, node: int) -> bool:
        if self._set is None:
            self._set = frozenset(self.nodes)
        return node in self._set


@dataclass
class CandidateSet:
    schema: tuple[int, ...]
    rows: list[tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.rows)


def candidate_sets(ctx: MatchContext, template: QueryTemplate) -> list[NodeCandidates]:
    """Unary candidates per query node (prefix lookup; wildcard = every node)."""
    graph = ctx.graph
    subjects = {e.source for e in template.edges}
    out = []
    for qi, q in enumerate(template.nodes):
        if q.keyword is None:
            nodes = list(range(graph.num_nodes))
        else:
            nodes = ctx.idmap.nodes_in(ctx.keyword_interval(q.keyword))
        if qi in subjects:
            # literals have no outgoing edges
            kinds = graph.kinds
            nodes = [n for n in nodes if not kinds[n]]
        out.append(NodeCandidates(nodes))
    return out


# --- neighborhood check -------------------------------------------------------


def _query_distances(template: QueryTemplate, q: int, k: int, forward: bool) -> dict[int, int]:
    """Shortest directed predicate-edge distance from (forward) or to q, up to k hops."""
    adj: dict[int, set[int]] = defaultdict(set)
    for e in template.edges:
        if forward:
            adj[e.source].add(e.target)
        else:
            adj[e.target].add(e.source)
    dist = {q: 0}
    frontier = [q]
    for d in range(1, k + 1):
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
    del dist[q]
    return dist


KeywordProfile = dict[str, list[tuple[int, int]]]


def build_keyword_profile(q: int, template: QueryTemplate, k: int) -> KeywordProfile:
    """{Distance, Count} pairs per partial keyword among q's k-hop query neighbors.

    Count is cumulative: the number of query neighbors within |Distance| hops
    (in the distance's direction) whose keyword is matched by the profile
    keyword. A shorter keyword that is a prefix of a longer one matches a
    superset of labels, so it absorbs the longer keyword's occurrences.
    """
    if k < 1:
        return {}
    occurrences: list[tuple[int, str]] = []  # (signed distance, keyword)
    for sign, forward in ((1, True), (-1, False)):
        for r, d in _query_distances(template, q, k, forward).items():
            kw = template.nodes[r].keyword
            if kw is not None:
                occurrences.append((sign * d, kw))
    profile: KeywordProfile = {}
    for kw in sorted({kw for _, kw in occurrences}):
        covered = [d for d, other in occurrences if other.startswith(kw)]
        pairs = []
        for d in sorted(set(covered)):
            count = sum(1 for x in covered if (x > 0) == (d > 0) and abs(x) <= abs(d))
            pairs.append((d, count))
        profile[kw] = pairs
    return profile


def neighborhood_check(
    node: int, profile: KeywordProfile, index: NiIndex, intervals: dict[str, IdInterval]
) -> bool:
    """True iff ``node``'s indexed neighborhood can host every profile keyword occurrence.

    Nested prefix intervals form a laminar family, so checking every keyword
    against its absorbed count is the same as greedily assigning each graph
    neighbor to the most specific matching keyword: no neighbor is counted
    against two disjoint intervals.
    """
    for kw, pairs in profile.items():
        iv = intervals[kw]
        if iv.empty:
            return False
        for d, c in pairs:
            if index.count_within(node, d, iv) < c:
                return False
    return True


Requirement = tuple[bool, int, int, int, int]  # forward?, hops, lo, hi, min count


def compile_profile(profile: KeywordProfile, intervals: dict[str, IdInterval]) -> list[Requirement] | None:
    """Flatten a profile into requirements, narrowest interval and fewest hops first.

    Returns None when some keyword matches no label, so no node can pass.
    """
    reqs = []
    for kw, pairs in profile.items():
        iv = intervals[kw]
        if iv.empty:
            return None
        for d, c in pairs:
            reqs.append((d > 0, abs(d), iv.lo, iv.hi, c))
    reqs.sort(key=lambda r: (r[3] - r[2], r[1], -r[4]))
    return reqs


def _passes(fw: list, bw: list, reqs: list[Requirement]) -> bool:
    for forward, d, lo, hi, c in reqs:
        total = 0
        for ids in (fw if forward else bw)[:d]:
            total += bisect_right(ids, hi) - bisect_left(ids, lo)
        if total < c:
            return False
    return True


def prune_candidates(
    ctx: MatchContext, template: QueryTemplate, cands: list[NodeCandidates], k: int
) -> tuple[list[NodeCandidates], int]:
    """Apply the neighborhood check to every candidate; returns (pruned sets, checks done)."""
    index = ctx.index
    if index is None:
        raise ValueError("pruning requires an NI index")
    k = max(1, min(k, index.d_max))
    depth, forward, backward = index.depth, index.forward, index.backward
    profiles_by_k = {kk: [build_keyword_profile(q, template, kk) for q in range(len(template.nodes))] for kk in range(1, k + 1)}
    intervals: dict[str, IdInterval] = {}
    for profiles in profiles_by_k.values():
        for prof in profiles:
            for kw in prof:
                if kw not in intervals:
                    intervals[kw] = ctx.keyword_interval(kw)
    out = []
    checks = 0
    for q, cs in enumerate(cands):
        # wildcard sets cover the whole graph and only ever act as filters on
        # D-tree children, so checking them costs far more than it saves
        if not profiles_by_k[k][q] or template.nodes[q].keyword is None:
            out.append(cs)
            continue
        compiled = {kk: compile_profile(profiles_by_k[kk][q], intervals) for kk in profiles_by_k}
        kept = []
        for n in cs.nodes:
            checks += 1
            reqs = compiled[min(k, depth[n])]
            if reqs is not None and _passes(forward[n], backward[n], reqs):
                kept.append(n)
        out.append(NodeCandidates(kept))
    return out, checks


# --- D-trees ------------------------------------------------------------------


@dataclass(frozen=True)
class DTree:
    root: int
    edges: tuple[int, ...]  # template edge indices, all incident to root


def _selectivity(degree: int, size: int) -> float:
    return math.inf if size == 0 else degree / size


def decompose_dtrees(template: QueryTemplate, component: QueryComponent, sizes: Sequence[int]) -> list[DTree]:
    """Greedy one-level decomposition driven by S(q) = degree / |candidates|.

    Repeatedly takes the remaining edge with the largest S(a) + S(b) (ties:
    lowest edge index) and roots D-trees at both endpoints (higher S first,
    ties: lower query node), each taking all its still-uncovered edges.
    """
    edges = template.edges
    remaining = set(component.edges)
    out: list[DTree] = []

    def degree(q: int) -> int:
        return sum(1 for i in remaining if q in (edges[i].source, edges[i].target))

    while remaining:
        best, best_score = -1, -math.inf
        for i in sorted(remaining):
            e = edges[i]
            score = _selectivity(degree(e.source), sizes[e.source])
            if e.target != e.source:
                score += _selectivity(degree(e.target), sizes[e.target])
            if score > best_score:
                best, best_score = i, score
        e = edges[best]
        ends = sorted({e.source, e.target}, key=lambda q: (-_selectivity(degree(q), sizes[q]), q))
        for root in ends:
            incident = tuple(sorted(i for i in remaining if root in (edges[i].source, edges[i].target)))
            if incident:
                out.append(DTree(root, incident))
                remaining.difference_update(incident)
    return out


def generate_dtree_candidates(
    ctx: MatchContext,
    template: QueryTemplate,
    dtree: DTree,
    cands: Sequence[NodeCandidates],
    row_limit: int | None = None,
) -> tuple[CandidateSet, int]:
    """All injective bindings of a D-tree; returns (candidates, root iterations)."""
    graph = ctx.graph
    out_edges, in_edges = graph.out_edges, graph.in_edges
    root = dtree.root
    loops: list[frozenset[int] | None] = []
    # child -> list of (forward?, predicate ids)
    by_child: dict[int, list[tuple[bool, frozenset[int] | None]]] = defaultdict(list)
    for i in dtree.edges:
        e = template.edges[i]
        preds = ctx.predicate_ids(e.predicate)
        if e.source == e.target:
            loops.append(preds)
        elif e.source == root:
            by_child[e.target].append((True, preds))
        else:
            by_child[e.source].append((False, preds))
    children = sorted(by_child)
    schema = (root, *children)
    if any(p is not None and not p for p in loops) or any(
        p is not None and not p for specs in by_child.values() for _, p in specs
    ):
        return CandidateSet(schema, []), 0

    rows: list[tuple[int, ...]] = []
    iterations = 0
    for r in cands[root].nodes:
        iterations += 1
        ok = True
        for preds in loops:
            if not any(o == r and (preds is None or p in preds) for p, o in out_edges[r]):
                ok = False
                break
        if not ok:
            continue
        options: list[list[int]] = []
        for child in children:
            allowed = cands[child]
            opts: set[int] | None = None
            for forward, preds in by_child[child]:
                adj = out_edges[r] if forward else in_edges[r]
                if preds is None:
                    found = {v for _, v in adj if v != r and v in allowed}
                else:
                    found = {v for p, v in adj if p in preds and v != r and v in allowed}
                opts = found if opts is None else opts & found
                if not opts:
                    break
            if not opts:
                ok = False
                break
            options.append(sorted(opts))
        if not ok:
            continue
        partial: list[tuple[int, ...]] = [(r,)]
        for opts in options:
            grown: list[tuple[int, ...]] = []
            for row in partial:
                grown.extend(row + (v,) for v in opts if v not in row)
                _check_rows(len(rows) + len(grown), row_limit, "D-tree candidate generation")
            partial = grown
            if not partial:
                break
        rows.extend(partial)
    return CandidateSet(schema, rows), iterations


def join_order(sizes: Sequence[int], schemas: Sequence[Iterable[int]], roots: Sequence[int] | None = None) -> tuple[list[int], bool]:
    """Smallest candidate set first, then the smallest one connected to those already chosen.

    Returns (order, disconnected) where ``disconnected`` flags a step that had
    to take a D-tree sharing no query node with the prefix.
    """
    n = len(sizes)
    roots = roots if roots is not None else list(range(n))
    node_sets = [set(s) for s in schemas]
    left = set(range(n))
    order: list[int] = []
    covered: set[int] = set()
    flagged = False
    while left:
        pool = [i for i in left if node_sets[i] & covered] if order else list(left)
        if not pool:
            pool = list(left)
            flagged = True
        pick = min(pool, key=lambda i: (sizes[i], roots[i], i))
        order.append(pick)
        left.discard(pick)
        covered |= node_sets[pick]
    return order, flagged


def _columns(positions: Sequence[int]):
    """Row -> tuple of the values at ``positions``."""
    if not positions:
        return lambda row: ()
    if len(positions) == 1:
        (i,) = positions
        return lambda row: (row[i],)
    return itemgetter(*positions)


def join_candidates(a: CandidateSet, b: CandidateSet, row_limit: int | None = None) -> CandidateSet:
    """Natural join on shared query nodes; rows reusing a graph node are dropped."""
    shared = [q for q in a.schema if q in b.schema]
    if not shared:
        raise ValueError("join of candidate sets without shared query nodes")
    a_key = itemgetter(*[a.schema.index(q) for q in shared])
    b_key = itemgetter(*[b.schema.index(q) for q in shared])
    extra = _columns([i for i, q in enumerate(b.schema) if q not in a.schema])
    schema = a.schema + tuple(q for q in b.schema if q not in a.schema)
    width = len(schema)
    rows = []
    if len(a.rows) <= len(b.rows):
        # hash the smaller side and stream the larger one past it
        heads: dict = defaultdict(list)
        for row in a.rows:
            heads[a_key(row)].append(row)
        for row in b.rows:
            matches = heads.get(b_key(row))
            if not matches:
                continue
            tail = extra(row)
            for head in matches:
                merged = head + tail
                if len(set(merged)) == width:
                    rows.append(merged)
            _check_rows(len(rows), row_limit, "join")
        return CandidateSet(schema, rows)
    tails: dict = defaultdict(list)
    for row in b.rows:
        tails[b_key(row)].append(extra(row))
    for row in a.rows:
        for tail in tails.get(a_key(row), ()):
            merged = row + tail
            if len(set(merged)) == width:
                rows.append(merged)
        _check_rows(len(rows), row_limit, "join")
    return CandidateSet(schema, rows)


# --- connection edges ---------------------------------------------------------


class Connectivity:
    """Bounded-distance reachability answered from NI index layers.

    ``check(a, b, d)`` unions a's forward layers up to ceil(d/2) hops and b's
    backward layers up to the remaining hops and tests for a common node.
    When a node is indexed shallower than needed, the reach set is grown by
    hopping through the entries of nodes on its outermost indexed layer.
    """

    def __init__(self, index: NiIndex, idmap: IdMap):
        self.index = index
        self.node_id = idmap.node_id
        self.id_node = idmap.id_node
        self._reach: dict[tuple[int, int, bool], frozenset[int]] = {}
        self._memo: dict[tuple[int, int, int], bool] = {}
        self.checks = 0
        self.seconds = 0.0

    def reach(self, node: int, hops: int, forward: bool) -> frozenset[int]:
        """Label IDs of nodes within ``hops`` directed hops of ``node`` (excluding itself)."""
        key = (node, hops, forward)
        hit = self._reach.get(key)
        if hit is not None:
            return hit
        index = self.index
        layers_of = index.forward if forward else index.backward
        depth = index.depth
        if hops <= depth[node]:
            acc: set[int] = set()
            for ids in layers_of[node][:hops]:
                acc.update(ids)
            result = frozenset(acc)
        else:
            # Only nodes on the outermost indexed layer of an expansion can lead
            # further: anything nearer has its successors inside the same ball.
            me = self.node_id[node]
            dist = {me: 0}
            frontier: list[list[int]] = [[] for _ in range(hops + 1)]
            id_node = self.id_node

            def visit(layers: list, base: int, limit: int, full: int) -> None:
                for lvl, ids in enumerate(layers[:limit], 1):
                    nd = base + lvl
                    outer = lvl == full and nd < hops
                    for y in ids:
                        old = dist.get(y)
                        if old is None or nd < old:
                            dist[y] = nd
                            if outer:
                                frontier[nd].append(y)
                        elif outer and nd == old:
                            frontier[nd].append(y)

            visit(layers_of[node], 0, depth[node], depth[node])
            done: set[int] = set()
            for t in range(1, hops):
                for x in frontier[t]:
                    if dist[x] != t or x in done:
                        continue
                    done.add(x)
                    xn = id_node[x]
                    visit(layers_of[xn], t, min(hops - t, depth[xn]), depth[xn])
            del dist[me]
            result = frozenset(dist)
        self._reach[key] = result
        return result

    def check(self, a: int, b: int, d_c: int) -> bool:
        """Is there a directed path a -> b of length <= d_c?"""
        key = (a, b, d_c)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        t0 = time.perf_counter()
        self.checks += 1
        if a == b:
            ok = True
        else:
            h = -(-d_c // 2)
            fwd = self.reach(a, h, True)
            if self.node_id[b] in fwd:
                ok = True
            elif d_c - h == 0:
                ok = False
            else:
                bwd = self.reach(b, d_c - h, False)
                ok = self.node_id[a] in bwd or not fwd.isdisjoint(bwd)
        self._memo[key] = ok
        self.seconds += time.perf_counter() - t0
        return ok


def connectivity_check(a: int, b: int, d_c: int, index: NiIndex, idmap: IdMap) -> bool:
    return Connectivity(index, idmap).check(a, b, d_c)


def order_connection_edges(
    template: QueryTemplate, split: Split, component_sizes: Sequence[int], invert: bool = False
) -> list[int]:
    """Inter-component connections first (intra first when ``invert``), then by size product."""
    comp_of = split.component_of

    def key(i: int) -> tuple[int, int, int]:
        c = template.connections[i]
        ca, cb = comp_of[c.source], comp_of[c.target]
        intra = ca == cb
        product = component_sizes[ca] if intra else component_sizes[ca] * component_sizes[cb]
        cls = (0 if intra else 1) if invert else (1 if intra else 0)
        return cls, product, i

    return sorted(range(len(template.connections)), key=key)


def enumerate_shortest_paths(
    a: int, b: int, d_c: int, graph: RdfGraph, limit: int = DEFAULT_PATH_LIMIT
) -> tuple[list[list[int]], bool]:
    """All shortest directed paths a -> b of length <= d_c; returns (paths, truncated)."""
    if a == b:
        return [[a]], False
    dist = {a: 0}
    preds: dict[int, list[int]] = defaultdict(list)
    frontier = [a]
    for d in range(1, d_c + 1):
        nxt = []
        for u in frontier:
            for v in graph.succ[u]:
                if v not in dist:
                    dist[v] = d
                    nxt.append(v)
                if dist[v] == d:
                    preds[v].append(u)
        if b in dist:
            break
        frontier = nxt
    if b not in dist:
        log.warning("no path of length <= %d between nodes %d and %d", d_c, a, b)
        return [], False
    paths: list[list[int]] = []
    truncated = False
    stack = [(b, [b])]
    while stack:
        v, suffix = stack.pop()
        if v == a:
            if len(paths) >= limit:
                truncated = True
                break
            paths.append(suffix[::-1])
            continue
        for u in sorted(preds[v], reverse=True):
            stack.append((u, suffix + [u]))
    paths.sort()
    return paths, truncated


# --- full template ------------------------------------------------------------


@dataclass
class MatchResult:
    binding: tuple[int, ...]  # graph node per query node
    paths: dict[int, list[list[int]]] | None = None


@dataclass
class MatchStats:
    use_pruning: bool = False
    hops: int = 0
    candidates: list[int] = field(default_factory=list)
    pruned_candidates: list[int] | None = None
    neighborhood_checks: int = 0
    dtree_iterations: list[int] = field(default_factory=list)
    dtree_rows: list[int] = field(default_factory=list)
    joins: int = 0
    join_rows: int = 0
    connectivity_checks: int = 0
    connectivity_seconds: float = 0.0
    results: int = 0
    seconds: float = 0.0
    short_circuit: bool = False

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Prepared:
    """Work shared by planning and execution: components and unary candidates."""

    template: QueryTemplate
    split: Split
    candidates: list[NodeCandidates]
    decompositions: list[list[DTree]]
    seconds: float = 0.0

    @property
    def empty(self) -> bool:
        return any(len(c) == 0 for c in self.candidates)


def prepare(ctx: MatchContext, template: QueryTemplate) -> Prepared:
    t0 = time.perf_counter()
    split = split_components(template)
    cands = candidate_sets(ctx, template)
    sizes = [len(c) for c in cands]
    decomps = [decompose_dtrees(template, comp, sizes) for comp in split.components]
    return Prepared(template, split, cands, decomps, time.perf_counter() - t0)


def _component_rows(
    ctx: MatchContext,
    template: QueryTemplate,
    comp: QueryComponent,
    dtrees: list[DTree],
    cands: list[NodeCandidates],
    stats: MatchStats,
    row_limit: int | None = None,
) -> CandidateSet:
    if not dtrees:
        (q,) = comp.nodes
        return CandidateSet((q,), [(n,) for n in cands[q].nodes])
    sets = []
    for dt in dtrees:
        cs, iters = generate_dtree_candidates(ctx, template, dt, cands, row_limit)
        stats.dtree_iterations.append(iters)
        stats.dtree_rows.append(len(cs))
        if not cs.rows:
            return CandidateSet(cs.schema, [])
        sets.append(cs)
    order, _ = join_order([len(s) for s in sets], [s.schema for s in sets], [d.root for d in dtrees])
    acc = sets[order[0]]
    for i in order[1:]:
        acc = join_candidates(acc, sets[i], row_limit)
        stats.joins += 1
        stats.join_rows += len(acc.rows)
        if not acc.rows:
            break
    return acc


def _satisfied(conn: Connectivity, a: int, b: int, d_c: int, directed: bool) -> bool:
    return conn.check(a, b, d_c) or (not directed and conn.check(b, a, d_c))


def execute(
    ctx: MatchContext,
    prepared: Prepared,
    use_pruning: bool,
    k: int | None = None,
    instantiate_paths: bool = False,
    invert_cedge_order: bool = False,
    path_limit: int = DEFAULT_PATH_LIMIT,
    row_limit: int | None = None,
) -> tuple[list[MatchResult], MatchStats]:
    """Run a prepared template; ``row_limit`` bounds every intermediate candidate set."""
    t0 = time.perf_counter()
    template = prepared.template
    split = prepared.split
    stats = MatchStats(use_pruning=use_pruning, candidates=[len(c) for c in prepared.candidates])
    cands = prepared.candidates
    decomps = prepared.decompositions

    def finish(results: list[MatchResult]) -> tuple[list[MatchResult], MatchStats]:
        stats.results = len(results)
        stats.seconds = time.perf_counter() - t0 + prepared.seconds
        return results, stats

    if prepared.empty:
        stats.short_circuit = True
        return finish([])

    if use_pruning:
        hops = k if k is not None else ctx.index.d_max
        stats.hops = hops
        cands, stats.neighborhood_checks = prune_candidates(ctx, template, cands, hops)
        stats.pruned_candidates = [len(c) for c in cands]
        if any(len(c) == 0 for c in cands):
            stats.short_circuit = True
            return finish([])
        sizes = [len(c) for c in cands]
        decomps = [decompose_dtrees(template, comp, sizes) for comp in split.components]

    comp_sets: list[CandidateSet] = []
    for comp, dtrees in zip(split.components, decomps):
        cs = _component_rows(ctx, template, comp, dtrees, cands, stats, row_limit)
        if not cs.rows:
            return finish([])
        comp_sets.append(cs)

    conn = Connectivity(ctx.index, ctx.idmap) if template.connections else None
    # groups of merged components, each with its own candidate set
    group_of = list(range(len(comp_sets)))
    groups: dict[int, CandidateSet] = dict(enumerate(comp_sets))
    order = order_connection_edges(template, split, [len(c) for c in comp_sets], invert_cedge_order)
    for ci in order:
        c = template.connections[ci]
        ga, gb = group_of[split.component_of[c.source]], group_of[split.component_of[c.target]]
        A, B = groups[ga], groups[gb]
        pa = A.schema.index(c.source)
        pb = B.schema.index(c.target)
        if ga == gb:
            verdict: dict[tuple[int, int], bool] = {}
            rows = []
            for r in A.rows:
                pair = (r[pa], r[pb])
                ok = verdict.get(pair)
                if ok is None:
                    ok = verdict[pair] = _satisfied(conn, *pair, c.max_distance, c.directed)
                if ok:
                    rows.append(r)
            merged = CandidateSet(A.schema, rows)
        else:
            by_start: dict[int, list[tuple[int, ...]]] = defaultdict(list)
            for r in A.rows:
                by_start[r[pa]].append(r)
            by_end: dict[int, list[tuple[int, ...]]] = defaultdict(list)
            for r in B.rows:
                by_end[r[pb]].append(r)
            width = len(A.schema) + len(B.schema)
            rows = []
            for na, ras in by_start.items():
                for nb, rbs in by_end.items():
                    if not _satisfied(conn, na, nb, c.max_distance, c.directed):
                        continue
                    for ra in ras:
                        for rb in rbs:
                            m = ra + rb
                            if len(set(m)) == width:
                                rows.append(m)
                _check_rows(len(rows), row_limit, "connection edge merge")
            merged = CandidateSet(A.schema + B.schema, rows)
            del groups[gb]
            for i, g in enumerate(group_of):
                if g == gb:
                    group_of[i] = ga
        groups[ga] = merged
        if not merged.rows:
            break
    if conn is not None:
        stats.connectivity_checks = conn.checks
        stats.connectivity_seconds = conn.seconds
    if any(not g.rows for g in groups.values()):
        return finish([])
    if len(groups) != 1:
        raise AssertionError("connected template left several result groups")
    (final,) = groups.values()
    positions = [final.schema.index(q) for q in range(len(template.nodes))]
    seen: set[tuple[int, ...]] = set()
    results = []
    for r in final.rows:
        b = tuple(r[p] for p in positions)
        if b not in seen:
            seen.add(b)
            results.append(MatchResult(b))
    if instantiate_paths and template.connections:
        cache: dict[tuple[int, int, int, bool], list[list[int]]] = {}
        for res in results:
            res.paths = {}
            for ci, c in enumerate(template.connections):
                a, b = res.binding[c.source], res.binding[c.target]
                key = (a, b, c.max_distance, c.directed)
                if key not in cache:
                    cache[key] = _instantiate(ctx.graph, a, b, c.max_distance, c.directed, path_limit)
                res.paths[ci] = cache[key]
    return finish(results)


def _instantiate(graph: RdfGraph, a: int, b: int, d_c: int, directed: bool, limit: int) -> list[list[int]]:
    fwd, _ = enumerate_shortest_paths(a, b, d_c, graph, limit)
    if directed:
        return fwd
    bwd, _ = enumerate_shortest_paths(b, a, d_c, graph, limit)
    if fwd and bwd:
        if len(fwd[0]) != len(bwd[0]):
            return fwd if len(fwd[0]) < len(bwd[0]) else bwd
        return fwd + bwd
    return fwd or bwd


def match_template(
    ctx: MatchContext,
    template: QueryTemplate,
    use_pruning: bool = False,
    k: int | None = None,
    instantiate_paths: bool = False,
    invert_cedge_order: bool = False,
) -> list[MatchResult]:
    results, _ = execute(ctx, prepare(ctx, template), use_pruning, k, instantiate_paths, invert_cedge_order)
    return results
