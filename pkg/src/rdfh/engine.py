"""Query engine: a graph, its indexes and statistics, and the auto/prune/noprune modes."""

from __future__ import annotations

import time
from dataclasses import dataclass

from rdfh.graph import RdfGraph
from rdfh.idmap import IdMap, SortedLabels, build_idmap, build_predicate_map
from rdfh.matcher import MatchContext, MatchResult, MatchStats, Prepared, execute, prepare
from rdfh.ni_index import DEFAULT_BINNING, DEFAULT_DMAX, NiIndex, build_ni_index
from rdfh.planner import (
    DatasetStats,
    PlanDecision,
    Thresholds,
    compute_stats,
    decide,
    estimate_complexity,
    selectivity_from_terms,
    selectivity_terms,
)
from rdfh.query import QueryTemplate

MODES = ("auto", "prune", "noprune")


@dataclass
class QueryOutcome:
    results: list[MatchResult]
    stats: MatchStats
    plan: PlanDecision | None
    mode: str


class Engine:
    def __init__(
        self,
        graph: RdfGraph,
        index: NiIndex | None = None,
        idmap: IdMap | None = None,
        stats: DatasetStats | None = None,
        thresholds: Thresholds | None = None,
        d_max: int = DEFAULT_DMAX,
        m: int = DEFAULT_BINNING,
    ):
        self.graph = graph
        self.idmap = idmap if idmap is not None else build_idmap(graph)
        self.predmap: SortedLabels = build_predicate_map(graph)
        self.index = index if index is not None else build_ni_index(graph, self.idmap, d_max, m)
        self._stats = stats
        self.thresholds = thresholds if thresholds is not None else Thresholds()
        self.ctx = MatchContext(graph, self.idmap, self.predmap, self.index)

    @property
    def stats(self) -> DatasetStats:
        if self._stats is None:
            self._stats = compute_stats(self.graph)
        return self._stats

    @property
    def hops(self) -> int:
        return self.index.d_max

    def prepare(self, template: QueryTemplate) -> Prepared:
        return prepare(self.ctx, template)

    def plan(self, template: QueryTemplate, prepared: Prepared | None = None) -> PlanDecision:
        prepared = prepared if prepared is not None else self.prepare(template)
        sizes = [len(c) for c in prepared.candidates]
        roots = []
        for comp, dtrees in zip(prepared.split.components, prepared.decompositions):
            if dtrees:
                roots.extend(sizes[d.root] for d in dtrees)
            else:
                roots.append(sizes[comp.nodes[0]])
        estimates = estimate_complexity(roots)
        sels, unresolved = [], False
        cache: dict = {}
        for q in range(len(template.nodes)):
            terms = selectivity_terms(q, template, self.stats, self.hops, cache)
            sels.append(selectivity_from_terms(terms))
            unresolved = unresolved or any(t.unresolved for t in terms)
        decision = decide(estimates, sels, self.thresholds, self.hops)
        decision.unresolved_predicates = unresolved
        return decision

    def query(
        self,
        template: QueryTemplate,
        mode: str = "auto",
        paths: bool = False,
        invert_cedge_order: bool = False,
        hops: int | None = None,
        row_limit: int | None = None,
    ) -> QueryOutcome:
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        t0 = time.perf_counter()
        prepared = self.prepare(template)
        plan = None
        if mode == "auto":
            plan = self.plan(template, prepared)
            use = plan.use_pruning
        else:
            use = mode == "prune"
        results, stats = execute(
            self.ctx, prepared, use, hops, paths, invert_cedge_order, row_limit=row_limit
        )
        stats.seconds = time.perf_counter() - t0
        return QueryOutcome(results, stats, plan, mode)

    def run_seconds(self, template: QueryTemplate, use_pruning: bool, row_limit: int | None = None) -> float:
        t0 = time.perf_counter()
        self.query(template, "prune" if use_pruning else "noprune", row_limit=row_limit)
        return time.perf_counter() - t0

    # --- output ------------------------------------------------------------

    def result_json(self, template: QueryTemplate, result: MatchResult) -> dict:
        labels = self.graph.labels
        doc: dict = {"bindings": {q.name: labels[n] for q, n in zip(template.nodes, result.binding)}}
        if result.paths is not None:
            doc["paths"] = {str(i): [[labels[n] for n in p] for p in ps] for i, ps in result.paths.items()}
        return doc

    def canonical(self, template: QueryTemplate, results: list[MatchResult]) -> list[dict]:
        docs = [self.result_json(template, r) for r in results]
        docs.sort(key=lambda d: sorted(d["bindings"].items()))
        return docs
