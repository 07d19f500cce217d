"""Hybrid plan selection: decide per query whether neighborhood pruning pays off.

Pruning is used when the template looks expensive (some D-tree root has more
than ``iteration`` candidates, or the product of root candidate counts exceeds
``join``) *and* some query node has a rare neighborhood (neighborhood
selectivity >= ``selectivity``).
"""

from __future__ import annotations

import itertools
import logging
import math
import random
import statistics
from collections import Counter, defaultdict
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field

from rdfh.graph import LITERAL, RdfGraph
from rdfh.idmap import SortedLabels
from rdfh.query import QueryTemplate

log = logging.getLogger(__name__)

DEFAULT_NGRAM = 5
MAX_NGRAM = 16
JOIN_CAP = 2**62

ITERATION_GRID = (10, 10**2, 10**3, 10**4)
JOIN_GRID = (10**2, 10**3, 10**4, 10**5, 10**6, 10**7)
SELECTIVITY_GRID = (1.0, 2.0, 5.0, 10.0, 20.0)


@dataclass
class DatasetStats:
    edge_total: int
    pred_count: dict[str, int]
    pred_sel: dict[str, float]
    ngram: int
    lit_sel: dict[str, float]
    unique_lit: dict[str, int]
    # attribute predicate -> literal selectivity for n = 1..MAX_NGRAM
    lit_sel_by_n: dict[str, list[float]] = field(default_factory=dict)
    sampled: bool = False
    sample_size: int | None = None

    def __post_init__(self) -> None:
        self._preds = SortedLabels(self.pred_count)

    def resolve(self, keyword: str) -> list[str]:
        iv = self._preds.lookup_prefix(keyword)
        return [] if iv.empty else self._preds.sorted_labels[iv.lo : iv.hi + 1]

    def literal_selectivity(self, predicate: str, n: int) -> float:
        table = self.lit_sel_by_n.get(predicate)
        if not table:
            return self.lit_sel[predicate]
        return table[min(max(n, 1), len(table)) - 1]

    @property
    def min_selectivity(self) -> float:
        return min(self.pred_sel.values()) if self.pred_sel else 1.0

    def to_dict(self) -> dict:
        d = asdict(self)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetStats":
        return cls(**d)


def _literal_selectivity(labels: set[str], n: int) -> float:
    """Mean number of labels per prefix n-gram, over the number of labels."""
    grams = Counter(label[:n] for label in labels)
    mean = sum(grams.values()) / len(grams)
    return mean / len(labels)


def compute_stats(
    graph: RdfGraph, n: int = DEFAULT_NGRAM, sample: int | None = None, seed: int = 0
) -> DatasetStats:
    if n < 1:
        raise ValueError("n-gram length must be >= 1")
    edges = graph.edges
    sampled = sample is not None and sample < len(edges)
    if sampled:
        edges = random.Random(seed).sample(edges, sample)
    counts: Counter[str] = Counter()
    literals: dict[str, set[str]] = defaultdict(set)
    for s, p, o in edges:
        pred = graph.predicates[p]
        counts[pred] += 1
        if graph.kinds[o] == LITERAL:
            literals[pred].add(graph.labels[o])
    total = len(edges)
    pred_sel = {p: c / total for p, c in counts.items()}
    lit_sel, unique, by_n = {}, {}, {}
    for pred, labels in literals.items():
        if not labels:
            continue
        unique[pred] = len(labels)
        lit_sel[pred] = _literal_selectivity(labels, n)
        by_n[pred] = [_literal_selectivity(labels, k) for k in range(1, MAX_NGRAM + 1)]
    return DatasetStats(
        edge_total=total,
        pred_count=dict(counts),
        pred_sel=pred_sel,
        ngram=n,
        lit_sel=lit_sel,
        unique_lit=unique,
        lit_sel_by_n=by_n,
        sampled=sampled,
        sample_size=len(edges) if sampled else None,
    )


# --- query side -----------------------------------------------------------------


def _directed_dist(template: QueryTemplate, q: int, forward: bool, limit: int) -> dict[int, int]:
    dist = {q: 0}
    frontier = [q]
    for d in range(1, limit + 1):
        nxt = []
        for u in frontier:
            for e in template.edges:
                a, b = (e.source, e.target) if forward else (e.target, e.source)
                if a == u and b not in dist:
                    dist[b] = d
                    nxt.append(b)
        frontier = nxt
    return dist


def neighborhood_edges(template: QueryTemplate, q: int, k: int) -> list[int]:
    """Predicate edges lying on a directed path of at most k hops from or to q."""
    fwd = _directed_dist(template, q, True, k - 1)
    bwd = _directed_dist(template, q, False, k - 1)
    return [i for i, e in enumerate(template.edges) if e.source in fwd or e.target in bwd]


@dataclass
class SelectivityTerm:
    edge: int
    predicate: str | None
    s: float
    f: float | None
    unresolved: bool = False


def edge_term(i: int, template: QueryTemplate, stats: DatasetStats) -> SelectivityTerm:
    e = template.edges[i]
    if e.predicate is None:
        return SelectivityTerm(i, None, 1.0, None)
    preds = stats.resolve(e.predicate)
    if not preds:
        return SelectivityTerm(i, None, stats.min_selectivity, None, unresolved=True)
    # least selective match is the conservative choice
    pred = max(preds, key=lambda p: (stats.pred_sel[p], p))
    f = None
    if pred in stats.lit_sel:
        kw = template.nodes[e.target].keyword
        f = stats.literal_selectivity(pred, len(kw) if kw is not None else stats.ngram)
    return SelectivityTerm(i, pred, stats.pred_sel[pred], f)


def selectivity_terms(
    q: int, template: QueryTemplate, stats: DatasetStats, k: int, cache: dict[int, SelectivityTerm] | None = None
) -> list[SelectivityTerm]:
    """Terms for q's k-hop predicate edges; ``cache`` shares per-edge terms across query nodes."""
    cache = cache if cache is not None else {}
    terms = []
    for i in neighborhood_edges(template, q, k):
        if i not in cache:
            cache[i] = edge_term(i, template, stats)
        terms.append(cache[i])
    return terms


def selectivity_from_terms(terms: Sequence[SelectivityTerm]) -> float:
    return abs(sum(math.log(t.s * (t.f if t.f is not None else 1.0)) for t in terms))


def neighborhood_selectivity(q: int, template: QueryTemplate, stats: DatasetStats, k: int) -> float:
    """|sum of ln s(p) over relationship edges + ln(s(p) * f) over attribute edges|."""
    return selectivity_from_terms(selectivity_terms(q, template, stats, k))


def estimate_complexity(root_sizes: Sequence[int]) -> tuple[int, int]:
    """(max root candidates, product of root candidates), the product saturating at JOIN_CAP."""
    if not root_sizes or any(s == 0 for s in root_sizes):
        return 0, 0
    joins = 1
    for s in root_sizes:
        joins = min(joins * s, JOIN_CAP)
    return max(root_sizes), joins


@dataclass(frozen=True)
class Thresholds:
    iteration: int = 1000
    join: int = 10**6
    selectivity: float = 10.0

    def __post_init__(self) -> None:
        if self.iteration <= 0 or self.join <= 0 or self.selectivity <= 0:
            raise ValueError("thresholds must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PlanDecision:
    use_pruning: bool
    hops: int
    max_iterations: int
    est_joins: int
    max_selectivity: float
    complex: bool = False
    selective: bool = False
    unresolved_predicates: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def decide(
    estimates: tuple[int, int], selectivities: Sequence[float], thresholds: Thresholds, hops: int
) -> PlanDecision:
    max_iter, joins = estimates
    max_sel = max(selectivities, default=0.0)
    is_complex = max_iter > thresholds.iteration or joins > thresholds.join
    selective = max_sel >= thresholds.selectivity
    return PlanDecision(is_complex and selective, hops, max_iter, joins, max_sel, is_complex, selective)


# --- tuning ---------------------------------------------------------------------


@dataclass
class QueryTiming:
    estimates: tuple[int, int]
    max_selectivity: float
    prune_seconds: float
    noprune_seconds: float

    @property
    def usable(self) -> bool:
        """False when neither branch finished (both charged infinite time)."""
        return math.isfinite(self.prune_seconds) or math.isfinite(self.noprune_seconds)


def choose_thresholds(timings: Sequence[QueryTiming]) -> tuple[Thresholds, float]:
    """Grid triple minimizing the total time the auto plan would take on ``timings``.

    Each query's plan only depends on its evidence, so the auto time for a
    grid point is the sum of the measured time of whichever branch it picks.
    """
    timings = [qt for qt in timings if qt.usable]
    best: tuple[float, tuple] | None = None
    for t1, t2, t3 in itertools.product(ITERATION_GRID, JOIN_GRID, SELECTIVITY_GRID):
        th = Thresholds(t1, t2, t3)
        total = 0.0
        for qt in timings:
            use = decide(qt.estimates, [qt.max_selectivity], th, 0).use_pruning
            total += qt.prune_seconds if use else qt.noprune_seconds
        key = (total, (t1, t2, t3))
        if best is None or key < best:
            best = key
    assert best is not None
    return Thresholds(*best[1]), best[0]


def tune_thresholds(
    templates: Sequence[QueryTemplate],
    evidence: Callable[[QueryTemplate], PlanDecision],
    run: Callable[[QueryTemplate, bool], float],
    repeats: int = 3,
) -> tuple[Thresholds, list[QueryTiming]]:
    """Grid-search thresholds on sample templates (median-of-``repeats`` timings)."""
    if not templates:
        log.warning("no sample templates; using default thresholds")
        return Thresholds(), []
    if len(templates) < 10:
        log.warning("tuning on only %d templates", len(templates))
    timings = []
    for t in templates:
        ev = evidence(t)
        prune, noprune = [], []
        for _ in range(repeats):
            prune.append(run(t, True))
            noprune.append(run(t, False))
        timings.append(
            QueryTiming(
                (ev.max_iterations, ev.est_joins),
                ev.max_selectivity,
                statistics.median(prune),
                statistics.median(noprune),
            )
        )
    th, _ = choose_thresholds(timings)
    return th, timings
