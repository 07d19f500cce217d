"""Dataset characteristics that hint at how much neighborhood pruning can help.

* coherence: coverage-weighted structuredness of predicates over same-type
  resources (1.0 = every instance of a type carries every predicate of it);
* relationship specialty: occurrence-weighted Pearson kurtosis of how many
  times each resource uses each relationship predicate;
* literal diversity: number of distinct words in a sample of literals.

High coherence, low specialty and low diversity predict little benefit.
"""

from __future__ import annotations

import random
import re
from collections import Counter, defaultdict
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

from rdfh.graph import LITERAL, RdfGraph

DEFAULT_SAMPLE = 100_000

# prediction cut-offs, reported alongside the label
COHERENCE_CUTOFF = 0.9
SPECIALTY_CUTOFF = 3.0
DIVERSITY_RATIO_CUTOFF = 0.01

_TOKEN_SPLIT = re.compile(r"[\s!-/:-@\[-`{-~]+")


def pearson_kurtosis(values: Sequence[float]) -> float:
    """Non-excess kurtosis m4 / m2**2 with population moments; 1.0 for constant input."""
    n = len(values)
    if n == 0:
        raise ValueError("kurtosis of an empty sample")
    mean = sum(values) / n
    m2 = sum((x - mean) ** 2 for x in values) / n
    if m2 == 0:
        return 1.0
    m4 = sum((x - mean) ** 4 for x in values) / n
    return m4 / (m2 * m2)


def relationship_specialty(
    graph: RdfGraph, side: str = "subject", include_zero: bool = False
) -> tuple[float | None, dict[str, dict]]:
    """RS(D) and a per-predicate table.

    ``side`` picks whose usage is counted ("subject", "object" or "both");
    ``include_zero`` adds resources that never use the predicate as zeros.
    """
    if side not in ("subject", "object", "both"):
        raise ValueError(f"bad side {side!r}")
    per_pred: dict[int, Counter] = defaultdict(Counter)
    occurrences: Counter = Counter()
    kinds = graph.kinds
    for s, p, o in graph.edges:
        if kinds[o] == LITERAL:
            continue
        occurrences[p] += 1
        if side in ("subject", "both"):
            per_pred[p][s] += 1
        if side in ("object", "both"):
            per_pred[p][o] += 1
    if not occurrences:
        return None, {}
    n_resources = sum(1 for k in kinds if k != LITERAL)
    total = sum(occurrences.values())
    table = {}
    rs = 0.0
    for p in sorted(occurrences, key=lambda i: graph.predicates[i]):
        dist = list(per_pred[p].values())
        if include_zero:
            dist.extend([0] * (n_resources - len(dist)))
        k = pearson_kurtosis(dist)
        table[graph.predicates[p]] = {"occurrences": occurrences[p], "nodes": len(per_pred[p]), "kurtosis": k}
        rs += occurrences[p] / total * k
    return rs, table


def _is_type_predicate(label: str) -> bool:
    return label.endswith("type")


def coherence(graph: RdfGraph) -> tuple[float | None, dict[str, dict]]:
    """Weighted type coverage; types come from ``*type`` edges, else predicate signatures."""
    type_preds = {i for i, label in enumerate(graph.predicates) if _is_type_predicate(label)}
    props: dict[int, set[int]] = defaultdict(set)
    types: dict[int, set[str]] = defaultdict(set)
    kinds = graph.kinds
    for s, p, o in graph.edges:
        if p in type_preds:
            types[s].add(graph.labels[o])
        else:
            props[s].add(p)
    instances: dict[str, list[int]] = defaultdict(list)
    for node in range(graph.num_nodes):
        if kinds[node] == LITERAL:
            continue
        if types[node]:
            for t in types[node]:
                instances[t].append(node)
        elif props[node]:
            sig = "|".join(sorted(graph.predicates[p] for p in props[node]))
            instances[f"signature:{sig}"].append(node)
    table = {}
    for t, members in instances.items():
        pset: set[int] = set()
        for node in members:
            pset |= props[node]
        if not pset:
            continue
        have = sum(len(props[node]) for node in members)
        table[t] = {
            "instances": len(members),
            "predicates": len(pset),
            "coverage": have / (len(pset) * len(members)),
        }
    if not table:
        return None, {}
    weight_total = sum(row["instances"] + row["predicates"] for row in table.values())
    value = 0.0
    for row in table.values():
        row["weight"] = (row["instances"] + row["predicates"]) / weight_total
        value += row["weight"] * row["coverage"]
    return value, dict(sorted(table.items()))


def tokenize(text: str) -> list[str]:
    return [tok for tok in _TOKEN_SPLIT.split(text.casefold()) if tok]


def literal_diversity(graph: RdfGraph, sample: int = DEFAULT_SAMPLE, seed: int = 0) -> tuple[int, int]:
    """(distinct words, sample size) over literals of uniformly sampled attribute edges."""
    if sample < 1:
        raise ValueError("sample size must be >= 1")
    attr = [o for _, _, o in graph.edges if graph.kinds[o] == LITERAL]
    if not attr:
        return 0, 0
    picked = random.Random(seed).sample(attr, min(sample, len(attr)))
    words: set[str] = set()
    for o in picked:
        words.update(tokenize(graph.labels[o]))
    return len(words), len(picked)


@dataclass
class MetricsReport:
    coherence: float | None
    specialty: float | None
    diversity: int
    sample_size: int
    kurtosis: dict[str, dict] = field(default_factory=dict)
    coverage: dict[str, dict] = field(default_factory=dict)
    expected_benefit: str = "low"
    criteria: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def predict_benefit(coh: float | None, spec: float | None, diversity: int, sample_size: int) -> tuple[str, dict]:
    signals = {
        "low_coherence": coh is not None and coh < COHERENCE_CUTOFF,
        "high_specialty": spec is not None and spec > SPECIALTY_CUTOFF,
        "high_diversity": sample_size > 0 and diversity / sample_size >= DIVERSITY_RATIO_CUTOFF,
    }
    hits = sum(signals.values())
    label = "low" if hits == 0 else ("high" if hits == 3 else "medium")
    criteria = {
        "coherence_below": COHERENCE_CUTOFF,
        "specialty_above": SPECIALTY_CUTOFF,
        "words_per_sampled_literal_at_least": DIVERSITY_RATIO_CUTOFF,
        "signals": signals,
        "rule": "low: no signal, medium: one or two signals, high: all three",
    }
    return label, criteria


def profile(
    graph: RdfGraph, sample: int = DEFAULT_SAMPLE, seed: int = 0, side: str = "subject", include_zero: bool = False
) -> MetricsReport:
    coh, cov = coherence(graph)
    spec, kurt = relationship_specialty(graph, side, include_zero)
    words, size = literal_diversity(graph, sample, seed)
    label, criteria = predict_benefit(coh, spec, words, size)
    return MetricsReport(coh, spec, words, size, kurt, cov, label, criteria)
