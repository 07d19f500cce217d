"""Label-to-ID map with IDs assigned in lexicographic label order.

Because IDs follow label order, every prefix keyword matches a contiguous
run of IDs, so a keyword lookup is two binary searches.
"""

from __future__ import annotations

from bisect import bisect_left
from collections.abc import Iterable
from dataclasses import dataclass

from rdfh.graph import RdfGraph

# Python compares str by code point, which is the same order as comparing the
# UTF-8 encodings byte by byte. U+10FFFF is a noncharacter, so it never occurs
# inside a label and works as an upper sentinel for prefix ranges.
_TOP = "\U0010ffff"


@dataclass(frozen=True)
class IdInterval:
    lo: int
    hi: int  # inclusive

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def __len__(self) -> int:
        return max(0, self.hi - self.lo + 1)

    def __contains__(self, ident: int) -> bool:
        return self.lo <= ident <= self.hi

    def intersects(self, other: "IdInterval") -> bool:
        return not (self.empty or other.empty) and self.lo <= other.hi and other.lo <= self.hi

    def contains_interval(self, other: "IdInterval") -> bool:
        return not other.empty and self.lo <= other.lo and other.hi <= self.hi


EMPTY = IdInterval(0, -1)


class SortedLabels:
    """Sorted, duplicate-free label list answering prefix lookups as ID intervals."""

    def __init__(self, labels: Iterable[str]):
        self.sorted_labels: list[str] = sorted(set(labels))
        self.label_id: dict[str, int] = {label: i for i, label in enumerate(self.sorted_labels)}

    def __len__(self) -> int:
        return len(self.sorted_labels)

    def lookup_prefix(self, prefix: str) -> IdInterval:
        if not prefix:
            raise ValueError("prefix must be non-empty")
        keys = self.sorted_labels
        lo = bisect_left(keys, prefix)
        hi = bisect_left(keys, prefix + _TOP, lo) - 1
        return IdInterval(lo, hi) if lo <= hi else EMPTY

    def all(self) -> IdInterval:
        return IdInterval(0, len(self.sorted_labels) - 1) if self.sorted_labels else EMPTY


class IdMap(SortedLabels):
    """Bijection between node labels and IDs ``0..N-1`` in label order."""

    def __init__(self, graph: RdfGraph):
        super().__init__(graph.labels)
        # node ids <-> label ids
        self.id_node: list[int] = [graph.node_of[label] for label in self.sorted_labels]
        self.node_id: list[int] = [0] * len(self.id_node)
        for ident, node in enumerate(self.id_node):
            self.node_id[node] = ident

    def nodes_in(self, interval: IdInterval) -> list[int]:
        if interval.empty:
            return []
        return self.id_node[interval.lo : interval.hi + 1]


def build_idmap(graph: RdfGraph) -> IdMap:
    return IdMap(graph)


def build_predicate_map(graph: RdfGraph) -> SortedLabels:
    """Prefix lookup over predicate labels (predicates are edge labels, not IdMap nodes)."""
    return SortedLabels(graph.predicates)


def lookup_prefix(idmap: SortedLabels, prefix: str) -> IdInterval:
    return idmap.lookup_prefix(prefix)
