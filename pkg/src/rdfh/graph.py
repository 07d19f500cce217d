"""In-memory RDF graph with an N-Triples reader/writer.

Nodes are dense integer ids in first-seen order. Every node carries exactly
one label; literal nodes are leaves (no outgoing edges), and an edge is an
*attribute* edge iff its object is a literal.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

__all__ = [
    "ParseError",
    "RdfGraph",
    "GraphBuilder",
    "Partition",
    "parse_ntriples",
    "serialize_ntriples",
    "classify",
]

log = logging.getLogger(__name__)

RESOURCE = 0
LITERAL = 1


class ParseError(ValueError):
    """Malformed N-Triples input; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class RdfGraph:
    labels: list[str] = field(default_factory=list)
    kinds: list[int] = field(default_factory=list)
    predicates: list[str] = field(default_factory=list)
    # (subject, predicate index, object), deduplicated, insertion order
    edges: list[tuple[int, int, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._finish()

    def _finish(self) -> None:
        n = len(self.labels)
        self.node_of = {label: i for i, label in enumerate(self.labels)}
        self.pred_of = {label: i for i, label in enumerate(self.predicates)}
        self.out_edges: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.in_edges: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for s, p, o in self.edges:
            self.out_edges[s].append((p, o))
            self.in_edges[o].append((p, s))
        # parallel edges collapse to one adjacency for traversal
        self.succ: list[tuple[int, ...]] = [
            tuple(sorted({o for _, o in adj})) for adj in self.out_edges
        ]
        self.pred: list[tuple[int, ...]] = [
            tuple(sorted({s for _, s in adj})) for adj in self.in_edges
        ]

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def is_literal(self, node: int) -> bool:
        return self.kinds[node] == LITERAL

    def is_attribute(self, edge: tuple[int, int, int]) -> bool:
        return self.kinds[edge[2]] == LITERAL

    def triples(self) -> Iterator[tuple[str, str, str]]:
        """Yield edges as (subject label, predicate label, object label)."""
        for s, p, o in self.edges:
            yield self.labels[s], self.predicates[p], self.labels[o]

    def out_degree(self, node: int) -> int:
        return len(self.out_edges[node])

    def in_degree(self, node: int) -> int:
        return len(self.in_edges[node])

    def __getstate__(self) -> dict:
        return {
            "labels": self.labels,
            "kinds": self.kinds,
            "predicates": self.predicates,
            "edges": self.edges,
        }

    def __setstate__(self, state: dict) -> None:
        self.__dict__.update(state)
        self._finish()


class GraphBuilder:
    """Accumulates triples and interns nodes/predicates by label."""

    def __init__(self) -> None:
        self.labels: list[str] = []
        self.kinds: list[int] = []
        self.node_of: dict[str, int] = {}
        self.predicates: list[str] = []
        self.pred_of: dict[str, int] = {}
        self.edges: list[tuple[int, int, int]] = []
        self._seen: set[tuple[int, int, int]] = set()

    def node(self, label: str, literal: bool = False) -> int:
        nid = self.node_of.get(label)
        if nid is None:
            nid = len(self.labels)
            self.node_of[label] = nid
            self.labels.append(label)
            self.kinds.append(LITERAL if literal else RESOURCE)
        elif not literal and self.kinds[nid] == LITERAL:
            # a label used both as IRI and literal is one node; it is a resource
            log.warning("label %r used as both literal and resource", label)
            self.kinds[nid] = RESOURCE
        return nid

    def add(self, subject: str, predicate: str, obj: str, literal: bool = False) -> bool:
        """Add a triple; returns False when it was a duplicate."""
        s = self.node(subject)
        o = self.node(obj, literal)
        p = self.pred_of.get(predicate)
        if p is None:
            p = self.pred_of[predicate] = len(self.predicates)
            self.predicates.append(predicate)
        key = (s, p, o)
        if key in self._seen:
            return False
        self._seen.add(key)
        self.edges.append(key)
        return True

    def build(self) -> RdfGraph:
        return RdfGraph(list(self.labels), list(self.kinds), list(self.predicates), list(self.edges))


def from_triples(triples: Iterable[tuple[str, str, str] | tuple[str, str, str, bool]]) -> RdfGraph:
    """Build a graph from (s, p, o[, object_is_literal]) label tuples."""
    b = GraphBuilder()
    for t in triples:
        b.add(*t)
    return b.build()


# --- N-Triples -------------------------------------------------------------

_IRI = r"<([^<>\"\s]*)>"
_BNODE = r"(_:[A-Za-z0-9_][A-Za-z0-9_.\-]*)"
_LITERAL = r'"((?:[^"\\\n\r]|\\.)*)"(?:\^\^' + _IRI + r"|@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*)?"

_SUBJECT_RE = re.compile(r"\s*(?:" + _IRI + "|" + _BNODE + ")")
_PREDICATE_RE = re.compile(r"\s*" + _IRI)
_OBJECT_RE = re.compile(r"\s*(?:" + _IRI + "|" + _BNODE + "|" + _LITERAL + ")")
_END_RE = re.compile(r"\s*\.\s*(?:#.*)?$")

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)")


def _unescape(text: str, lineno: int) -> str:
    if "\\" not in text:
        return text

    def repl(m: re.Match) -> str:
        g = m.group(1)
        if g[0] in "uU" and len(g) > 1:
            return chr(int(g[1:], 16))
        if g in _ESCAPES:
            return _ESCAPES[g]
        raise ParseError(lineno, f"invalid escape \\{g}")

    return _ESCAPE_RE.sub(repl, text)


def _parse_line(line: str, lineno: int) -> tuple[str, str, str, bool] | None:
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _SUBJECT_RE.match(line)
    if not m:
        raise ParseError(lineno, "expected IRI or blank node as subject")
    subject = _unescape(m.group(1), lineno) if m.group(1) is not None else m.group(2)
    pos = m.end()
    m = _PREDICATE_RE.match(line, pos)
    if not m:
        raise ParseError(lineno, "expected IRI as predicate")
    predicate = _unescape(m.group(1), lineno)
    pos = m.end()
    m = _OBJECT_RE.match(line, pos)
    if not m:
        raise ParseError(lineno, "expected IRI, blank node or literal as object")
    if m.group(1) is not None:
        obj, literal = _unescape(m.group(1), lineno), False
    elif m.group(2) is not None:
        obj, literal = m.group(2), False
    else:
        # datatype and language tags are dropped; only the lexical form is kept
        obj, literal = _unescape(m.group(3), lineno), True
    if not _END_RE.match(line, m.end()):
        raise ParseError(lineno, "expected ' .' after object")
    return subject, predicate, obj, literal


def parse_ntriples(source: str | Iterable[str]) -> RdfGraph:
    """Parse N-Triples text (a string or an iterable of lines)."""
    lines = source.splitlines() if isinstance(source, str) else source
    b = GraphBuilder()
    for lineno, line in enumerate(lines, 1):
        t = _parse_line(line, lineno)
        if t is not None:
            b.add(*t)
    return b.build()


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def _term(graph: RdfGraph, node: int) -> str:
    label = graph.labels[node]
    if graph.kinds[node] == LITERAL:
        return f'"{_escape(label)}"'
    if label.startswith("_:"):
        return label
    return f"<{label}>"


def serialize_ntriples(graph: RdfGraph) -> Iterator[str]:
    """Yield one N-Triples line (with trailing newline) per edge."""
    for s, p, o in graph.edges:
        yield f"{_term(graph, s)} <{graph.predicates[p]}> {_term(graph, o)} .\n"


# --- classification ----------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    resource_nodes: int
    literal_nodes: int
    relationship_edges: int
    attribute_edges: int

    def as_dict(self) -> dict[str, int]:
        return {
            "resource_nodes": self.resource_nodes,
            "literal_nodes": self.literal_nodes,
            "relationship_edges": self.relationship_edges,
            "attribute_edges": self.attribute_edges,
        }


def classify(graph: RdfGraph) -> Partition:
    literals = sum(graph.kinds)
    attributes = sum(1 for e in graph.edges if graph.kinds[e[2]] == LITERAL)
    return Partition(
        resource_nodes=graph.num_nodes - literals,
        literal_nodes=literals,
        relationship_edges=graph.num_edges - attributes,
        attribute_edges=attributes,
    )
