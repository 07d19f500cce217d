from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdfh.graph import from_triples
from rdfh.idmap import SortedLabels, build_idmap, lookup_prefix

G1_ORDER = ["Jiawei Han", "Philip S.Yu", "T1", "VLDB", "ex:a1", "ex:a2", "ex:p1", "ex:p2"]


def test_g1_ids_follow_bytewise_order(g1_idmap):
    assert g1_idmap.sorted_labels == G1_ORDER
    assert {label: g1_idmap.label_id[label] for label in G1_ORDER} == {label: i for i, label in enumerate(G1_ORDER)}


def test_ids_map_back_to_nodes(g1, g1_idmap):
    for ident, label in enumerate(G1_ORDER):
        node = g1_idmap.id_node[ident]
        assert g1.labels[node] == label
        assert g1_idmap.node_id[node] == ident


def test_single_node_graph():
    g = from_triples([("only", "p", "only")])
    assert build_idmap(g).label_id == {"only": 0}


def test_three_labels():
    labels = SortedLabels(["b", "a", "c"])
    assert labels.label_id == {"a": 0, "b": 1, "c": 2}


@pytest.mark.parametrize(
    ("prefix", "expected"),
    [("P", (1, 1)), ("ex:", (4, 7)), ("ex:p", (6, 7)), ("Philip S.Yu", (1, 1))],
)
def test_prefix_lookup_on_g1(g1_idmap, prefix, expected):
    iv = lookup_prefix(g1_idmap, prefix)
    assert (iv.lo, iv.hi) == expected


def test_prefix_without_match_is_empty(g1_idmap):
    iv = lookup_prefix(g1_idmap, "Z")
    assert iv.empty and len(iv) == 0


def test_empty_prefix_is_rejected(g1_idmap):
    with pytest.raises(ValueError):
        lookup_prefix(g1_idmap, "")


def test_order_is_utf8_bytewise():
    labels = ["z", "é", "Z", "a", "ÿ", "Ā", "😀", "￿"]
    got = SortedLabels(labels).sorted_labels
    assert got == sorted(labels, key=lambda s: s.encode("utf-8"))


label_text = st.text(alphabet="abcAB:é/01", min_size=1, max_size=6)


@settings(max_examples=200, deadline=None)
@given(st.sets(label_text, min_size=1, max_size=40), label_text)
def test_prefix_lookup_matches_brute_force(labels, prefix):
    sl = SortedLabels(labels)
    expected = {sl.label_id[label] for label in labels if label.startswith(prefix)}
    iv = sl.lookup_prefix(prefix)
    got = set(range(iv.lo, iv.hi + 1)) if not iv.empty else set()
    assert got == expected
    if expected:
        assert max(expected) - min(expected) + 1 == len(expected)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(label_text, label_text), min_size=1, max_size=20))
def test_build_is_deterministic(pairs):
    triples = [(a, "p", b) for a, b in pairs]
    one, two = build_idmap(from_triples(triples)), build_idmap(from_triples(list(reversed(triples))))
    assert one.sorted_labels == two.sorted_labels
    assert list(range(len(one))) == sorted(one.label_id.values())
