from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import brute_force_matches, random_graph
from rdfh import synthetic
from rdfh.graph import LITERAL, GraphBuilder, from_triples
from rdfh.idmap import SortedLabels, build_idmap
from rdfh.query import dump_query, parse_query
from rdfh.workload import GenConfig, generalize_keyword, generate_query, strip_uri_id


@pytest.mark.parametrize(
    ("label", "expected"),
    [
        ("http://ex.org/Person123", "http://ex.org/Person"),
        ("ex:paper_42", "ex:paper"),
        ("http://ex.org/a#Dept-7", "http://ex.org/a#Dept"),
        ("ex:Thing", "ex:Thing"),
        ("ex:123", "ex:123"),
        ("plain99", "plain"),
        ("http://ex.org/v1.2", "http://ex.org/v1"),
    ],
)
def test_strip_uri_id(label, expected):
    assert strip_uri_id(label) == expected


def test_resource_keywords_drop_the_id():
    labels = SortedLabels(["ex:p1", "ex:p2"])
    assert generalize_keyword("ex:p17", False, labels, random.Random(0)) == "ex:p"


def test_g1_keywords(g1_idmap):
    assert generalize_keyword("ex:p1", False, g1_idmap, random.Random(0)) == "ex:p"
    picks = {generalize_keyword("Philip S.Yu", True, g1_idmap, random.Random(s)) for s in range(200)}
    assert picks <= {"Philip S.Yu"[:n] for n in range(1, 12)}
    assert len(picks) > 5


def test_literal_keyword_lands_in_the_band():
    labels = SortedLabels(["alpha", "alps", "beta", "alpine"])
    kw = generalize_keyword("alpha", True, labels, random.Random(0), (1, 1))
    assert kw in ("alph", "alpha")
    kw = generalize_keyword("alpha", True, labels, random.Random(0), (3, 3))
    assert kw in ("a", "al", "alp")
    assert len(labels.lookup_prefix(kw)) == 3


def test_literal_keyword_without_band_prefix():
    labels = SortedLabels(["aa", "ab", "ac"])
    # no prefix of "aa" matches exactly 2 labels, so the shortest prefix under the cap wins
    assert generalize_keyword("aa", True, labels, random.Random(0), (2, 2)) == "aa"
    labels = SortedLabels(["x1", "x2", "x3"])
    assert generalize_keyword("x1", True, labels, random.Random(0), (4, 4)) == "x"


def test_g1_template_contains_its_origin(g1, g1_idmap):
    t, origin = generate_query(g1, GenConfig(size=3, seed=1), g1_idmap)
    assert len(t.nodes) == 3 and len(t.edges) == 2 and len(set(origin)) == 3
    assert origin in brute_force_matches(g1, t)


def test_single_node_template(g1):
    t, origin = generate_query(g1, GenConfig(size=1, seed=0))
    assert len(t.nodes) == 1 and not t.edges and not t.connections
    assert origin in brute_force_matches(g1, t)


def test_connection_probability_zero_and_one(g1):
    t, _ = generate_query(g1, GenConfig(size=4, seed=2))
    assert not t.connections and len(t.edges) == 3
    t, origin = generate_query(g1, GenConfig(size=4, seed=2, connection_edge_prob=1.0, connection_distance=(2, 2)))
    assert not t.edges and len(t.connections) == 3
    assert all(c.max_distance == 2 and c.directed for c in t.connections)
    assert origin in brute_force_matches(g1, t)


def test_generation_is_deterministic():
    g = synthetic.regular_graph(universities=1, departments=3)
    cfg = GenConfig(size=5, seed=11, connection_edge_prob=0.3)
    first, second = generate_query(g, cfg), generate_query(g, cfg)
    assert dump_query(first[0]) == dump_query(second[0])
    assert first[1] == second[1]
    assert parse_query(dump_query(first[0])) == first[0]


def test_impossible_requests_are_errors():
    with pytest.raises(ValueError):
        GenConfig(size=0)
    with pytest.raises(ValueError):
        GenConfig(match_cap=(5, 2))
    with pytest.raises(ValueError):
        GenConfig(connection_edge_prob=1.5)
    with pytest.raises(ValueError):
        GenConfig(connection_distance=(0, 2))
    b = GraphBuilder()
    b.node("alone")
    with pytest.raises(ValueError):
        generate_query(b.build(), GenConfig(size=2))
    with pytest.raises(ValueError):
        generate_query(from_triples([("a", "p", "b")]), GenConfig(size=3))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5), st.sampled_from([(1, 1), (1, 3), (2, 10)]))
def test_generated_templates_match_their_origin_and_respect_the_band(seed, size, band):
    rng = random.Random(seed)
    g = random_graph(rng, max_nodes=25)
    im = build_idmap(g)
    try:
        t, origin = generate_query(g, GenConfig(size=size, seed=seed, match_cap=band, connection_edge_prob=0.3), im)
    except ValueError:
        return
    assert len(t.nodes) == size
    assert origin in brute_force_matches(g, t)
    for q, v in zip(t.nodes, origin):
        if g.kinds[v] != LITERAL or q.keyword is None:
            continue
        assert g.labels[v].startswith(q.keyword)
        counts = [len(im.lookup_prefix(g.labels[v][:n])) for n in range(1, len(g.labels[v]) + 1)]
        if any(band[0] <= c <= band[1] for c in counts):
            assert band[0] <= len(im.lookup_prefix(q.keyword)) <= band[1]
