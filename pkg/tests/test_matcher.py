from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import bfs_dist, brute_force_matches, random_graph, random_template
from rdfh.graph import from_triples
from rdfh.idmap import build_idmap, build_predicate_map
from rdfh.matcher import (
    CandidateSet,
    Connectivity,
    DTree,
    MatchContext,
    build_keyword_profile,
    candidate_sets,
    decompose_dtrees,
    enumerate_shortest_paths,
    generate_dtree_candidates,
    join_candidates,
    join_order,
    match_template,
    neighborhood_check,
    order_connection_edges,
    prune_candidates,
)
from rdfh.ni_index import build_ni_index, build_vc_ni_index
from rdfh.query import ConnectionEdge, PredicateEdge, QueryNode, QueryTemplate, split_components


def context(graph, d_max=3, vc=False):
    im = build_idmap(graph)
    ix = build_vc_ni_index(graph, im) if vc else build_ni_index(graph, im, d_max)
    return MatchContext(graph, im, build_predicate_map(graph), ix)


def template(nodes, edges=(), conns=()):
    return QueryTemplate(
        tuple(QueryNode(f"q{i}", kw) for i, kw in enumerate(nodes)),
        tuple(PredicateEdge(*e) for e in edges),
        tuple(ConnectionEdge(*c) for c in conns),
    )


def labels(graph, nodes):
    return sorted(graph.labels[n] for n in nodes)


@pytest.fixture(scope="module")
def g1_ctx(g1):
    return context(g1, d_max=2)


# --- candidates and profiles ------------------------------------------------------


def test_candidate_sets_on_g1(g1, g1_ctx, g1_query):
    cands = candidate_sets(g1_ctx, g1_query)
    assert [labels(g1, c.nodes) for c in cands] == [["ex:p1", "ex:p2"], ["VLDB"], ["Philip S.Yu"]]


def test_wildcard_subject_excludes_literals(g1, g1_ctx):
    t = template([None, None], [(0, "ex:title", 1)])
    subj, obj = candidate_sets(g1_ctx, t)
    assert len(obj) == g1.num_nodes
    assert labels(g1, subj.nodes) == ["ex:a1", "ex:a2", "ex:p1", "ex:p2"]


def test_profile_counts_repeated_keywords():
    t = template(["x", "Paper", "Paper"], [(0, "p", 1), (0, "p", 2)])
    assert build_keyword_profile(0, t, 1) == {"Paper": [(1, 2)]}


def test_profile_absorbs_longer_keywords():
    t = template(["x", "Pa", "Paper"], [(0, "p", 1), (0, "p", 2)])
    prof = build_keyword_profile(0, t, 1)
    assert prof == {"Pa": [(1, 2)], "Paper": [(1, 1)]}


def test_profile_uses_signed_distances(g1_query):
    assert build_keyword_profile(0, g1_query, 1) == {"VLDB": [(1, 1)]}
    assert build_keyword_profile(1, g1_query, 1) == {"ex:p": [(-1, 1)]}
    # connection edges and wildcard neighbors contribute nothing
    assert build_keyword_profile(2, g1_query, 2) == {}


def test_profile_counts_are_cumulative_over_hops():
    t = template(["r", "a", "ab"], [(0, "p", 1), (1, "p", 2)])
    assert build_keyword_profile(0, t, 2) == {"a": [(1, 1), (2, 2)], "ab": [(2, 1)]}
    assert build_keyword_profile(0, t, 1) == {"a": [(1, 1)]}


def test_neighborhood_check_on_g1(g1, g1_ctx, g1_query):
    prof = build_keyword_profile(0, g1_query, 1)
    intervals = {kw: g1_ctx.keyword_interval(kw) for kw in prof}
    assert neighborhood_check(g1.node_of["ex:p1"], prof, g1_ctx.index, intervals)
    assert not neighborhood_check(g1.node_of["ex:p2"], prof, g1_ctx.index, intervals)


def test_two_hop_neighborhood_check_on_g1(g1, g1_ctx):
    prof = {"VLDB": [(1, 1)], "Philip": [(2, 1)]}
    intervals = {kw: g1_ctx.keyword_interval(kw) for kw in prof}
    assert neighborhood_check(g1.node_of["ex:p1"], prof, g1_ctx.index, intervals)
    assert not neighborhood_check(g1.node_of["ex:p2"], prof, g1_ctx.index, intervals)


def test_pruning_on_g1(g1, g1_ctx, g1_query):
    pruned, checks = prune_candidates(g1_ctx, g1_query, candidate_sets(g1_ctx, g1_query), 1)
    assert labels(g1, pruned[0].nodes) == ["ex:p1"]
    assert checks == 3


# --- D-trees and joins --------------------------------------------------------


def test_decompose_star_roots_the_rare_leaf_first():
    t = template(["c", "a", "b", "d"], [(0, "p", 1), (0, "p", 2), (0, "p", 3)])
    comp = split_components(t).components[0]
    assert decompose_dtrees(t, comp, [10, 1, 1, 1]) == [DTree(1, (0,)), DTree(0, (1, 2))]


def test_decompose_balanced_star_is_one_dtree():
    t = template(["a", "b", "c"], [(0, "p", 1), (0, "p", 2)])
    comp = split_components(t).components[0]
    assert decompose_dtrees(t, comp, [2, 1, 1]) == [DTree(0, (0, 1))]


def test_decompose_path():
    t = template(["a", "b", "c"], [(0, "p", 1), (1, "p", 2)])
    comp = split_components(t).components[0]
    assert decompose_dtrees(t, comp, [1, 100, 1]) == [DTree(0, (0,)), DTree(1, (1,))]
    assert decompose_dtrees(t, comp, [100, 1, 100]) == [DTree(1, (0, 1))]
    # equal S everywhere: the first edge wins and both its ends root a D-tree
    assert decompose_dtrees(t, comp, [1, 2, 1]) == [DTree(0, (0,)), DTree(1, (1,))]


def test_single_edge_dtree_on_g1(g1, g1_ctx):
    t = template(["ex:p", "VLDB"], [(0, "ex:booktitle", 1)])
    cs, _ = generate_dtree_candidates(g1_ctx, t, DTree(0, (0,)), candidate_sets(g1_ctx, t))
    assert [tuple(g1.labels[n] for n in row) for row in cs.rows] == [("ex:p1", "VLDB")]


def test_generate_dtree_candidates_on_g1(g1, g1_ctx):
    t = template(["ex:p", "ex:a", None], [(0, "ex:author", 1), (0, "ex:title", 2)])
    cs, iterations = generate_dtree_candidates(g1_ctx, t, DTree(0, (0, 1)), candidate_sets(g1_ctx, t))
    assert cs.schema == (0, 1, 2)
    assert [tuple(g1.labels[n] for n in row) for row in cs.rows] == [("ex:p1", "ex:a1", "T1")]
    assert iterations == 2


def test_join_order_prefers_small_connected_sets():
    order, flagged = join_order([100, 3, 10], [{0, 1}, {2, 3}, {1, 2}])
    assert order == [1, 2, 0] and not flagged
    order, flagged = join_order([1, 2], [{0}, {1}])
    assert order == [0, 1] and flagged


def test_join_is_natural_and_injective():
    a = CandidateSet((0, 1), [(1, 2), (3, 4)])
    b = CandidateSet((1, 2), [(2, 5), (2, 1), (4, 9)])
    out = join_candidates(a, b)
    assert out.schema == (0, 1, 2)
    assert out.rows == [(1, 2, 5), (3, 4, 9)]
    with pytest.raises(ValueError):
        join_candidates(a, CandidateSet((5,), [(1,)]))


def test_join_on_g1(g1):
    p1, a1, vldb = (g1.node_of[x] for x in ("ex:p1", "ex:a1", "VLDB"))
    out = join_candidates(CandidateSet((0, 1), [(p1, a1)]), CandidateSet((0, 2), [(p1, vldb)]))
    assert out.schema == (0, 1, 2) and out.rows == [(p1, a1, vldb)]


# --- connections ------------------------------------------------------------


@pytest.mark.parametrize("variant", ["d1", "d2", "d3", "vc"])
def test_connectivity_on_g1(g1, variant):
    ctx = context(g1, vc=True) if variant == "vc" else context(g1, int(variant[1]))
    conn = Connectivity(ctx.index, ctx.idmap)
    p2, philip = g1.node_of["ex:p2"], g1.node_of["Philip S.Yu"]
    assert conn.check(p2, philip, 4)
    assert conn.check(p2, philip, 3)
    assert not conn.check(p2, philip, 2)
    assert not conn.check(philip, p2, 6)
    assert conn.check(p2, p2, 1)


def test_connection_edge_order():
    t = template(
        ["a", "b", "c", "d"],
        [(0, "p", 1)],
        [(1, 0, 3), (1, 2, 3), (2, 3, 3)],
    )
    split = split_components(t)
    assert [c.nodes for c in split.components] == [(0, 1), (2,), (3,)]
    assert order_connection_edges(t, split, [50, 4, 2]) == [2, 1, 0]
    assert order_connection_edges(t, split, [50, 4, 2], invert=True) == [0, 2, 1]


def test_connection_edge_order_by_size_product():
    t = template(
        ["a", "b", "c", "d"],
        [(0, "p", 1)],
        [(0, 1, 3), (0, 2, 3), (1, 3, 3)],
    )
    split = split_components(t)
    assert order_connection_edges(t, split, [50, 4, 2]) == [2, 1, 0]


def test_shortest_paths_on_g1(g1):
    p2, philip = g1.node_of["ex:p2"], g1.node_of["Philip S.Yu"]
    paths, truncated = enumerate_shortest_paths(p2, philip, 4, g1)
    assert [[g1.labels[n] for n in p] for p in paths] == [["ex:p2", "ex:p1", "ex:a1", "Philip S.Yu"]]
    assert not truncated
    assert enumerate_shortest_paths(p2, philip, 2, g1) == ([], False)
    assert enumerate_shortest_paths(p2, p2, 1, g1) == ([[p2]], False)


def test_shortest_paths_in_a_diamond():
    g = from_triples([("a", "p", "b"), ("a", "p", "c"), ("b", "p", "d"), ("c", "p", "d"), ("a", "p", "x"), ("x", "p", "y"), ("y", "p", "d")])
    a, d = g.node_of["a"], g.node_of["d"]
    paths, _ = enumerate_shortest_paths(a, d, 2, g)
    assert [[g.labels[n] for n in p] for p in paths] == [["a", "b", "d"], ["a", "c", "d"]]
    paths, _ = enumerate_shortest_paths(a, d, 5, g)
    assert [[g.labels[n] for n in p] for p in paths] == [["a", "b", "d"], ["a", "c", "d"]]
    paths, truncated = enumerate_shortest_paths(a, d, 5, g, limit=1)
    assert len(paths) == 1 and truncated


# --- whole templates ----------------------------------------------------------


@pytest.mark.parametrize("pruning", [False, True])
def test_match_g1_template(g1, g1_ctx, g1_query, pruning):
    results = match_template(g1_ctx, g1_query, use_pruning=pruning)
    assert [tuple(g1.labels[n] for n in r.binding) for r in results] == [("ex:p1", "VLDB", "Philip S.Yu")]


def test_unmatched_keyword_gives_no_results(g1_ctx):
    assert match_template(g1_ctx, template(["ZZZ"])) == []
    assert match_template(g1_ctx, template(["ex:p", "ZZZ"], [(0, None, 1)]), use_pruning=True) == []


def test_paths_are_instantiated(g1, g1_ctx, g1_query):
    (res,) = match_template(g1_ctx, g1_query, instantiate_paths=True)
    assert [[g1.labels[n] for n in p] for p in res.paths[0]] == [["ex:p1", "ex:a1", "Philip S.Yu"]]


def test_undirected_connection_accepts_either_direction(g1_ctx, g1):
    t = template(["Philip", "ex:p2"], conns=[(0, 1, 3, False)])
    assert len(match_template(g1_ctx, t)) == 1
    t = template(["Philip", "ex:p2"], conns=[(0, 1, 3, True)])
    assert match_template(g1_ctx, t) == []


def test_matches_are_injective():
    g = from_triples([("a", "p", "a")])
    assert match_template(context(g), template(["a", "a"], [(0, "p", 1)])) == []
    assert len(match_template(context(g), template(["a"], [(0, "p", 0)]))) == 1


# --- properties ---------------------------------------------------------------


def instance(seed):
    rng = random.Random(seed)
    g = random_graph(rng, max_nodes=25)
    return g, random_template(rng, g, max_size=5, max_dc=4)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["d1", "d2", "d3", "vc"]))
def test_matches_equal_brute_force(seed, variant):
    g, t = instance(seed)
    ctx = context(g, vc=True) if variant == "vc" else context(g, int(variant[1]))
    expected = brute_force_matches(g, t)
    for pruning in (False, True):
        got = [r.binding for r in match_template(ctx, t, use_pruning=pruning)]
        assert len(got) == len(set(got))
        assert set(got) == expected


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_pruning_is_sound_and_monotone_in_hops(seed):
    g, t = instance(seed)
    ctx = context(g, d_max=3)
    cands = candidate_sets(ctx, t)
    matches = brute_force_matches(g, t)
    previous = None
    for k in (1, 2, 3):
        pruned, _ = prune_candidates(ctx, t, cands, k)
        for q, cs in enumerate(pruned):
            assert set(cs.nodes) <= set(cands[q].nodes)
            assert {m[q] for m in matches} <= set(cs.nodes)
            if previous is not None:
                assert set(cs.nodes) <= set(previous[q].nodes)
        previous = pruned


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.lists(st.integers(0, 50), min_size=8, max_size=8))
def test_decomposition_partitions_component_edges(seed, sizes):
    _, t = instance(seed)
    for comp in split_components(t).components:
        dtrees = decompose_dtrees(t, comp, sizes[: len(t.nodes)] + [1] * len(t.nodes))
        edges = [i for d in dtrees for i in d.edges]
        assert sorted(edges) == sorted(comp.edges)
        for d in dtrees:
            assert all(d.root in (t.edges[i].source, t.edges[i].target) for i in d.edges)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_connectivity_equals_bfs(seed, d_c):
    g = random_graph(random.Random(seed), max_nodes=30)
    for ctx in (context(g, 1), context(g, 2), context(g, vc=True)):
        conn = Connectivity(ctx.index, ctx.idmap)
        for a in range(g.num_nodes):
            dist = bfs_dist(g, a, True, d_c)
            for b in range(g.num_nodes):
                assert conn.check(a, b, d_c) == (b in dist)
