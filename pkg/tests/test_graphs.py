from itertools import chain, combinations

import pytest
from hypothesis import given, settings

from msindex import graphs
from msindex.graphs import (DegeneracyWitness, LeafClass, classify_all,
                            classify_leaf_scc, check_degeneracy_witness,
                            grounded_set, is_degenerated, is_grounded_digraph,
                            leaf_vertices, m_neighbors, predecessors,
                            scc_decompose, to_dot)
from msindex.model import build_graphs, simplify

from conftest import gp, simplified_graphs
from strategies import graph_pairs, instances


# --- independent oracles -------------------------------------------------

def closure(g):
    """Reachability by nonempty paths, via repeated relaxation."""
    reach = {v: set(g.out_neighbors(v)) for v in g.vertices()}
    changed = True
    while changed:
        changed = False
        for v in g.vertices():
            extra = set()
            for w in reach[v]:
                extra |= reach[w]
            if not extra <= reach[v]:
                reach[v] |= extra
                changed = True
    return reach


def brute_sccs(g):
    reach = closure(g)
    comps = []
    seen = set()
    for v in g.vertices():
        if v in seen:
            continue
        comp = {v} | {w for w in reach[v] if v in reach[w]}
        comps.append(frozenset(comp))
        seen |= comp
    return sorted(comps, key=min)


def powerset(items):
    items = list(items)
    return chain.from_iterable(combinations(items, r)
                               for r in range(len(items) + 1))


def brute_degenerated(g, scc):
    """Exhaustive search over all bipartitions and all cover subsets."""
    reach = closure(g)
    leaves = leaf_vertices(g)
    outside = sorted(set(g.vertices()) - scc)
    for part_t in powerset(sorted(scc)):
        part = frozenset(part_t)
        if not part or part == scc:
            continue
        rest = scc - part
        if any((i in part and j in rest) or (j in part and i in rest)
               for i, j in g.edges):
            continue
        nbrs = m_neighbors(g, part)
        for cover_t in powerset(outside):
            cover = frozenset(cover_t)
            if len(cover - leaves) > 1:
                continue
            if all(u in cover or any(z in reach[u] for z in cover)
                   for u in nbrs):
                return True
    return False


# --- scc decomposition ---------------------------------------------------

def test_scc_three_pairs(three_pairs):
    _, g = simplified_graphs(three_pairs)
    report = scc_decompose(g)
    assert report.sccs == [frozenset({1, 2}), frozenset({3, 4}),
                           frozenset({5, 6})]
    assert report.leaf_sccs == [0, 1, 2]


def test_scc_triangle(triangle):
    _, g = simplified_graphs(triangle)
    report = scc_decompose(g)
    assert [report.sccs[k] for k in report.leaf_sccs] == [frozenset({1, 2, 3})]


def test_scc_path_has_no_leaf_scc():
    report = scc_decompose(gp(3, arcs=[(1, 2), (2, 3)]))
    assert len(report.sccs) == 3
    assert report.leaf_sccs == []


@given(graph_pairs(max_n=7))
def test_scc_matches_brute_force(g):
    assert scc_decompose(g).sccs == brute_sccs(g)


@given(graph_pairs(max_n=7))
def test_leaf_sccs_contain_no_leaf_vertex(g):
    report = scc_decompose(g)
    leaves = leaf_vertices(g)
    for k in report.leaf_sccs:
        assert not report.sccs[k] & leaves


# --- predecessors and groundedness ---------------------------------------

def test_predecessors_path():
    assert predecessors(gp(3, arcs=[(1, 2), (2, 3)]), 3) == {1, 2}


def test_predecessors_cycle_includes_self(three_pairs):
    _, g = simplified_graphs(three_pairs)
    assert predecessors(g, 2) == {1, 2}


def test_predecessors_isolated():
    assert predecessors(gp(2, arcs=[]), 1) == frozenset()


@given(graph_pairs(max_n=6))
def test_predecessors_match_closure(g):
    reach = closure(g)
    for v in g.vertices():
        assert predecessors(g, v) == {u for u in g.vertices() if v in reach[u]}


def test_grounded_path_fully():
    assert grounded_set(gp(3, arcs=[(1, 2), (2, 3)])) == {1, 2, 3}


def test_grounded_three_pairs_empty(three_pairs):
    _, g = simplified_graphs(three_pairs)
    assert grounded_set(g) == frozenset()
    assert not is_grounded_digraph(g)


def test_grounded_after_removing_one_arc(three_pairs):
    _, g = simplified_graphs(three_pairs)
    cut = gp(6, arcs=set(g.arcs) - {(1, 2)}, edges=g.edges)
    assert grounded_set(cut) == {1, 2}


def test_grounded_empty_arcs():
    assert is_grounded_digraph(gp(4))


@given(graph_pairs(max_n=7))
def test_groundedness_criteria_agree(g):
    no_leaf_scc = not scc_decompose(g).leaf_sccs
    assert is_grounded_digraph(g) == no_leaf_scc
    assert (grounded_set(g) == frozenset(g.vertices())) == no_leaf_scc


# --- m-neighbors ----------------------------------------------------------

def test_m_neighbors_examples(three_pairs):
    _, g = simplified_graphs(three_pairs)
    assert m_neighbors(g, {1}) == {3, 5}
    assert m_neighbors(g, {2}) == {3, 4, 5, 6}
    assert m_neighbors(g, set(g.vertices())) == frozenset()


# --- classification -------------------------------------------------------

def test_classify_three_pairs_all_semi(three_pairs):
    _, g = simplified_graphs(three_pairs)
    report = classify_all(g)
    assert [report.classes[k] for k in report.leaf_sccs] == \
        [LeafClass.SEMI_NON_DEGENERATED] * 3


def test_classify_triangle_connected(triangle):
    _, g = simplified_graphs(triangle)
    cls, witness = classify_leaf_scc(g, frozenset({1, 2, 3}))
    assert cls is LeafClass.MESSAGE_CONNECTED
    assert witness is None


def test_classify_two_way_disconnected(two_way):
    _, g = simplified_graphs(two_way)
    cls, _ = classify_leaf_scc(g, frozenset({1, 2}))
    assert cls is LeafClass.MESSAGE_DISCONNECTED


def test_classify_rejects_non_leaf_scc(three_pairs):
    _, g = simplified_graphs(three_pairs)
    with pytest.raises(ValueError):
        classify_leaf_scc(g, frozenset({1, 3}))


def test_degeneracy_rejected_on_three_pairs(three_pairs):
    _, g = simplified_graphs(three_pairs)
    degen, witness = is_degenerated(g, frozenset({1, 2}))
    assert not degen and witness is None


def test_degeneracy_after_prune(three_pairs):
    # removing vertex 1's outgoing arcs makes {3,4} degenerated
    _, g = simplified_graphs(three_pairs)
    cut = gp(6, arcs=set(g.arcs) - {(1, 2)}, edges=g.edges)
    degen, witness = is_degenerated(cut, frozenset({3, 4}))
    assert degen
    assert witness.part == {3}
    assert witness.cover == {1, 5}
    assert not witness.vacuous


def test_degeneracy_single_leaf_cover():
    g = gp(3, arcs=[(1, 2), (2, 1)], edges=[(1, 3), (2, 3)])
    degen, witness = is_degenerated(g, frozenset({1, 2}))
    assert degen
    assert witness.part == {1}
    assert witness.cover == {3}


def test_is_degenerated_rejects_connected(triangle):
    _, g = simplified_graphs(triangle)
    with pytest.raises(ValueError):
        is_degenerated(g, frozenset({1, 2, 3}))


@settings(max_examples=60, deadline=None)
@given(graph_pairs(max_n=6))
def test_degeneracy_matches_brute_force(g):
    report = scc_decompose(g)
    for k in report.leaf_sccs:
        scc = report.sccs[k]
        if graphs.classify_without_degeneracy(g, scc) is not None:
            continue
        degen, witness = is_degenerated(g, scc)
        assert degen == brute_degenerated(g, scc)
        if degen:
            assert witness.vacuous or check_degeneracy_witness(g, scc, witness)


@settings(max_examples=40, deadline=None)
@given(graph_pairs(max_n=6))
def test_degeneracy_witness_monotone_in_leaves(g):
    report = scc_decompose(g)
    leaves = leaf_vertices(g)
    for k in report.leaf_sccs:
        scc = report.sccs[k]
        if graphs.classify_without_degeneracy(g, scc) is not None:
            continue
        degen, witness = is_degenerated(g, scc)
        if not degen or witness.vacuous:
            continue
        grown = DegeneracyWitness(witness.part,
                                  witness.cover | (leaves - scc))
        assert check_degeneracy_witness(g, scc, grown)


@given(instances(max_m=6))
def test_single_sender_leaf_sccs_all_connected(inst):
    merged = frozenset().union(*inst.senders)
    single = type(inst)(num_messages=inst.num_messages,
                        senders=(merged,), wants=inst.wants)
    simple, _ = simplify(single)
    g = build_graphs(simple)
    report = classify_all(g)
    for k in report.leaf_sccs:
        assert report.classes[k] is LeafClass.MESSAGE_CONNECTED


@given(instances(max_m=6))
def test_partitioned_senders_never_semi(inst):
    # rebuild the senders as a partition: each message to its first owner
    owner = {}
    for s, ms in enumerate(inst.senders):
        for msg in ms:
            owner.setdefault(msg, s)
    parts = [set() for _ in inst.senders]
    for msg, s in owner.items():
        parts[s].add(msg)
    split = type(inst)(num_messages=inst.num_messages,
                       senders=tuple(frozenset(p) for p in parts),
                       wants=inst.wants)
    simple, _ = simplify(split)
    report = classify_all(build_graphs(simple))
    for k in report.leaf_sccs:
        assert report.classes[k] in (LeafClass.MESSAGE_CONNECTED,
                                     LeafClass.MESSAGE_DISCONNECTED)


# --- dot export ------------------------------------------------------------

def test_dot_counts_three_pairs(three_pairs):
    _, g = simplified_graphs(three_pairs)
    dot = to_dot(g)
    lines = dot.splitlines()
    arcs = [l for l in lines if "->" in l and "color=red" not in l]
    reds = [l for l in lines if "color=red" in l]
    assert len(arcs) == 6
    assert len(reds) == 9
    assert dot.count("subgraph cluster_") == 3
    assert "SemiNonDegenerated" in dot


def test_dot_counts_two_way(two_way):
    _, g = simplified_graphs(two_way)
    dot = to_dot(g)
    lines = dot.splitlines()
    assert len([l for l in lines if "->" in l and "color=red" not in l]) == 2
    assert len([l for l in lines if "color=red" in l]) == 0


def test_dot_marks_dummies_dashed():
    g = gp(3, arcs=[(1, 2), (1, 3)])
    dot = to_dot(g, dummies=frozenset({3}))
    assert "3 [style=dashed];" in dot
