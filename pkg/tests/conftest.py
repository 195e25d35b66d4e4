import pytest

from msindex.model import (GraphPair, build_graphs, edge_key, parse_instance,
                           simplify)


def make_instance(m, senders, wants):
    return parse_instance({
        "num_messages": m,
        "senders": [sorted(s) for s in senders],
        "wants": [sorted(w) for w in wants],
    })


def gp(n, arcs=(), edges=()):
    return GraphPair(n=n,
                     arcs=frozenset(tuple(a) for a in arcs),
                     edges=frozenset(edge_key(*e) for e in edges))


def simplified_graphs(inst):
    simple, _ = simplify(inst)
    return simple, build_graphs(simple)


@pytest.fixture
def three_pairs():
    """Six receivers in three 2-cycles; four senders own overlapping triples."""
    return make_instance(
        6,
        senders=[{1, 3, 5}, {2, 3, 5}, {2, 4, 5}, {2, 4, 6}],
        wants=[{2}, {1}, {4}, {3}, {6}, {5}])


@pytest.fixture
def triangle():
    """One 3-cycle of wants, a single sender owning everything."""
    return make_instance(3, senders=[{1, 2, 3}], wants=[{3}, {1}, {2}])


@pytest.fixture
def two_way():
    """Two receivers swapping messages, each message at its own sender."""
    return make_instance(2, senders=[{1}, {2}], wants=[{2}, {1}])
