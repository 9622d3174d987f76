import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import numpy as np

from conftest import chain, confounded_pair, two_node, instrument, random_net
from latentbn import graph


def ids(net, *names):
    return {net.id_of(n) for n in names}


def test_topological_order_examples():
    net = two_node()
    assert graph.topological_order(net) == [0, 1]
    net = chain()
    assert graph.topological_order(net) == [0, 1, 2]
    net = confounded_pair()
    assert graph.topological_order(net) == [net.id_of(n) for n in ("Y", "Z1", "Z2")]


def test_descendants_examples():
    net = two_node()
    assert graph.descendants(net, net.id_of("Y")) == ids(net, "Z")
    net = chain()
    assert graph.descendants(net, net.id_of("Z1")) == ids(net, "Z2")
    assert graph.descendants(net, net.id_of("Z2")) == set()
    with pytest.raises(KeyError):
        graph.descendants(net, 99)


def test_c_components_examples():
    net = two_node()
    assert graph.c_components(net) == [frozenset(ids(net, "Z"))]
    net = chain()
    # dropping Z1 -> Z2 leaves Z2 alone
    assert graph.c_components(net) == [frozenset(ids(net, "Z1")), frozenset(ids(net, "Z2"))]
    net = confounded_pair()
    assert graph.c_components(net) == [frozenset(ids(net, "Z1", "Z2"))]


def test_empirical_parents_examples():
    net = two_node()
    assert graph.empirical_parents(net, net.id_of("Z")) == set()
    net = chain()
    assert graph.empirical_parents(net, net.id_of("Z2")) == ids(net, "Z1")
    net = instrument()
    assert graph.empirical_parents(net, net.id_of("Z3")) == ids(net, "Z1", "Z2")
    assert graph.empirical_parents(net, net.id_of("Z2")) == ids(net, "Z1")
    with pytest.raises(ValueError):
        graph.empirical_parents(net, net.id_of("Y"))


def test_empirical_structure_examples():
    net = chain()
    assert graph.empirical_structure(net) == {net.id_of("Z1"): (), net.id_of("Z2"): (net.id_of("Z1"),)}
    net = confounded_pair()
    assert graph.empirical_structure(net) == {net.id_of("Z1"): (), net.id_of("Z2"): (net.id_of("Z1"),)}


def test_sibling_confounding_is_not_symmetric():
    # Y -> Z1, Y -> Z2 only: one c-component, but only the later node conditions on the earlier
    from latentbn.model import make_network

    net = make_network(
        {"Y": 2, "Z1": 2, "Z2": 2},
        {"Y": ([], [0.5, 0.5]), "Z1": (["Y"], [[0.5, 0.5], [0.5, 0.5]]), "Z2": (["Y"], [[0.5, 0.5], [0.5, 0.5]])},
    )
    assert graph.empirical_structure(net) == {1: (), 2: (1,)}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_partition_and_parent_set_properties(seed):
    rng = np.random.default_rng(seed)
    net = random_net(rng, max_roots=4, max_internal=6)
    blocks = graph.c_components(net)
    covered = [z for b in blocks for z in b]
    assert sorted(covered) == sorted(net.internal)
    assert len(covered) == len(set(covered))
    order = graph.topological_order(net)
    pos = {v: i for i, v in enumerate(order)}
    for v in net.variables:
        assert all(pos[p] < pos[v.id] for p in net.parents(v.id))
    for z in net.internal:
        w = graph.empirical_parents(net, z)
        assert z not in w
        assert all(net.parents(x) for x in w)
        assert not w & graph.descendants(net, z)
