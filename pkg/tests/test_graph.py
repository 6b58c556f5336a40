import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vibstab.graph import (CyclicGraphError, DirectedGraph, NotStabilizableError,
                           bidirected_edges, bidirected_pairs, is_dag,
                           is_structurally_stabilizable, place_controls,
                           topological_permutation, unidirected_residual)
from vibstab.instances import example3_network, example4_network, random_dag_network
from vibstab.network import build_matrix


def g(n, *edges1):
    # 1-based edge literals for readability
    return DirectedGraph(n, frozenset((a - 1, b - 1) for a, b in edges1))


def has_cycle_bruteforce(G):
    for k in range(1, G.n + 1):
        for combo in itertools.permutations(range(G.n), k):
            if k >= 2 and all((combo[i], combo[(i + 1) % k]) in G.edges for i in range(k)):
                return True
    return False


def test_bidirected_examples():
    assert bidirected_edges(g(3, (1, 2), (2, 1), (2, 3))) == {(0, 1), (1, 0)}
    assert bidirected_edges(g(3, (1, 2), (2, 3))) == frozenset()
    tri = g(3, (1, 2), (2, 1), (2, 3), (3, 2), (1, 3), (3, 1))
    assert len(bidirected_edges(tri)) == 6
    assert unidirected_residual(tri).edges == frozenset()


def test_residual_examples():
    assert unidirected_residual(g(3, (1, 2), (2, 1), (2, 3))).edges == {(1, 2)}
    dag = g(4, (1, 2), (1, 3), (2, 3), (3, 4))
    assert unidirected_residual(dag) == dag


def test_is_dag_examples():
    assert is_dag(g(3, (1, 2), (2, 3))) == (True, [0, 1, 2])
    assert is_dag(g(2, (1, 2), (2, 1))) == (False, [0, 1])
    ok, order = is_dag(g(4, (1, 2), (1, 3), (2, 3), (3, 4)))
    pos = {v: k for k, v in enumerate(order)}
    assert ok and all(pos[a] < pos[b] for a, b in [(0, 1), (0, 2), (1, 2), (2, 3)])


def test_example4_residual_cycle():
    ok, _, witness = is_structurally_stabilizable(DirectedGraph.from_network(example4_network()))
    assert not ok
    assert witness == [0, 2, 3]  # 1 -> 3 -> 4 -> 1


def test_every_cycle_through_pair_is_stabilizable():
    # 1 <-> 2 plus 2 -> 3 -> 1: the only cycles use the pair
    G = g(3, (1, 2), (2, 1), (2, 3), (3, 1))
    assert has_cycle_bruteforce(G)
    assert is_structurally_stabilizable(G)[0]


def test_placement_example3():
    res = place_controls(DirectedGraph.from_network(example3_network()))
    assert res.control_set == {(2, 3), (0, 4)}  # 3 -> 4 and 1 -> 5
    assert res.kept_set == {(3, 2), (4, 0)}
    assert is_dag(res.final_graph)[0]
    assert res.to_dict()["control_set"] == [{"from": 1, "to": 5}, {"from": 3, "to": 4}]


def test_placement_without_pairs():
    G = g(3, (1, 2), (2, 3))
    res = place_controls(G)
    assert res.control_set == frozenset() and res.final_graph == G


def test_placement_tie_break():
    # residual 2 -> 3 admits either orientation of {1, 4}; a -> b is tried first
    G = g(4, (2, 3), (1, 4), (4, 1))
    res = place_controls(G)
    assert res.kept_set == {(0, 3)} and res.control_set == {(3, 0)}


def test_placement_raises_with_cycle():
    with pytest.raises(NotStabilizableError) as info:
        place_controls(DirectedGraph.from_network(example4_network()))
    assert info.value.cycle == [0, 2, 3]
    assert isinstance(info.value, CyclicGraphError)


def test_topological_permutation_cyclic():
    with pytest.raises(CyclicGraphError):
        topological_permutation(g(2, (1, 2), (2, 1)))


def test_topological_permutation_chain():
    G = g(3, (1, 2), (2, 3))
    M = np.array([[-1, 0, 0], [1, -1, 0], [0, 1, -1.0]])
    order = topological_permutation(G)
    assert not np.any(np.triu(M[np.ix_(order, order)], 1))


def test_topological_permutation_random(rng):
    for _ in range(20):
        sys = random_dag_network(rng, 8, density=0.5)
        M = build_matrix(sys)
        order = topological_permutation(DirectedGraph.from_network(sys))
        assert sorted(order) == list(range(8))
        assert not np.any(np.triu(M[np.ix_(order, order)], 1))


@st.composite
def graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    edges = draw(st.sets(st.sampled_from(pairs))) if pairs else set()
    return DirectedGraph(n, frozenset(edges))


@given(graphs())
def test_is_dag_matches_bruteforce(G):
    ok, witness = is_dag(G)
    assert ok == (not has_cycle_bruteforce(G))
    if ok:
        pos = {v: k for k, v in enumerate(witness)}
        assert all(pos[a] < pos[b] for a, b in G.edges)
    else:
        k = len(witness)
        assert all((witness[i], witness[(i + 1) % k]) in G.edges for i in range(k))
        assert witness[0] == min(witness)


@given(graphs())
def test_partition(G):
    res, bid = unidirected_residual(G).edges, bidirected_edges(G)
    assert res | bid == G.edges and not (res & bid)
    assert all(a < b for a, b in bidirected_pairs(G))


@given(graphs(max_n=7))
def test_placement_invariants(G):
    ok = is_structurally_stabilizable(G)[0]
    if not ok:
        with pytest.raises(NotStabilizableError):
            place_controls(G)
        return
    res = place_controls(G)
    assert is_dag(res.final_graph)[0]
    assert is_dag(DirectedGraph(G.n, res.control_set))[0]
    for a, b in bidirected_pairs(G):
        assert ((a, b) in res.kept_set) != ((b, a) in res.kept_set)
        assert ((a, b) in res.control_set) != ((b, a) in res.control_set)
    assert res.control_set | res.kept_set == bidirected_edges(G)
