"""Graph machinery: bidirected pairs, unidirected residual, DAG tests and
control placement.

Edges are ``(src, dst)`` tuples of 0-based node ids.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DirectedGraph",
    "PlacementResult",
    "NotStabilizableError",
    "CyclicGraphError",
    "bidirected_edges",
    "bidirected_pairs",
    "unidirected_residual",
    "is_dag",
    "is_structurally_stabilizable",
    "place_controls",
    "topological_permutation",
]


class CyclicGraphError(ValueError):
    """Raised when an operation needs a DAG; ``cycle`` holds the witness."""

    def __init__(self, message, cycle):
        super().__init__(message)
        self.cycle = list(cycle)


class NotStabilizableError(CyclicGraphError):
    """The unidirected residual has a directed cycle."""


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset((int(a), int(b)) for a, b in self.edges))
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        for a, b in self.edges:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a}, {b}) outside 0..{self.n - 1}")
            if a == b:
                raise ValueError(f"self-loop on node {a}")

    @classmethod
    def from_network(cls, sys) -> DirectedGraph:
        return cls(sys.n, sys.edge_set)

    @classmethod
    def from_matrix(cls, M, tol=0.0) -> DirectedGraph:
        """Edges ``j -> i`` for every off-diagonal ``|M[i, j]| > tol``."""
        M = np.asarray(M)
        n = M.shape[0]
        return cls(n, frozenset((j, i) for i in range(n) for j in range(n)
                                if i != j and abs(M[i, j]) > tol))

    def with_edges(self, extra) -> DirectedGraph:
        return DirectedGraph(self.n, self.edges | frozenset(extra))

    def predecessors(self) -> dict[int, list[int]]:
        preds = {v: [] for v in range(self.n)}
        for a, b in sorted(self.edges):
            preds[b].append(a)
        return preds


def bidirected_edges(G: DirectedGraph) -> frozenset[tuple[int, int]]:
    return frozenset(e for e in G.edges if (e[1], e[0]) in G.edges)


def bidirected_pairs(G: DirectedGraph) -> list[tuple[int, int]]:
    """Bidirected pairs as ``(low, high)`` tuples, sorted."""
    return sorted({(min(a, b), max(a, b)) for a, b in bidirected_edges(G)})


def unidirected_residual(G: DirectedGraph) -> DirectedGraph:
    return DirectedGraph(G.n, G.edges - bidirected_edges(G))


def _canonical_cycle(cycle):
    cycle = list(cycle)
    if len(cycle) > 1 and cycle[0] == cycle[-1]:
        cycle = cycle[:-1]
    k = cycle.index(min(cycle))
    return cycle[k:] + cycle[:k]


def is_dag(G: DirectedGraph) -> tuple[bool, list[int]]:
    """Return ``(True, order)`` with every edge pointing forward in ``order``,
    or ``(False, cycle)`` with ``cycle[k] -> cycle[k + 1]`` edges (closing
    back to ``cycle[0]``)."""
    sorter = graphlib.TopologicalSorter(G.predecessors())
    try:
        return True, list(sorter.static_order())
    except graphlib.CycleError as exc:
        return False, _canonical_cycle(exc.args[1])


def is_structurally_stabilizable(G: DirectedGraph) -> tuple[bool, DirectedGraph, list[int]]:
    """Sufficient test: the unidirected residual must be acyclic.

    A ``False`` verdict is inconclusive, not a proof of non-stabilizability.
    """
    residual = unidirected_residual(G)
    ok, witness = is_dag(residual)
    return ok, residual, witness


@dataclass(frozen=True)
class PlacementResult:
    control_set: frozenset[tuple[int, int]]
    kept_set: frozenset[tuple[int, int]]
    final_graph: DirectedGraph

    def to_dict(self) -> dict:
        def edge_list(edges):
            return [{"from": a + 1, "to": b + 1} for a, b in sorted(edges)]

        _, order = is_dag(self.final_graph)
        return {
            "control_set": edge_list(self.control_set),
            "kept_set": edge_list(self.kept_set),
            "final_graph_order": [v + 1 for v in order],
        }


def place_controls(G: DirectedGraph) -> PlacementResult:
    """Choose which edge of each bidirected pair to vibrate.

    Starting from the residual, one orientation per pair is kept so that the
    graph stays acyclic after every insertion; the other orientation joins
    the control set. Pairs are visited in sorted order and, for a pair
    ``(a, b)`` with ``a < b``, the orientation ``a -> b`` is tried first.
    """
    ok, residual, witness = is_structurally_stabilizable(G)
    if not ok:
        pretty = " -> ".join(str(v + 1) for v in witness + witness[:1])
        raise NotStabilizableError(f"unidirected residual has a directed cycle: {pretty}", witness)

    current = residual
    kept = set()
    for a, b in bidirected_pairs(G):
        for e in ((a, b), (b, a)):
            trial = current.with_edges([e])
            if is_dag(trial)[0]:
                current = trial
                kept.add(e)
                break
        else:  # pragma: no cover - one orientation of a non-adjacent pair always keeps a DAG
            raise RuntimeError(f"neither orientation of pair ({a + 1}, {b + 1}) keeps a DAG")

    control = bidirected_edges(G) - kept
    return PlacementResult(frozenset(control), frozenset(kept), current)


def topological_permutation(G: DirectedGraph) -> list[int]:
    """Node order that makes the permuted matrix lower-triangular.

    ``order[k]`` is the original node placed at position ``k``; for the
    matrix convention ``M[dst, src]``, ``M[np.ix_(order, order)]`` has no
    entries above the diagonal.
    """
    ok, witness = is_dag(G)
    if not ok:
        pretty = " -> ".join(str(v + 1) for v in witness + witness[:1])
        raise CyclicGraphError(f"graph has a directed cycle: {pretty}", witness)
    return witness
