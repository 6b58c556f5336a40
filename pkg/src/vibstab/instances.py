"""Random and hand-built network instances used by tests, benchmarks and demos."""

from __future__ import annotations

import itertools

import numpy as np

from .network import NetworkSystem, build_matrix
from .stability import spectral_abscissa

__all__ = [
    "random_dag_network",
    "random_stabilizable_network",
    "scale_until_unstable",
    "example3_network",
    "example4_network",
    "stabilizable_suite",
    "marginal_network",
]


def _weight(rng, lo=0.1, hi=3.0, sign=None):
    sign = rng.choice((-1.0, 1.0)) if sign is None else sign
    return float(sign * rng.uniform(lo, hi))


def random_dag_network(rng, n, density=0.3, d_range=(-3.0, -0.1), w_range=(0.1, 3.0)):
    """Assumption-1 network on a random DAG (edges follow a random order)."""
    order = rng.permutation(n)
    d = rng.uniform(*d_range, size=n)
    edges = []
    for a, b in itertools.combinations(range(n), 2):
        if rng.random() < density:
            edges.append((int(order[a]), int(order[b]), _weight(rng, *w_range)))
    return NetworkSystem(tuple(d), tuple(edges))


def random_stabilizable_network(rng, n=None, pairs=None, density=0.3,
                                d_range=(-3.0, -0.1), w_range=(0.1, 3.0)):
    """Network whose unidirected residual is a random DAG, plus 1-4
    sign-consistent bidirected pairs on non-adjacent node pairs."""
    n = int(rng.integers(4, 11)) if n is None else n
    base = random_dag_network(rng, n, density, d_range, w_range)
    adjacent = {frozenset((j, i)) for j, i, _ in base.edges}
    free = [p for p in itertools.combinations(range(n), 2) if frozenset(p) not in adjacent]
    k = int(rng.integers(1, 5)) if pairs is None else pairs
    k = min(k, len(free))
    chosen = rng.choice(len(free), size=k, replace=False) if k else []
    edges = list(base.edges)
    for idx in chosen:
        a, b = free[int(idx)]
        sign = float(rng.choice((-1.0, 1.0)))
        edges.append((a, b, _weight(rng, *w_range, sign=sign)))
        edges.append((b, a, _weight(rng, *w_range, sign=sign)))
    return NetworkSystem(base.d, tuple(edges))


def scale_until_unstable(sys: NetworkSystem, target=0.1, factor=1.1, max_iter=200):
    """Scale every edge weight by ``factor`` until the abscissa exceeds ``target``."""
    k = 1.0
    for _ in range(max_iter):
        scaled = NetworkSystem(sys.d, tuple((j, i, w * k) for j, i, w in sys.edges))
        if spectral_abscissa(build_matrix(scaled)) > target:
            return scaled, k
        k *= factor
    raise ValueError("coupling scaling did not destabilize the network")


def example3_network():
    """Five nodes: residual paths 4 -> 2 -> 3 and 5 -> 2 -> 1, pairs {1, 5}
    and {3, 4}. Placement must keep 4 -> 3 and 5 -> 1, so the vibrated
    edges are 3 -> 4 and 1 -> 5.

    Pair weights are m_43 = 0.9, m_34 = 1.1, m_51 = 6.5, m_15 = 1, so the
    designed amplitudes are 50*sqrt(1.8/1.1) at omega 50 and 100*sqrt(6.5)
    at omega 50*sqrt(2).
    """
    d = (-1.0, -1.0, -1.0, -1.0, -1.0)
    edges = (
        (3, 1, 0.5),   # 4 -> 2
        (1, 2, 0.5),   # 2 -> 3
        (4, 1, 0.5),   # 5 -> 2
        (1, 0, 0.5),   # 2 -> 1
        (2, 3, 0.9),   # 3 -> 4
        (3, 2, 1.1),   # 4 -> 3
        (0, 4, 6.5),   # 1 -> 5
        (4, 0, 1.0),   # 5 -> 1
    )
    return NetworkSystem(d, edges)


def example4_network():
    """Five nodes whose residual contains the cycle 1 -> 3 -> 4 -> 1.

    The pair {1, 5} (m_51 = 2.6, m_15 = 0.4) destabilizes the network; the
    residual cycle is weak enough that removing edge 1 -> 5 restores
    stability.
    """
    d = (-1.0, -1.0, -1.0, -1.0, -1.0)
    edges = (
        (0, 2, 0.5),   # 1 -> 3
        (2, 3, 0.5),   # 3 -> 4
        (3, 0, 0.5),   # 4 -> 1
        (1, 2, 0.3),   # 2 -> 3
        (0, 4, 2.6),   # 1 -> 5
        (4, 0, 0.4),   # 5 -> 1
    )
    return NetworkSystem(d, edges)


def stabilizable_suite(seed, count, omega_base=1.0, phase=0.0):
    """``count`` random stabilizable networks with their placement and
    designed schedule, drawn from ``numpy.random.default_rng(seed)``.

    Returns a list of ``(system, matrix, placement, schedule)``.
    """
    from .design import design_vibrations
    from .graph import DirectedGraph, place_controls

    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        sys = random_stabilizable_network(rng)
        M = build_matrix(sys)
        placement = place_controls(DirectedGraph.from_network(sys))
        sched = design_vibrations(M, placement.control_set, omega_base, phase=phase)
        out.append((sys, M, placement, sched))
    return out


def marginal_network(scale=0.255):
    """Example-3 topology with both bidirected pairs scaled down so the
    network is stable but close to the margin (abscissa about -0.054)."""
    base = example3_network()
    pairs = {(0, 4), (4, 0), (2, 3), (3, 2)}
    return NetworkSystem(base.d, tuple((j, i, w * scale if (j, i) in pairs else w)
                                       for j, i, w in base.edges))
