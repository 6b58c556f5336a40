"""Averaged ("functional") system of a vibrationally controlled network.

With ``Psi`` the transition matrix of ``dx/ds = V(s) x``, the averaged matrix
is the long-time mean of ``Psi^-1 M Psi``. Two routes are provided:

* :func:`averaged_matrix_numeric` integrates ``Psi`` and ``Psi^-1`` with RK4
  and applies the trapezoid rule to the conjugated matrix.
* :func:`functional_matrix_closed_form` uses ``m_ij - c_ij m_ji`` with
  ``c_ij = (mu_ij / omega_ij)**2 / 2`` on vibrated entries.

The mean depends on which fundamental matrix is averaged: replacing ``Psi``
by ``Psi R`` for a constant ``R`` conjugates the result by ``R``. With
``s0 = 0`` and sine phase the primitive of each vibration has nonzero mean,
and chained vibrated entries pick up nonzero-mean iterated integrals for any
phase. Both effects are similarity transforms, so spectra agree with the
closed form while entries need not. ``center=True`` conjugates the numeric
mean by the time-average of ``Psi``, which removes the constant part and
makes the two routes agree entry by entry.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _backend
from .design import VibrationSchedule
from .graph import CyclicGraphError, DirectedGraph, is_dag
from .stability import Spectrum, eigenvalues, match_spectra

__all__ = [
    "FunctionalMatrix",
    "Transition",
    "IntegrationError",
    "ResolutionWarning",
    "transition_matrix",
    "default_horizon",
    "default_step",
    "averaged_matrix_numeric",
    "functional_matrix_closed_form",
    "functional_network",
    "compare_methods",
    "has_chained_controls",
    "path_cross_terms",
]


class IntegrationError(FloatingPointError):
    pass


class ResolutionWarning(UserWarning):
    pass


class Transition(NamedTuple):
    psi: np.ndarray
    inverse: np.ndarray
    residual: float


@dataclass(frozen=True)
class FunctionalMatrix:
    matrix: np.ndarray
    method: str
    horizon: float | None = None
    tolerance: float = 0.0
    notes: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)

    @property
    def spectrum(self) -> Spectrum:
        return eigenvalues(self.matrix)

    def to_dict(self) -> dict:
        spec = self.spectrum
        return {
            "method": self.method,
            "matrix": self.matrix.tolist(),
            "horizon": self.horizon,
            "convergence": self.tolerance,
            "spectrum": [[float(z.real), float(z.imag)] for z in spec.eigenvalues],
            "abscissa": spec.abscissa,
            "notes": list(self.notes),
            **self.extra,
        }


def _omegas(sched):
    return [e.omega for e in sched.entries]


def default_horizon(sched: VibrationSchedule, periods: float = 500.0) -> float:
    return periods * 2.0 * math.pi / min(_omegas(sched))


def default_step(sched: VibrationSchedule, per_period: int = 50) -> float:
    return 2.0 * math.pi / max(_omegas(sched)) / per_period


def transition_matrix(sched: VibrationSchedule, s0: float, s: float, step: float, n: int) -> Transition:
    """``Psi(s, s0)`` and its inverse, integrated side by side with RK4."""
    if not step > 0:
        raise ValueError("step must be positive")
    nsteps = max(1, math.ceil(abs(s - s0) / step)) if s != s0 else 0
    h = (s - s0) / nsteps if nsteps else 0.0
    psi, inv, *_ = _backend.transition_average(np.zeros((n, n)), sched, s0, h, nsteps, accumulate=False)
    if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(inv))):
        raise IntegrationError(f"transition matrix blew up between s={s0} and s={s}")
    residual = float(np.linalg.norm(inv @ psi - np.eye(n)))
    return Transition(psi, inv, residual)


def averaged_matrix_numeric(M, sched: VibrationSchedule, T: float | None = None,
                            step: float | None = None, *, center: bool = False,
                            window: str = "hann", s0: float = 0.0) -> FunctionalMatrix:
    """Trapezoid-rule mean of ``Psi^-1 M Psi`` over ``[s0, s0 + T]``.

    Parameters
    ----------
    M : (n, n) array_like
    sched : VibrationSchedule
    T : float, optional
        Horizon in the fast time ``s``; defaults to 500 periods of the
        slowest vibration.
    step : float, optional
        RK4 step; defaults to 1/50 of the fastest period.
    center : bool
        Conjugate the mean by the time-averaged ``Psi`` (see module notes).
    window : {"hann", "box"}
        ``"box"`` is the plain ``1/T`` integral. ``"hann"`` tapers the
        integrand with ``1 - cos(2 pi s / T)``; the limit is the same but
        the truncation error falls from ``O(1/T)`` to ``O(1/T**3)``.

    Returns
    -------
    FunctionalMatrix
        ``tolerance`` is the largest entry change between horizons ``T/2``
        and ``T``.
    """
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    if len(sched) == 0:
        return FunctionalMatrix(M.copy(), "numeric", T, 0.0)
    T = default_horizon(sched) if T is None else float(T)
    step = default_step(sched) if step is None else float(step)
    nsteps = max(2, math.ceil(T / step))
    h = T / nsteps
    slow = 2.0 * math.pi / min(_omegas(sched))
    fast = 2.0 * math.pi / max(_omegas(sched))
    if T < 100 * slow:
        warnings.warn(f"horizon {T:.4g} covers fewer than 100 periods of the slowest vibration",
                      ResolutionWarning, stacklevel=2)
    if h > fast / 50:
        warnings.warn(f"step {h:.4g} gives fewer than 50 samples per fastest period",
                      ResolutionWarning, stacklevel=2)

    if window not in ("hann", "box"):
        raise ValueError(f"unknown window {window!r}")
    psi, inv, acc, acc_half, pacc, pacc_half, wsum, wsum_half = _backend.transition_average(
        M, sched, s0, h, nsteps, accumulate=True, window=window)
    if not np.all(np.isfinite(acc)) or not np.all(np.isfinite(psi)):
        raise IntegrationError("transition matrix blew up during averaging")
    full = acc / wsum
    half = acc_half / wsum_half
    if center:
        full = _conjugate(pacc / wsum, full)
        half = _conjugate(pacc_half / wsum_half, half)
    residual = float(np.linalg.norm(inv @ psi - np.eye(n)))

    notes = []
    if has_chained_controls(sched):
        notes.append("chained vibrated entries: entrywise agreement with the closed form "
                     "needs center=True")
    return FunctionalMatrix(full, "numeric", T, float(np.max(np.abs(full - half))), tuple(notes),
                            {"step": h, "centered": center, "window": window,
                             "transition_residual": residual})


def _conjugate(mean_psi, A):
    # mean_psi @ A @ mean_psi^-1
    return mean_psi @ np.linalg.solve(mean_psi.T, A.T).T


def has_chained_controls(sched: VibrationSchedule) -> bool:
    """True if some vibrated edge ends where another starts."""
    edges = sched.controlled_edges
    heads = {b for _, b in edges}
    return any(a in heads for a, _ in edges)


def path_cross_terms(M, sched: VibrationSchedule) -> list[tuple[int, int]]:
    """Endpoints ``(a, c)`` of vibrated paths of length >= 2 whose closing
    edge ``c -> a`` is present in ``M``.

    Along such a path the iterated integrals of the vibrations have a
    nonzero mean, so the averaged matrix picks up an entry ``(c, a)`` that
    the entrywise formula omits. For a two-edge path ``a -> b -> c`` with
    ``A = mu_ba / omega_ba``, ``B = mu_cb / omega_cb`` and distinct
    frequencies ``p``, ``q`` the extra entry is
    ``-A**2 B**2 p**2 q**2 / (2 (p**2 - q**2)**2) * m_ac``.
    """
    M = np.asarray(M)
    succ: dict[int, set[int]] = {}
    for a, b in sched.controlled_edges:
        succ.setdefault(a, set()).add(b)
    out = []
    for a in sorted(succ):
        # nodes reachable from a by paths of length >= 2
        frontier = set(succ[a])
        far: set[int] = set()
        while frontier:
            nxt = set().union(*(succ.get(v, set()) for v in frontier)) - far
            far |= nxt
            frontier = nxt
        out.extend((a, c) for c in sorted(far) if c != a and M[a, c] != 0.0)
    return out


def functional_matrix_closed_form(M, sched: VibrationSchedule) -> FunctionalMatrix:
    """``m_ij - c_ij m_ji`` on vibrated entries; everything else, including the
    diagonal, is unchanged. The vibrated edges must form a DAG."""
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    ok, witness = is_dag(DirectedGraph(n, sched.controlled_edges))
    if not ok:
        raise CyclicGraphError(
            "closed-form averaging needs the vibrated edges to form a DAG", witness)
    omegas = _omegas(sched)
    notes = []
    if len(set(omegas)) != len(omegas):
        notes.append("repeated frequencies: cross terms do not average out")
    for a, c in path_cross_terms(M, sched):
        notes.append(f"vibrated path {a + 1} -> ... -> {c + 1} meets edge {c + 1} -> {a + 1}: "
                     f"the numeric average also gains entry ({c + 1}, {a + 1})")
    Mbar = M.copy()
    for e in sched.entries:
        Mbar[e.row, e.col] = M[e.row, e.col] - e.gain * M[e.col, e.row]
    return FunctionalMatrix(Mbar, "closed_form", None, 0.0, tuple(notes))


def functional_network(Mbar, zero_tol: float = 1e-6, relative: bool = True):
    """Graph of the averaged matrix and its diagonal.

    Off-diagonal entries with magnitude above ``zero_tol`` (times the largest
    entry magnitude when ``relative``) become edges ``j -> i``.
    """
    Mbar = np.asarray(getattr(Mbar, "matrix", Mbar), dtype=np.float64)
    tol = zero_tol * (np.max(np.abs(Mbar)) if relative else 1.0)
    return DirectedGraph.from_matrix(Mbar, tol), np.diag(Mbar).copy()


def compare_methods(numeric: FunctionalMatrix, closed: FunctionalMatrix) -> dict:
    return {
        "spectral_distance": match_spectra(numeric.spectrum, closed.spectrum),
        "entrywise_distance": float(np.max(np.abs(numeric.matrix - closed.matrix))),
    }
