"""Fixed-step RK4 simulation of the uncontrolled and vibrated networks."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .averaging import (averaged_matrix_numeric, functional_matrix_closed_form,
                        has_chained_controls)
from .design import VibrationSchedule
from .stability import spectral_abscissa

__all__ = [
    "Trajectory",
    "DecayVerdict",
    "UnderResolvedError",
    "ThresholdNotFoundError",
    "StepSizeWarning",
    "simulate_lti",
    "simulate_controlled",
    "classify_decay",
    "find_epsilon_threshold",
    "default_dt",
    "MIN_STEPS_PER_PERIOD",
    "save_csv",
]


class UnderResolvedError(ValueError):
    pass


class ThresholdNotFoundError(RuntimeError):
    def __init__(self, message, table):
        super().__init__(message)
        self.table = table


class StepSizeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    metadata: dict = field(default_factory=dict)
    finite: bool = True

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)


@dataclass(frozen=True)
class DecayVerdict:
    classification: str
    shrink_factor: float


def _integrate(M, sched, eps, x0, t_final, dt, max_samples, label):
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    x0 = np.ones(n) if x0 is None else np.asarray(x0, dtype=np.float64)
    if x0.shape != (n,):
        raise ValueError(f"x0 has shape {x0.shape}, expected ({n},)")
    if not dt > 0:
        raise ValueError("dt must be positive")
    # shrink dt slightly so the last step lands exactly on t_final
    nsteps = max(1, math.ceil(t_final / dt - 1e-9))
    dt = t_final / nsteps
    stride = max(1, nsteps // max_samples)
    idx, states, finite = _backend.rk4_trajectory(M, sched, eps, x0, 0.0, dt, nsteps, stride)
    meta = {"system": label, "epsilon": eps, "dt": dt, "steps": nsteps, "stride": stride,
            "schedule_entries": 0 if sched is None else len(sched)}
    if not finite:
        warnings.warn(f"state became non-finite after step {int(idx[-1])}; trajectory truncated",
                      RuntimeWarning, stacklevel=3)
    return Trajectory(idx * dt, states, meta, finite)


def simulate_lti(M, x0=None, t_final=10.0, dt=1e-3, max_samples=20000) -> Trajectory:
    """RK4 solution of ``x' = M x`` from ``x0`` (default all ones)."""
    M = np.asarray(M, dtype=np.float64)
    if dt * np.linalg.norm(M, 2) > 0.1:
        warnings.warn(f"dt*||M|| = {dt * np.linalg.norm(M, 2):.3g} > 0.1; RK4 accuracy may suffer",
                      StepSizeWarning, stacklevel=2)
    return _integrate(M, None, 1.0, x0, t_final, dt, max_samples, "lti")


MIN_STEPS_PER_PERIOD = 50


def default_dt(M, sched: VibrationSchedule | None, steps_per_period=200, lti_factor=0.05):
    """Step resolving both the fastest vibration and ``M`` itself.

    The default 200 steps per fastest period keeps RK4 drift over ~1e6
    steps near 1e-5 relative; 50 is the floor accepted by
    :func:`simulate_controlled`.
    """
    M = np.asarray(M, dtype=np.float64)
    dt = lti_factor / max(np.linalg.norm(M, 2), 1e-12)
    if sched is not None and len(sched):
        fastest = max(e.omega for e in sched.entries) / sched.epsilon
        dt = min(dt, 2.0 * math.pi / fastest / steps_per_period)
    return dt


def simulate_controlled(M, sched: VibrationSchedule, x0=None, t_final=10.0, dt=None,
                        max_samples=20000) -> Trajectory:
    """RK4 solution of ``x' = (M + V(t/eps)/eps) x``.

    ``dt`` defaults to :func:`default_dt`. An explicit ``dt`` must give at
    least 50 steps per period of the fastest scaled vibration; anything
    coarser raises rather than alias.
    """
    if dt is None:
        dt = default_dt(M, sched)
    if len(sched):
        fastest = max(e.omega for e in sched.entries) / sched.epsilon
        limit = 2.0 * math.pi / fastest / MIN_STEPS_PER_PERIOD
        if dt > limit * (1 + 1e-12):
            raise UnderResolvedError(
                f"dt={dt:.4g} under-resolves the fastest vibration "
                f"(omega/eps={fastest:.4g}); need dt <= {limit:.4g}")
    return _integrate(M, sched, sched.epsilon, x0, t_final, dt, max_samples, "controlled")


def classify_decay(traj: Trajectory, window: float, low: float = 0.5, high: float = 2.0) -> DecayVerdict:
    """Compare the peak state norm in the last and first ``window`` of time.

    ``shrink_factor`` is the ratio of the two peaks. A trajectory that blew
    up is classified as growing.
    """
    if not traj.finite:
        return DecayVerdict("growing", math.inf)
    t = traj.times
    if t[-1] - t[0] < 2 * window:
        raise ValueError(f"trajectory spans {t[-1] - t[0]:.4g}, need two windows of {window:.4g}")
    norms = traj.norms
    first = norms[t <= t[0] + window].max()
    last = norms[t >= t[-1] - window].max()
    shrink = float(last / first) if first > 0 else (0.0 if last == 0 else math.inf)
    if shrink < low:
        return DecayVerdict("decaying", shrink)
    if shrink > high:
        return DecayVerdict("growing", shrink)
    return DecayVerdict("inconclusive", shrink)


def _functional_abscissa(M, sched):
    if len(sched) == 0:
        return spectral_abscissa(M)
    if has_chained_controls(sched):
        return averaged_matrix_numeric(M, sched, center=True).spectrum.abscissa
    return functional_matrix_closed_form(M, sched).spectrum.abscissa


def find_epsilon_threshold(M, sched: VibrationSchedule, x0=None, eps_grid=None,
                           t_final=None, window=None, max_samples=20000):
    """Scan ``eps`` upward over a log grid and report the stable range.

    Returns ``(eps_hat, table)`` where ``eps_hat`` is the largest grid value
    such that it and every smaller grid value gave a decaying trajectory,
    and ``table`` lists ``(eps, DecayVerdict)`` for the whole grid.
    """
    M = np.asarray(M, dtype=np.float64)
    alpha = _functional_abscissa(M, sched)
    if not alpha < 0:
        raise ValueError(f"functional matrix is not Hurwitz (abscissa {alpha:.4g}); "
                         "no epsilon threshold exists")
    eps_grid = np.logspace(-3, 1, 9) if eps_grid is None else np.sort(np.asarray(eps_grid, float))
    table = []
    eps_hat = None
    unbroken = True
    for eps in eps_grid:
        s = sched.with_epsilon(float(eps))
        slow = 2.0 * math.pi * eps / min(e.omega for e in sched.entries) if len(sched) else 0.0
        win = window if window is not None else max(5.0 * slow, 1.0 / abs(alpha))
        horizon = t_final if t_final is not None else max(10.0 / abs(alpha), 2.5 * win)
        with warnings.catch_warnings():
            # blow-ups are recorded in the table as "growing"
            warnings.simplefilter("ignore", RuntimeWarning)
            traj = simulate_controlled(M, s, x0, horizon, max_samples=max_samples)
        verdict = classify_decay(traj, win)
        table.append((float(eps), verdict))
        unbroken = unbroken and verdict.classification == "decaying"
        if unbroken:
            eps_hat = float(eps)
    if eps_hat is None:
        raise ThresholdNotFoundError("no grid epsilon produced a decaying trajectory", table)
    return eps_hat, table


def save_csv(traj: Trajectory, path) -> None:
    n = traj.states.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{i + 1}" for i in range(n)])
        for t, x in zip(traj.times, traj.states):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in x])
