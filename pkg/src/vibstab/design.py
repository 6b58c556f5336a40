"""Sinusoidal vibration schedules restricted to the network's edges."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "VibrationEntry",
    "VibrationSchedule",
    "DesignError",
    "frequency_multipliers",
    "design_vibrations",
    "check_sparsity_constraint",
    "evaluate_V",
    "evaluate_scaled_V",
    "schedule_to_dict",
    "schedule_from_dict",
    "load_schedule",
    "save_schedule",
]


class DesignError(ValueError):
    pass


@dataclass(frozen=True)
class VibrationEntry:
    """``mu * sin(omega * s + phi)`` at matrix entry ``(row, col)`` (0-based),
    i.e. on edge ``col -> row``."""

    row: int
    col: int
    mu: float
    omega: float
    phi: float = 0.0

    @property
    def gain(self) -> float:
        """Averaging coefficient ``0.5 * (mu / omega)**2``."""
        return 0.5 * (self.mu / self.omega) ** 2


@dataclass(frozen=True)
class VibrationSchedule:
    entries: tuple[VibrationEntry, ...] = ()
    epsilon: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.epsilon > 0:
            raise DesignError(f"epsilon must be positive, got {self.epsilon}")
        seen = set()
        for e in self.entries:
            if e.row == e.col:
                raise DesignError(f"vibration on diagonal entry ({e.row + 1}, {e.col + 1})")
            if (e.row, e.col) in seen:
                raise DesignError(f"duplicate vibration at ({e.row + 1}, {e.col + 1})")
            if not e.omega > 0:
                raise DesignError(f"omega must be positive at ({e.row + 1}, {e.col + 1})")
            seen.add((e.row, e.col))

    def __len__(self):
        return len(self.entries)

    @property
    def controlled_edges(self) -> frozenset[tuple[int, int]]:
        return frozenset((e.col, e.row) for e in self.entries)

    def with_phase(self, phi: float) -> VibrationSchedule:
        return VibrationSchedule(
            tuple(VibrationEntry(e.row, e.col, e.mu, e.omega, phi) for e in self.entries),
            self.epsilon,
        )

    def with_epsilon(self, epsilon: float) -> VibrationSchedule:
        return VibrationSchedule(self.entries, epsilon)


def _primes():
    found = []
    k = 2
    while True:
        if all(k % p for p in found if p * p <= k):
            found.append(k)
            yield k
        k += 1


def frequency_multipliers(count: int) -> list[float]:
    """``sqrt(1), sqrt(2), sqrt(3), sqrt(5), ...``: pairwise irrational ratios."""
    out = [1.0][:count]
    primes = _primes()
    while len(out) < count:
        out.append(math.sqrt(next(primes)))
    return out


def design_vibrations(M, controls, omega_base=1.0, *, epsilon=1.0, phase=0.0,
                      omegas=None, removal=1.0) -> VibrationSchedule:
    """Design vibrations that functionally remove the controlled edges.

    Parameters
    ----------
    M : (n, n) array_like
        System matrix.
    controls : iterable of (src, dst)
        Edges to vibrate; edge ``src -> dst`` is matrix entry ``(dst, src)``.
    omega_base : float
        The k-th controlled entry, in row-major order, gets frequency
        ``omega_base * frequency_multipliers(k)[-1]``.
    epsilon : float
        Timescale parameter stored on the schedule; it does not enter the
        amplitudes.
    phase : float
        Common phase offset. ``-pi/2`` gives a zero-mean primitive.
    omegas : mapping, optional
        Explicit ``{(src, dst): omega}`` overrides.
    removal : float
        Fraction of each controlled weight removed in the averaged system;
        values below 1 only weaken the edge.

    Returns
    -------
    VibrationSchedule
        Amplitudes satisfy ``0.5 * (mu / omega)**2 * m_ji == removal * m_ij``.
    """
    M = np.asarray(M, dtype=np.float64)
    if not omega_base > 0:
        raise DesignError(f"omega_base must be positive, got {omega_base}")
    if not 0 <= removal <= 1:
        raise DesignError(f"removal fraction must lie in [0, 1], got {removal}")
    omegas = dict(omegas or {})
    cells = sorted((dst, src) for src, dst in controls)
    mults = frequency_multipliers(len(cells))
    entries = []
    for (i, j), mult in zip(cells, mults):
        label = f"edge {j + 1}->{i + 1} (entry m_{i + 1}{j + 1})"
        if i == j:
            raise DesignError(f"{label}: diagonal entries are not vibrated")
        fwd, back = M[i, j], M[j, i]
        if fwd == 0.0:
            raise DesignError(f"{label}: structural zero, nothing to vibrate")
        if back == 0.0:
            raise DesignError(f"{label}: reverse entry m_{j + 1}{i + 1} is zero, edge is not bidirected")
        if (fwd > 0) != (back > 0):
            raise DesignError(f"{label}: sign differs from reverse entry m_{j + 1}{i + 1}")
        omega = float(omegas.pop((j, i), omega_base * mult))
        mu = omega * math.sqrt(2.0 * removal * fwd / back)
        entries.append(VibrationEntry(i, j, mu, omega, float(phase)))
    if omegas:
        raise DesignError(f"frequency overrides for uncontrolled edges: {sorted(omegas)}")
    return VibrationSchedule(tuple(entries), float(epsilon))


def check_sparsity_constraint(sched: VibrationSchedule, M) -> bool:
    M = np.asarray(M)
    n = M.shape[0]
    for e in sched.entries:
        if not (0 <= e.row < n and 0 <= e.col < n) or M[e.row, e.col] == 0.0:
            return False
    return True


def evaluate_V(sched: VibrationSchedule, s: float, n: int) -> np.ndarray:
    V = np.zeros((n, n))
    for e in sched.entries:
        V[e.row, e.col] = e.mu * math.sin(e.omega * s + e.phi)
    return V


def evaluate_scaled_V(sched: VibrationSchedule, t: float, n: int) -> np.ndarray:
    """``(1/eps) V(t/eps)``: the vibration as seen in the original time."""
    eps = sched.epsilon
    return (1.0 / eps) * evaluate_V(sched, t / eps, n)


def schedule_to_dict(sched: VibrationSchedule) -> dict:
    return {
        "epsilon": sched.epsilon,
        "entries": [
            {"row": e.row + 1, "col": e.col + 1, "mu": e.mu, "omega": e.omega, "phi": e.phi}
            for e in sched.entries
        ],
    }


def schedule_from_dict(doc) -> VibrationSchedule:
    if not isinstance(doc, dict) or set(doc) - {"epsilon", "entries"}:
        raise DesignError("schedule: expected an object with 'epsilon' and 'entries'")
    entries = []
    for k, item in enumerate(doc.get("entries", [])):
        keys = {"row", "col", "mu", "omega", "phi"}
        if not isinstance(item, dict) or not {"row", "col", "mu", "omega"} <= set(item) <= keys:
            raise DesignError(f"entries[{k}]: expected keys {sorted(keys)}")
        entries.append(VibrationEntry(int(item["row"]) - 1, int(item["col"]) - 1,
                                      float(item["mu"]), float(item["omega"]),
                                      float(item.get("phi", 0.0))))
    return VibrationSchedule(tuple(entries), float(doc.get("epsilon", 1.0)))


def load_schedule(path) -> VibrationSchedule:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DesignError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return schedule_from_dict(doc)


def save_schedule(sched: VibrationSchedule, path) -> None:
    Path(path).write_text(json.dumps(schedule_to_dict(sched), indent=2) + "\n")
