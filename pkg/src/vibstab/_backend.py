"""Kernel selection at import time.

The compiled extension is preferred. ``VIBSTAB_BACKEND=python`` forces the
numpy fallback; ``VIBSTAB_BACKEND=compiled`` makes a missing extension an
ImportError instead of a silent downgrade.
"""

import os

import numpy as np

from . import _kernels_py

_choice = os.environ.get("VIBSTAB_BACKEND", "auto").lower()

if _choice == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _kernels_py
        BACKEND = "python"


def _flatten(schedule):
    if schedule is None or len(schedule.entries) == 0:
        empty_i = np.zeros(0, dtype=np.intp)
        empty_f = np.zeros(0)
        return empty_i, empty_i.copy(), empty_f, empty_f.copy(), empty_f.copy()
    rows = np.array([e.row for e in schedule.entries], dtype=np.intp)
    cols = np.array([e.col for e in schedule.entries], dtype=np.intp)
    mu = np.array([e.mu for e in schedule.entries], dtype=np.float64)
    omega = np.array([e.omega for e in schedule.entries], dtype=np.float64)
    phi = np.array([e.phi for e in schedule.entries], dtype=np.float64)
    return rows, cols, mu, omega, phi


WINDOWS = {"box": 0, "hann": 1}


def transition_average(M, schedule, s0, h, nsteps, accumulate=True, window="box", impl=None):
    impl = impl or _impl
    M = np.ascontiguousarray(M, dtype=np.float64)
    return impl.transition_average(M, *_flatten(schedule), float(s0), float(h),
                                   int(nsteps), bool(accumulate), WINDOWS[window])


def rk4_trajectory(M, schedule, eps, x0, t0, dt, nsteps, stride, impl=None):
    impl = impl or _impl
    M = np.ascontiguousarray(M, dtype=np.float64)
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    return impl.rk4_trajectory(M, *_flatten(schedule), float(eps), x0, float(t0),
                               float(dt), int(nsteps), int(stride))
