"""H-infinity lower bounds on the unstructured real stability radius.

For Hurwitz ``M`` every real perturbation with spectral norm below
``1 / sup_w sigma_max((jwI - M)^-1)`` preserves stability. The supremum is
estimated by a log-spaced frequency sweep followed by golden-section
refinement; the reported norm is the largest value actually evaluated, so
the bound errs on the safe side only if the sweep finds the true peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .stability import NumericalError, eigenvalues

__all__ = [
    "RobustnessReport",
    "NotHurwitzError",
    "sigma_max",
    "hinf_norm",
    "ursr_lower_bound",
    "robustness_report",
    "spectral_norm",
    "stress_test",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class NotHurwitzError(ValueError):
    pass


@dataclass(frozen=True)
class RobustnessReport:
    hinf_norm: float
    ursr_lower_bound: float
    peak_frequency: float
    grid: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "hinf": self.hinf_norm,
            "bound": self.ursr_lower_bound,
            "omega_peak": self.peak_frequency,
            "grid": self.grid,
        }


def _power_sigma(H, tol, maxiter):
    # largest eigenvalue of the Hermitian PSD Gram matrix H = G^H G, square-rooted
    n = H.shape[0]
    v = np.ones(n, dtype=H.dtype)
    if np.iscomplexobj(H):
        v = v + 1j * np.arange(1, n + 1) / n
    v = v / np.linalg.norm(v)
    lam = 0.0
    for _ in range(maxiter):
        w = H @ v
        new = float(np.real(np.vdot(v, w)))
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(new - lam) <= tol * abs(new):
            return math.sqrt(new)
        lam = new
    raise NumericalError(f"power iteration did not converge in {maxiter} iterations (last {lam:.6g})")


def sigma_max(M, omega: float) -> float:
    """Largest singular value of ``(j omega I - M)^-1``.

    LAPACK SVD rather than power iteration: at high frequency the top two
    singular values of a resolvent nearly coincide and power iteration stalls.
    """
    M = np.asarray(M, dtype=np.float64)
    G = np.linalg.inv(1j * omega * np.eye(M.shape[0]) - M)
    return float(np.linalg.norm(G, 2))


def spectral_norm(X, tol=1e-13, maxiter=20000) -> float:
    X = np.asarray(X, dtype=np.float64)
    return _power_sigma(X.T @ X, tol, maxiter)


def _require_hurwitz(M):
    alpha = eigenvalues(M).abscissa
    if not alpha < 0:
        raise NotHurwitzError(f"matrix is not Hurwitz (abscissa {alpha:.6g}); H-infinity norm is unbounded")
    return alpha


def _golden_max(f, lo, hi, iters):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    best = max((fc, c), (fd, d))
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        best = max(best, (fc, c), (fd, d))
    return best


def hinf_norm(M, omega_min=None, omega_max=None, grid_points=400, refine_iters=60):
    """Return ``(norm, omega_peak, grid_info)`` for the resolvent of ``M``.

    The default band is ``[1e-3, 1e3]`` times the spectral radius; ``omega = 0``
    is always probed.
    """
    M = np.asarray(M, dtype=np.float64)
    _require_hurwitz(M)
    scale = float(np.max(np.abs(np.linalg.eigvals(M)))) or 1.0
    lo = omega_min if omega_min is not None else 1e-3 * scale
    hi = omega_max if omega_max is not None else 1e3 * scale
    grid = np.concatenate([[0.0], np.logspace(math.log10(lo), math.log10(hi), grid_points)])
    values = np.array([sigma_max(M, w) for w in grid])
    k = int(np.argmax(values))
    coarse = float(values[k])

    left = grid[k - 1] if k > 0 else 0.0
    right = grid[k + 1] if k + 1 < len(grid) else grid[k]
    refined, w_peak = coarse, float(grid[k])
    if right > left:
        val, w = _golden_max(lambda w: sigma_max(M, w), left, right, refine_iters)
        if val > refined:
            refined, w_peak = val, float(w)

    info = {"omega_min": float(lo), "omega_max": float(hi), "points": int(len(grid)),
            "coarse_peak": coarse, "coarse_omega": float(grid[k])}
    return refined, w_peak, info


def robustness_report(M, **kwargs) -> RobustnessReport:
    norm, w, info = hinf_norm(M, **kwargs)
    return RobustnessReport(norm, 1.0 / norm, w, info)


def ursr_lower_bound(M, **kwargs) -> float:
    return robustness_report(M, **kwargs).ursr_lower_bound


def stress_test(M, bound, trials=100, rng_seed=0, scale=0.99):
    """Fraction of random real perturbations of norm ``scale * bound`` that
    leave ``M + Delta`` Hurwitz."""
    M = np.asarray(M, dtype=np.float64)
    _require_hurwitz(M)
    rng = np.random.default_rng(rng_seed)
    n = M.shape[0]
    stable = 0
    for _ in range(trials):
        delta = rng.standard_normal((n, n))
        delta *= scale * bound / spectral_norm(delta)
        if eigenvalues(M + delta).abscissa < 0:
            stable += 1
    return stable / trials
