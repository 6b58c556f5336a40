"""Spectra, abscissae and Hurwitz verdicts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import CyclicGraphError, DirectedGraph, is_dag

__all__ = [
    "Spectrum",
    "NumericalError",
    "eigenvalues",
    "spectral_abscissa",
    "is_hurwitz",
    "dag_spectrum_oracle",
    "match_spectra",
]


class NumericalError(RuntimeError):
    pass


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    abscissa: float

    @classmethod
    def of(cls, values) -> Spectrum:
        values = np.asarray(values, dtype=np.complex128)
        return cls(values, float(np.max(values.real)))

    def __len__(self):
        return len(self.eigenvalues)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [{"re": float(z.real), "im": float(z.imag)} for z in self.eigenvalues],
            "abscissa": self.abscissa,
        }


def eigenvalues(M) -> Spectrum:
    """Full spectrum from LAPACK's Hessenberg-QR solver, residual-checked."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    try:
        w, v = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration did not converge (n={M.shape[0]}): {exc}") from exc
    k = int(np.argmax(w.real))
    vec = v[:, k]
    resid = np.linalg.norm(M @ vec - w[k] * vec) / np.linalg.norm(vec)
    scale = max(1.0, np.linalg.norm(M, 2))
    if resid > 1e-8 * scale:
        raise NumericalError(f"eigenpair residual {resid:.3e} exceeds 1e-8 * {scale:.3g}")
    return Spectrum.of(w)


def spectral_abscissa(M) -> float:
    return eigenvalues(M).abscissa


def is_hurwitz(M, margin: float = 0.0) -> bool:
    if margin < 0:
        raise ValueError("margin must be non-negative")
    return spectral_abscissa(M) < -margin


def dag_spectrum_oracle(sys) -> Spectrum:
    """Spectrum of a network on a DAG, read off the diagonal.

    A topological relabeling makes the matrix triangular, so no eigensolver
    is involved.
    """
    ok, witness = is_dag(DirectedGraph.from_network(sys))
    if not ok:
        raise CyclicGraphError("spectrum oracle needs an acyclic graph", witness)
    return Spectrum.of(np.asarray(sys.d, dtype=np.float64))


def match_spectra(a, b) -> float:
    """Largest distance after greedily pairing the closest eigenvalues.

    ``a`` and ``b`` may be :class:`Spectrum` objects or arrays of equal size.
    """
    a = list(np.asarray(getattr(a, "eigenvalues", a), dtype=np.complex128))
    b = list(np.asarray(getattr(b, "eigenvalues", b), dtype=np.complex128))
    if len(a) != len(b):
        raise ValueError(f"spectra differ in size: {len(a)} vs {len(b)}")
    worst = 0.0
    while a:
        dist = np.abs(np.subtract.outer(a, b))
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        worst = max(worst, float(dist[i, j]))
        a.pop(i)
        b.pop(j)
    return worst
