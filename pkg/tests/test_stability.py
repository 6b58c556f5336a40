import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vibstab.design import design_vibrations
from vibstab.graph import DirectedGraph, place_controls
from vibstab.averaging import functional_matrix_closed_form
from vibstab.instances import random_dag_network, random_stabilizable_network
from vibstab.network import NetworkSystem, build_matrix
from vibstab.stability import (Spectrum, dag_spectrum_oracle, eigenvalues, is_hurwitz,
                               match_spectra, spectral_abscissa)


def test_diag():
    spec = eigenvalues(np.diag([-1.0, -2.0]))
    assert match_spectra(spec, Spectrum.of([-1, -2])) < 1e-14 and spec.abscissa == -1


def test_rotation():
    spec = eigenvalues(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert match_spectra(spec, Spectrum.of([1j, -1j])) < 1e-14
    assert spec.abscissa == pytest.approx(0.0, abs=1e-15)


def test_companion():
    # lambda^2 - 3 lambda + 2
    spec = eigenvalues(np.array([[3.0, -2.0], [1.0, 0.0]]))
    assert match_spectra(spec, Spectrum.of([1, 2])) < 1e-12


def test_is_hurwitz():
    assert is_hurwitz(np.diag([-1.0, -2.0]))
    assert not is_hurwitz(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert not is_hurwitz(np.diag([-0.5, -2.0]), margin=1.0)


def test_dag_oracle_chain():
    sys = NetworkSystem((-1.0, -2.0, -3.0), ((0, 1, 7.0), (1, 2, -4.0)))
    assert match_spectra(dag_spectrum_oracle(sys), eigenvalues(build_matrix(sys))) < 1e-12
    assert dag_spectrum_oracle(NetworkSystem((-2.5,), ())).abscissa == -2.5


def test_dag_oracle_rejects_cycle():
    with pytest.raises(ValueError):
        dag_spectrum_oracle(NetworkSystem((-1.0, -1.0), ((0, 1, 1.0), (1, 0, 1.0))))


def test_designed_removal_is_hurwitz(rng):
    for _ in range(10):
        sys = random_stabilizable_network(rng)
        M = build_matrix(sys)
        res = place_controls(DirectedGraph.from_network(sys))
        Mbar = functional_matrix_closed_form(M, design_vibrations(M, res.control_set)).matrix
        assert is_hurwitz(Mbar)
        assert spectral_abscissa(Mbar) == pytest.approx(max(sys.d), abs=1e-8)


@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_dag_abscissa_is_max_diagonal(seed, n):
    sys = random_dag_network(np.random.default_rng(seed), n, density=0.5)
    M = build_matrix(sys)
    assert spectral_abscissa(M) == pytest.approx(max(sys.d), abs=1e-8)


@given(st.integers(0, 2**32 - 1))
def test_permutation_invariance(seed):
    r = np.random.default_rng(seed)
    M = r.standard_normal((6, 6))
    p = r.permutation(6)
    assert match_spectra(eigenvalues(M), eigenvalues(M[np.ix_(p, p)])) < 1e-8


@given(st.integers(0, 2**32 - 1))
def test_hurwitz_agrees_with_abscissa(seed):
    M = np.random.default_rng(seed).standard_normal((4, 4)) - 0.5 * np.eye(4)
    assert is_hurwitz(M) == (spectral_abscissa(M) < 0)


def test_match_spectra_size_mismatch():
    with pytest.raises(ValueError):
        match_spectra(Spectrum.of([1]), Spectrum.of([1, 2]))
