import math
import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from vibstab.design import VibrationSchedule, design_vibrations
from vibstab.graph import DirectedGraph, place_controls
from vibstab.instances import example3_network
from vibstab.network import build_matrix
from vibstab.simulation import (StepSizeWarning, ThresholdNotFoundError, Trajectory,
                                UnderResolvedError, classify_decay, find_epsilon_threshold,
                                save_csv, simulate_controlled, simulate_lti)


def test_scalar_exponential():
    tr = simulate_lti(np.array([[-1.0]]), np.array([1.0]), 1.0, 1e-3)
    assert tr.states[-1, 0] == pytest.approx(math.exp(-1), abs=1e-8)
    assert tr.times[-1] == pytest.approx(1.0)


def test_zero_matrix_constant():
    tr = simulate_lti(np.zeros((3, 3)), np.array([1.0, 2.0, 3.0]), 2.0, 0.01)
    assert np.all(tr.states == [1.0, 2.0, 3.0])


def test_rotation_norm_conserved():
    tr = simulate_lti(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.array([1.0, 0.0]), 10.0, 1e-3)
    assert np.max(np.abs(tr.norms - 1)) < 1e-6


def test_matches_matrix_exponential(rng):
    M = rng.standard_normal((4, 4)) - 2 * np.eye(4)
    x0 = rng.standard_normal(4)
    tr = simulate_lti(M, x0, 3.0, 1e-3)
    ref = expm(3.0 * M) @ x0
    assert np.linalg.norm(tr.states[-1] - ref) <= 1e-6 * np.linalg.norm(ref)


def test_step_warning():
    with pytest.warns(StepSizeWarning):
        simulate_lti(np.array([[-100.0]]), None, 0.1, 0.01)


def test_blowup_flagged():
    with pytest.warns(RuntimeWarning), pytest.warns(StepSizeWarning):
        tr = simulate_lti(np.array([[1.0]]), None, 1e4, 1.0, max_samples=10)
    assert not tr.finite
    assert np.all(np.isfinite(tr.states))
    assert classify_decay(tr, 1.0).classification == "growing"


def test_empty_schedule_bit_identical():
    M = build_matrix(example3_network())
    a = simulate_lti(M, None, 5.0, 1e-3)
    b = simulate_controlled(M, VibrationSchedule(()), None, 5.0, 1e-3)
    assert np.array_equal(a.states, b.states) and np.array_equal(a.times, b.times)


def _designed(omega_base=1.0, eps=1e-2):
    sys = example3_network()
    M = build_matrix(sys)
    res = place_controls(DirectedGraph.from_network(sys))
    return M, design_vibrations(M, res.control_set, omega_base, epsilon=eps)


def test_under_resolved_is_error():
    M, sched = _designed()
    with pytest.raises(UnderResolvedError):
        simulate_controlled(M, sched, None, 1.0, dt=0.01)


def test_controlled_decays_and_uncontrolled_grows():
    M, sched = _designed(eps=1e-2)
    tr = simulate_controlled(M, sched, None, 20.0)
    assert classify_decay(tr, 4.0).classification == "decaying"
    assert classify_decay(simulate_lti(M, None, 20.0, 1e-3), 4.0).classification == "growing"


def test_large_epsilon_not_decaying():
    M, sched = _designed(eps=10.0)
    tr = simulate_controlled(M, sched, None, 40.0)
    assert classify_decay(tr, 8.0).classification != "decaying"


def test_deterministic():
    M, sched = _designed(eps=0.05)
    a = simulate_controlled(M, sched, None, 2.0)
    b = simulate_controlled(M, sched, None, 2.0)
    assert np.array_equal(a.states, b.states)


def test_halving_dt():
    M, sched = _designed(eps=1e-2)
    a = simulate_controlled(M, sched, None, 5.0)
    b = simulate_controlled(M, sched, None, 5.0, dt=a.metadata["dt"] / 2)
    assert np.linalg.norm(a.states[-1] - b.states[-1]) < 1e-4 * np.linalg.norm(b.states[-1])


def _traj(f, t_final=10.0):
    t = np.linspace(0, t_final, 1001)
    return Trajectory(t, f(t)[:, None])


def test_classify_examples():
    assert classify_decay(_traj(np.exp, 10.0), 2.0).classification == "growing"
    assert classify_decay(_traj(lambda t: np.exp(-t)), 2.0).classification == "decaying"
    v = classify_decay(_traj(np.ones_like), 2.0)
    assert v.classification == "inconclusive" and v.shrink_factor == 1.0


def test_classify_ignores_ripple():
    # a decaying envelope with fast ripple that touches zero
    v = classify_decay(_traj(lambda t: np.exp(-t) * np.abs(np.sin(40 * t))), 2.0)
    assert v.classification == "decaying"


def test_classify_needs_two_windows():
    with pytest.raises(ValueError):
        classify_decay(_traj(np.ones_like, 3.0), 2.0)


def test_threshold_two_node():
    M = np.array([[-1.0, 2.0], [3.0, -1.0]])  # unstable: eigenvalues -1 +- sqrt(6)
    sched = design_vibrations(M, {(1, 0)}, 1.0)
    eps_hat, table = find_epsilon_threshold(M, sched, eps_grid=np.logspace(-3, 1, 5))
    assert eps_hat > 0
    for eps, verdict in table:
        if eps <= eps_hat / 2:
            assert verdict.classification == "decaying"


def test_threshold_precondition():
    M = np.array([[-1.0, 2.0], [3.0, -1.0]])
    sched = design_vibrations(M, {(1, 0)}, 1.0, removal=0.0)
    with pytest.raises(ValueError, match="Hurwitz"):
        find_epsilon_threshold(M, sched)


def test_threshold_vacuous():
    eps_hat, table = find_epsilon_threshold(np.diag([-1.0, -2.0]), VibrationSchedule(()),
                                            eps_grid=[1e-3, 1e-1, 10.0])
    assert eps_hat == 10.0 and all(v.classification == "decaying" for _, v in table)


def test_threshold_not_found():
    M = np.array([[-1.0, 2.0], [3.0, -1.0]])
    sched = design_vibrations(M, {(1, 0)}, 1.0)
    with pytest.raises(ThresholdNotFoundError) as info:
        find_epsilon_threshold(M, sched, eps_grid=[10.0, 30.0])
    assert len(info.value.table) == 2


def test_csv(tmp_path):
    tr = simulate_lti(-np.eye(2), None, 0.01, 1e-3)
    save_csv(tr, tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "t,x1,x2" and len(lines) == len(tr.times) + 1


@pytest.mark.slow
def test_halving_dt_on_acceptance_instances():
    from test_acceptance import _unstable_cases

    worst = 0.0
    for M, sched, horizon in _unstable_cases():
        a = simulate_controlled(M, sched, None, horizon)
        b = simulate_controlled(M, sched, None, horizon, dt=a.metadata["dt"] / 2)
        worst = max(worst, np.linalg.norm(a.states[-1] - b.states[-1]) / np.linalg.norm(b.states[-1]))
    assert worst < 1e-4
