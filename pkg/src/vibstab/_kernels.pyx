# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Both kernels take the vibration schedule as flat arrays (``rows``, ``cols``,
``mu``, ``omega``, ``phi``) of equal length; entry ``k`` contributes
``mu[k] * sin(omega[k] * s + phi[k])`` at matrix position ``(rows[k], cols[k])``.
The pure-numpy twin lives in :mod:`vibstab._kernels_py` and must return the
same values up to rounding.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, isfinite, M_PI

cnp.import_array()


cdef inline void _vib_values(const double[::1] mu, const double[::1] omega,
                             const double[::1] phi, double s, double scale,
                             double[::1] out) noexcept nogil:
    cdef Py_ssize_t k
    for k in range(mu.shape[0]):
        out[k] = scale * mu[k] * sin(omega[k] * s + phi[k])


cdef inline void _left_mul(const Py_ssize_t[::1] rows, const Py_ssize_t[::1] cols,
                           const double[::1] v, double[:, ::1] X,
                           double[:, ::1] out) noexcept nogil:
    # out = V @ X for sparse V
    cdef Py_ssize_t k, c, n = X.shape[1]
    out[:, :] = 0.0
    for k in range(v.shape[0]):
        for c in range(n):
            out[rows[k], c] += v[k] * X[cols[k], c]


cdef inline void _right_mul_neg(const Py_ssize_t[::1] rows, const Py_ssize_t[::1] cols,
                                const double[::1] v, double[:, ::1] X,
                                double[:, ::1] out) noexcept nogil:
    # out = -X @ V for sparse V
    cdef Py_ssize_t k, r, n = X.shape[0]
    out[:, :] = 0.0
    for k in range(v.shape[0]):
        for r in range(n):
            out[r, cols[k]] -= v[k] * X[r, rows[k]]


cdef inline void _conj_add(double[:, ::1] F, const double[:, ::1] M,
                           double[:, ::1] P, double[:, ::1] tmp,
                           double[:, ::1] acc, double w) noexcept nogil:
    # acc += w * F @ M @ P
    cdef Py_ssize_t i, j, k, n = M.shape[0]
    cdef double s
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += M[i, k] * P[k, j]
            tmp[i, j] = s
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += F[i, k] * tmp[k, j]
            acc[i, j] += w * s


cdef inline double _weight(Py_ssize_t k, Py_ssize_t last, int window) noexcept nogil:
    # trapezoid node weight on grid 0..last, optionally Hann-tapered
    if window == 1:
        return 1.0 - cos(2.0 * M_PI * k / last)
    if k == 0 or k == last:
        return 0.5
    return 1.0


def transition_average(double[:, ::1] M, Py_ssize_t[::1] rows, Py_ssize_t[::1] cols,
                       double[::1] mu, double[::1] omega, double[::1] phi,
                       double s0, double h, Py_ssize_t nsteps, bint accumulate,
                       int window=0):
    """Propagate Psi' = V Psi and Phi' = -Phi V with RK4 from ``s0``.

    Returns ``(psi, phi_inv, acc, acc_half, psi_acc, psi_acc_half, wsum,
    wsum_half)``: weighted sums of ``Phi M Psi`` and ``Psi`` over the grid
    nodes of the full horizon and of its first ``nsteps // 2`` steps, plus
    the weight totals. ``window`` 0 is the plain trapezoid rule, 1 a Hann
    taper over each horizon.
    """
    cdef Py_ssize_t n = M.shape[0], m = mu.shape[0], half = nsteps // 2
    cdef Py_ssize_t step, i, j
    cdef double s, w, wsum = 0.0, wsum_half = 0.0

    P_arr = np.eye(n)
    F_arr = np.eye(n)
    acc_arr = np.zeros((n, n))
    acc_half_arr = np.zeros((n, n))
    pacc_arr = np.zeros((n, n))
    pacc_half_arr = np.zeros((n, n))
    cdef double[:, ::1] P = P_arr
    cdef double[:, ::1] F = F_arr
    cdef double[:, ::1] acc = acc_arr
    cdef double[:, ::1] acc_half = acc_half_arr
    cdef double[:, ::1] pacc = pacc_arr
    cdef double[:, ::1] pacc_half = pacc_half_arr
    cdef double[:, ::1] tmp = np.zeros((n, n))
    cdef double[:, ::1] stage = np.zeros((n, n))
    cdef double[:, ::1] k1 = np.zeros((n, n))
    cdef double[:, ::1] k2 = np.zeros((n, n))
    cdef double[:, ::1] k3 = np.zeros((n, n))
    cdef double[:, ::1] k4 = np.zeros((n, n))
    cdef double[:, ::1] l1 = np.zeros((n, n))
    cdef double[:, ::1] l2 = np.zeros((n, n))
    cdef double[:, ::1] l3 = np.zeros((n, n))
    cdef double[:, ::1] l4 = np.zeros((n, n))
    cdef double[::1] v1 = np.zeros(m)
    cdef double[::1] v2 = np.zeros(m)
    cdef double[::1] v3 = np.zeros(m)

    with nogil:
        if accumulate:
            w = _weight(0, nsteps, window)
            wsum += w
            _conj_add(F, M, P, tmp, acc, w)
            for i in range(n):
                for j in range(n):
                    pacc[i, j] += w * P[i, j]
            if half > 0:
                w = _weight(0, half, window)
                wsum_half += w
                _conj_add(F, M, P, tmp, acc_half, w)
                for i in range(n):
                    for j in range(n):
                        pacc_half[i, j] += w * P[i, j]

        for step in range(nsteps):
            s = s0 + step * h
            _vib_values(mu, omega, phi, s, 1.0, v1)
            _vib_values(mu, omega, phi, s + 0.5 * h, 1.0, v2)
            _vib_values(mu, omega, phi, s + h, 1.0, v3)

            _left_mul(rows, cols, v1, P, k1)
            for i in range(n):
                for j in range(n):
                    stage[i, j] = P[i, j] + 0.5 * h * k1[i, j]
            _left_mul(rows, cols, v2, stage, k2)
            for i in range(n):
                for j in range(n):
                    stage[i, j] = P[i, j] + 0.5 * h * k2[i, j]
            _left_mul(rows, cols, v2, stage, k3)
            for i in range(n):
                for j in range(n):
                    stage[i, j] = P[i, j] + h * k3[i, j]
            _left_mul(rows, cols, v3, stage, k4)

            _right_mul_neg(rows, cols, v1, F, l1)
            for i in range(n):
                for j in range(n):
                    stage[i, j] = F[i, j] + 0.5 * h * l1[i, j]
            _right_mul_neg(rows, cols, v2, stage, l2)
            for i in range(n):
                for j in range(n):
                    stage[i, j] = F[i, j] + 0.5 * h * l2[i, j]
            _right_mul_neg(rows, cols, v2, stage, l3)
            for i in range(n):
                for j in range(n):
                    stage[i, j] = F[i, j] + h * l3[i, j]
            _right_mul_neg(rows, cols, v3, stage, l4)

            for i in range(n):
                for j in range(n):
                    P[i, j] += h / 6.0 * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
                    F[i, j] += h / 6.0 * (l1[i, j] + 2.0 * l2[i, j] + 2.0 * l3[i, j] + l4[i, j])

            if accumulate:
                w = _weight(step + 1, nsteps, window)
                wsum += w
                _conj_add(F, M, P, tmp, acc, w)
                for i in range(n):
                    for j in range(n):
                        pacc[i, j] += w * P[i, j]
                if step + 1 <= half:
                    w = _weight(step + 1, half, window)
                    wsum_half += w
                    _conj_add(F, M, P, tmp, acc_half, w)
                    for i in range(n):
                        for j in range(n):
                            pacc_half[i, j] += w * P[i, j]

    return P_arr, F_arr, acc_arr, acc_half_arr, pacc_arr, pacc_half_arr, wsum, wsum_half


cdef inline void _rhs(const double[:, ::1] M, const Py_ssize_t[::1] rows,
                      const Py_ssize_t[::1] cols, const double[::1] v,
                      const double[::1] x, double[::1] out) noexcept nogil:
    cdef Py_ssize_t i, j, k, n = M.shape[0]
    cdef double s
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += M[i, j] * x[j]
        out[i] = s
    for k in range(v.shape[0]):
        out[rows[k]] += v[k] * x[cols[k]]


def rk4_trajectory(double[:, ::1] M, Py_ssize_t[::1] rows, Py_ssize_t[::1] cols,
                   double[::1] mu, double[::1] omega, double[::1] phi,
                   double eps, double[::1] x0, double t0, double dt,
                   Py_ssize_t nsteps, Py_ssize_t stride):
    """RK4 for x' = (M + V(t/eps)/eps) x, sampled every ``stride`` steps.

    The last step is always sampled. Integration stops at the first
    non-finite state, which is not recorded. Returns
    ``(step_indices, states, finite)``.
    """
    cdef Py_ssize_t n = M.shape[0], m = mu.shape[0]
    cdef Py_ssize_t cap = nsteps // stride + 2
    cdef Py_ssize_t step, i, count = 0
    cdef double t, inv = 1.0 / eps
    cdef bint finite = True

    idx_arr = np.zeros(cap, dtype=np.intp)
    out_arr = np.zeros((cap, n))
    cdef Py_ssize_t[::1] idx = idx_arr
    cdef double[:, ::1] out = out_arr
    cdef double[::1] x = np.array(x0, dtype=np.float64)
    cdef double[::1] stage = np.zeros(n)
    cdef double[::1] k1 = np.zeros(n)
    cdef double[::1] k2 = np.zeros(n)
    cdef double[::1] k3 = np.zeros(n)
    cdef double[::1] k4 = np.zeros(n)
    cdef double[::1] v1 = np.zeros(m)
    cdef double[::1] v2 = np.zeros(m)
    cdef double[::1] v3 = np.zeros(m)

    with nogil:
        for i in range(n):
            out[0, i] = x[i]
        idx[0] = 0
        count = 1
        for step in range(nsteps):
            t = t0 + step * dt
            _vib_values(mu, omega, phi, t / eps, inv, v1)
            _vib_values(mu, omega, phi, (t + 0.5 * dt) / eps, inv, v2)
            _vib_values(mu, omega, phi, (t + dt) / eps, inv, v3)
            _rhs(M, rows, cols, v1, x, k1)
            for i in range(n):
                stage[i] = x[i] + 0.5 * dt * k1[i]
            _rhs(M, rows, cols, v2, stage, k2)
            for i in range(n):
                stage[i] = x[i] + 0.5 * dt * k2[i]
            _rhs(M, rows, cols, v2, stage, k3)
            for i in range(n):
                stage[i] = x[i] + dt * k3[i]
            _rhs(M, rows, cols, v3, stage, k4)
            for i in range(n):
                x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                if not isfinite(x[i]):
                    finite = False
            if not finite:
                break
            if (step + 1) % stride == 0 or step + 1 == nsteps:
                for i in range(n):
                    out[count, i] = x[i]
                idx[count] = step + 1
                count += 1

    return idx_arr[:count].copy(), out_arr[:count].copy(), bool(finite)
