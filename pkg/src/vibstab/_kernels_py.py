"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and return values; used when the extension is not built
or when ``VIBSTAB_BACKEND=python`` is set.
"""

import numpy as np


def _vib(mu, omega, phi, s, scale=1.0):
    return scale * mu * np.sin(omega * s + phi)


def _weight(k, last, window):
    if window == 1:
        return 1.0 - np.cos(2.0 * np.pi * k / last)
    return 0.5 if k == 0 or k == last else 1.0


def transition_average(M, rows, cols, mu, omega, phi, s0, h, nsteps, accumulate, window=0):
    n = M.shape[0]
    half = nsteps // 2
    P = np.eye(n)
    F = np.eye(n)
    acc = np.zeros((n, n))
    acc_half = np.zeros((n, n))
    pacc = np.zeros((n, n))
    pacc_half = np.zeros((n, n))

    def left(v, X):
        out = np.zeros((n, n))
        np.add.at(out, rows, v[:, None] * X[cols, :])
        return out

    def right_neg(v, X):
        out = np.zeros((n, n))
        np.add.at(out.T, cols, -v[:, None] * X[:, rows].T)
        return out

    wsum = 0.0
    wsum_half = 0.0
    if accumulate:
        f0 = F @ M @ P
        w = _weight(0, nsteps, window)
        wsum += w
        acc += w * f0
        pacc += w * P
        if half > 0:
            w = _weight(0, half, window)
            wsum_half += w
            acc_half += w * f0
            pacc_half += w * P

    for step in range(nsteps):
        s = s0 + step * h
        v1 = _vib(mu, omega, phi, s)
        v2 = _vib(mu, omega, phi, s + 0.5 * h)
        v3 = _vib(mu, omega, phi, s + h)

        k1 = left(v1, P)
        k2 = left(v2, P + 0.5 * h * k1)
        k3 = left(v2, P + 0.5 * h * k2)
        k4 = left(v3, P + h * k3)
        l1 = right_neg(v1, F)
        l2 = right_neg(v2, F + 0.5 * h * l1)
        l3 = right_neg(v2, F + 0.5 * h * l2)
        l4 = right_neg(v3, F + h * l3)
        P = P + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        F = F + h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4)

        if accumulate:
            f = F @ M @ P
            w = _weight(step + 1, nsteps, window)
            wsum += w
            acc += w * f
            pacc += w * P
            if step + 1 <= half:
                w = _weight(step + 1, half, window)
                wsum_half += w
                acc_half += w * f
                pacc_half += w * P

    return P, F, acc, acc_half, pacc, pacc_half, wsum, wsum_half


def rk4_trajectory(M, rows, cols, mu, omega, phi, eps, x0, t0, dt, nsteps, stride):
    n = M.shape[0]
    inv = 1.0 / eps
    x = np.array(x0, dtype=np.float64)
    idx = [0]
    out = [x.copy()]

    def rhs(v, y):
        dy = M @ y
        np.add.at(dy, rows, v * y[cols])
        return dy

    finite = True
    for step in range(nsteps):
        t = t0 + step * dt
        v1 = _vib(mu, omega, phi, t / eps, inv)
        v2 = _vib(mu, omega, phi, (t + 0.5 * dt) / eps, inv)
        v3 = _vib(mu, omega, phi, (t + dt) / eps, inv)
        k1 = rhs(v1, x)
        k2 = rhs(v2, x + 0.5 * dt * k1)
        k3 = rhs(v2, x + 0.5 * dt * k2)
        k4 = rhs(v3, x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            finite = False
            break
        if (step + 1) % stride == 0 or step + 1 == nsteps:
            idx.append(step + 1)
            out.append(x.copy())

    return np.asarray(idx, dtype=np.intp), np.asarray(out).reshape(-1, n), finite
