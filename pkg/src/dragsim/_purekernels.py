"""Numpy reference implementation of the propagation kernels.

Mirrors the compiled extension (_rk4core) step for step; selected at
import time by dragsim.kernels when the extension is unavailable or
DRAGSIM_PURE_PYTHON is set.  Roughly two orders of magnitude slower on
the small dense models (see benchmarks/bench_backends.py).
"""

import numpy as np


def _steps(n_full, dt, dt_last):
    n_total = n_full + (1 if dt_last > 0.0 else 0)
    for k in range(n_total):
        yield k, (dt if k < n_full else dt_last)


def dense_block(h0, sx, b0, s, dt, n_full, dt_last):
    """Propagate the columns of b0 under U' = -i (diag(h0) + s(t) sx) U.

    ``s`` holds the drive at the half-step grid: step k consumes
    s[2k], s[2k+1], s[2k+2].
    """
    h_diag = np.diag(h0)
    u = np.array(b0, dtype=complex, copy=True)
    for k, h in _steps(n_full, dt, dt_last):
        a1 = h_diag + s[2 * k] * sx
        a2 = h_diag + s[2 * k + 1] * sx
        a3 = h_diag + s[2 * k + 2] * sx
        k1 = -1j * (a1 @ u)
        k2 = -1j * (a2 @ (u + (0.5 * h) * k1))
        k3 = -1j * (a2 @ (u + (0.5 * h) * k2))
        k4 = -1j * (a3 @ (u + h * k3))
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u


def dense_unitary(h0, sx, s, dt, n_full, dt_last):
    """Propagator U(t_p, 0) from the identity."""
    return dense_block(h0, sx, np.eye(h0.size, dtype=complex), s, dt, n_full, dt_last)


def dense_state(h0, sx, psi0, s, dt, n_full, dt_last, stride):
    """State propagation with a snapshot every ``stride`` steps.

    Returns (final state, snapshots); snapshots[0] is the initial state
    and the final state is always the last row.
    """
    d = h0.size
    h_diag = np.diag(h0)
    n_total = n_full + (1 if dt_last > 0.0 else 0)
    n_snap = 1 + n_total // stride + (1 if n_total % stride else 0)
    snaps = np.empty((n_snap, d), dtype=complex)
    psi = psi0.astype(complex, copy=True)
    snaps[0] = psi
    c = 1
    for k, h in _steps(n_full, dt, dt_last):
        a1 = h_diag + s[2 * k] * sx
        a2 = h_diag + s[2 * k + 1] * sx
        a3 = h_diag + s[2 * k + 2] * sx
        k1 = -1j * (a1 @ psi)
        k2 = -1j * (a2 @ (psi + (0.5 * h) * k1))
        k3 = -1j * (a2 @ (psi + (0.5 * h) * k2))
        k4 = -1j * (a3 @ (psi + h * k3))
        psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (k + 1) % stride == 0:
            snaps[c] = psi
            c += 1
    if n_total % stride:
        snaps[c] = psi
    return psi, snaps


def _tridiag_apply(onsite, hop, phi, s, psi):
    out = (onsite + s * phi) * psi
    out[:-1] -= hop * psi[1:]
    out[1:] -= hop * psi[:-1]
    return -1j * out


def tridiag_state(onsite, hop, phi, psi0, s, dt, n_full, dt_last, stride):
    """Lattice-state propagation: H = tridiag(-hop, onsite, -hop) + s*diag(phi)."""
    n_total = n_full + (1 if dt_last > 0.0 else 0)
    n_snap = 1 + n_total // stride + (1 if n_total % stride else 0)
    snaps = np.empty((n_snap, onsite.size), dtype=complex)
    psi = psi0.astype(complex, copy=True)
    snaps[0] = psi
    c = 1
    for k, h in _steps(n_full, dt, dt_last):
        s1, s2, s3 = s[2 * k], s[2 * k + 1], s[2 * k + 2]
        k1 = _tridiag_apply(onsite, hop, phi, s1, psi)
        k2 = _tridiag_apply(onsite, hop, phi, s2, psi + (0.5 * h) * k1)
        k3 = _tridiag_apply(onsite, hop, phi, s2, psi + (0.5 * h) * k2)
        k4 = _tridiag_apply(onsite, hop, phi, s3, psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (k + 1) % stride == 0:
            snaps[c] = psi
            c += 1
    if n_total % stride:
        snaps[c] = psi
    return psi, snaps
