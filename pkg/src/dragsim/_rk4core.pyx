# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 propagation kernels for small dense and tridiagonal models.

Semantics match dragsim._purekernels exactly: the drive is pre-sampled on
the half-step grid (step k consumes s[2k], s[2k+1], s[2k+2]) and the final
step may be shorter so the evolution lands exactly on the pulse end.

Complex amplitudes are handled as interleaved (re, im) doubles so the
inner loops compile to plain FMA chains.
"""

import numpy as np

ctypedef double complex cplx


cdef inline void _dense_apply_m2(int d, const double* h0, const double* sx,
                                 double s, const double* u, double* out) noexcept nogil:
    # two-column specialization: the hot path of the calibration loops
    cdef int i, l, row, col
    cdef double hr, a0r, a0i, a1r, a1i
    for i in range(d):
        row = 4 * i
        a0r = h0[i] * u[row]
        a0i = h0[i] * u[row + 1]
        a1r = h0[i] * u[row + 2]
        a1i = h0[i] * u[row + 3]
        col = 0
        for l in range(d):
            hr = s * sx[i * d + l]
            a0r += hr * u[col]
            a0i += hr * u[col + 1]
            a1r += hr * u[col + 2]
            a1i += hr * u[col + 3]
            col += 4
        # times -i: (ar + i*ai)(-i) = ai - i*ar
        out[row] = a0i
        out[row + 1] = -a0r
        out[row + 2] = a1i
        out[row + 3] = -a1r


cdef inline void _dense_apply(int d, int m, const double* h0, const double* sx,
                              double s, const double* u, double* out) noexcept nogil:
    # out = -i * (diag(h0) + s*sx) @ u ; u, out interleaved re/im, d x m block
    cdef int i, j, l, row, col
    cdef double hr, ar, ai
    if m == 2:
        _dense_apply_m2(d, h0, sx, s, u, out)
        return
    for i in range(d):
        row = 2 * i * m
        for j in range(m):
            ar = h0[i] * u[row + 2 * j]
            ai = h0[i] * u[row + 2 * j + 1]
            for l in range(d):
                hr = s * sx[i * d + l]
                col = 2 * l * m + 2 * j
                ar += hr * u[col]
                ai += hr * u[col + 1]
            # times -i: (ar + i*ai)(-i) = ai - i*ar
            out[row + 2 * j] = ai
            out[row + 2 * j + 1] = -ar


cdef void _dense_rk4(int d, int m, const double* h0, const double* sx,
                     const double* s, double dt, Py_ssize_t n_full,
                     double dt_last, double* u, double* scratch,
                     Py_ssize_t stride, double* snaps) noexcept nogil:
    # scratch holds 5 blocks of 2*d*m doubles; snaps (optional) receives the
    # initial block, one block every `stride` steps and the final block.
    cdef Py_ssize_t n_total = n_full + (1 if dt_last > 0.0 else 0)
    cdef Py_ssize_t k, c, i, sz = 2 * d * m
    cdef double h, s1, s2, s3
    cdef double* k1 = scratch
    cdef double* k2 = k1 + sz
    cdef double* k3 = k2 + sz
    cdef double* k4 = k3 + sz
    cdef double* tmp = k4 + sz
    c = 0
    if snaps != NULL:
        for i in range(sz):
            snaps[i] = u[i]
        c = 1
    for k in range(n_total):
        h = dt if k < n_full else dt_last
        s1 = s[2 * k]
        s2 = s[2 * k + 1]
        s3 = s[2 * k + 2]
        _dense_apply(d, m, h0, sx, s1, u, k1)
        for i in range(sz):
            tmp[i] = u[i] + (0.5 * h) * k1[i]
        _dense_apply(d, m, h0, sx, s2, tmp, k2)
        for i in range(sz):
            tmp[i] = u[i] + (0.5 * h) * k2[i]
        _dense_apply(d, m, h0, sx, s2, tmp, k3)
        for i in range(sz):
            tmp[i] = u[i] + h * k3[i]
        _dense_apply(d, m, h0, sx, s3, tmp, k4)
        for i in range(sz):
            u[i] = u[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if snaps != NULL and (k + 1) % stride == 0:
            for i in range(sz):
                snaps[c * sz + i] = u[i]
            c += 1
    if snaps != NULL and n_total % stride != 0:
        for i in range(sz):
            snaps[c * sz + i] = u[i]


def dense_block(double[::1] h0, double[:, ::1] sx, cplx[:, ::1] b0,
                double[::1] s, double dt, Py_ssize_t n_full, double dt_last):
    """Propagate the columns of b0 under U' = -i (diag(h0) + s(t) sx) U."""
    cdef int d = h0.shape[0]
    cdef int m = b0.shape[1]
    b_arr = np.array(b0, dtype=complex, copy=True, order="C")
    scratch_arr = np.empty(10 * d * m, dtype=float)
    cdef cplx[:, ::1] b = b_arr
    cdef double[::1] scratch = scratch_arr
    with nogil:
        _dense_rk4(d, m, &h0[0], &sx[0, 0], &s[0], dt, n_full, dt_last,
                   <double*> &b[0, 0], &scratch[0], 1, NULL)
    return b_arr


def dense_unitary(double[::1] h0, double[:, ::1] sx, double[::1] s,
                  double dt, Py_ssize_t n_full, double dt_last):
    """Propagator U(t_p, 0) from the identity."""
    cdef int d = h0.shape[0]
    return dense_block(h0, sx, np.eye(d, dtype=complex), s, dt, n_full, dt_last)


def dense_state(double[::1] h0, double[:, ::1] sx, cplx[::1] psi0,
                double[::1] s, double dt, Py_ssize_t n_full, double dt_last,
                Py_ssize_t stride):
    """State propagation with snapshots every `stride` steps."""
    cdef int d = h0.shape[0]
    cdef Py_ssize_t n_total = n_full + (1 if dt_last > 0.0 else 0)
    cdef Py_ssize_t n_snap = 1 + n_total // stride + (1 if n_total % stride else 0)
    psi_arr = np.array(psi0, dtype=complex, copy=True)
    snaps_arr = np.empty((n_snap, d), dtype=complex)
    scratch_arr = np.empty(10 * d, dtype=float)
    cdef cplx[::1] psi = psi_arr
    cdef cplx[:, ::1] snaps = snaps_arr
    cdef double[::1] scratch = scratch_arr
    with nogil:
        _dense_rk4(d, 1, &h0[0], &sx[0, 0], &s[0], dt, n_full, dt_last,
                   <double*> &psi[0], &scratch[0], stride,
                   <double*> &snaps[0, 0])
    return psi_arr, snaps_arr


cdef inline void _tridiag_apply(int n, const double* onsite, double hop,
                                const double* phi, double s,
                                const double* p, double* out) noexcept nogil:
    # out = -i * H p with H = tridiag(-hop, onsite + s*phi, -hop); interleaved
    cdef int i, q
    cdef double g, ar, ai
    g = onsite[0] + s * phi[0]
    ar = g * p[0] - hop * p[2]
    ai = g * p[1] - hop * p[3]
    out[0] = ai
    out[1] = -ar
    for i in range(1, n - 1):
        q = 2 * i
        g = onsite[i] + s * phi[i]
        ar = g * p[q] - hop * (p[q - 2] + p[q + 2])
        ai = g * p[q + 1] - hop * (p[q - 1] + p[q + 3])
        out[q] = ai
        out[q + 1] = -ar
    q = 2 * (n - 1)
    g = onsite[n - 1] + s * phi[n - 1]
    ar = g * p[q] - hop * p[q - 2]
    ai = g * p[q + 1] - hop * p[q - 1]
    out[q] = ai
    out[q + 1] = -ar


def tridiag_state(double[::1] onsite, double hop, double[::1] phi,
                  cplx[::1] psi0, double[::1] s, double dt,
                  Py_ssize_t n_full, double dt_last, Py_ssize_t stride):
    """Lattice-state propagation: H = tridiag(-hop, onsite, -hop) + s*diag(phi)."""
    cdef int n = onsite.shape[0]
    cdef Py_ssize_t n_total = n_full + (1 if dt_last > 0.0 else 0)
    cdef Py_ssize_t n_snap = 1 + n_total // stride + (1 if n_total % stride else 0)
    psi_arr = np.array(psi0, dtype=complex, copy=True)
    snaps_arr = np.empty((n_snap, n), dtype=complex)
    scratch_arr = np.empty(10 * n, dtype=float)
    cdef cplx[::1] psi_mv = psi_arr
    cdef cplx[:, ::1] snaps_mv = snaps_arr
    cdef double[::1] scratch = scratch_arr
    cdef double* psi = <double*> &psi_mv[0]
    cdef double* snaps = <double*> &snaps_mv[0, 0]
    cdef double* k1
    cdef double* k2
    cdef double* k3
    cdef double* k4
    cdef double* tmp
    cdef Py_ssize_t k, c, i, sz = 2 * n
    cdef double h, s1, s2, s3
    with nogil:
        k1 = &scratch[0]
        k2 = k1 + sz
        k3 = k2 + sz
        k4 = k3 + sz
        tmp = k4 + sz
        for i in range(sz):
            snaps[i] = psi[i]
        c = 1
        for k in range(n_total):
            h = dt if k < n_full else dt_last
            s1 = s[2 * k]
            s2 = s[2 * k + 1]
            s3 = s[2 * k + 2]
            _tridiag_apply(n, &onsite[0], hop, &phi[0], s1, psi, k1)
            for i in range(sz):
                tmp[i] = psi[i] + (0.5 * h) * k1[i]
            _tridiag_apply(n, &onsite[0], hop, &phi[0], s2, tmp, k2)
            for i in range(sz):
                tmp[i] = psi[i] + (0.5 * h) * k2[i]
            _tridiag_apply(n, &onsite[0], hop, &phi[0], s2, tmp, k3)
            for i in range(sz):
                tmp[i] = psi[i] + h * k3[i]
            _tridiag_apply(n, &onsite[0], hop, &phi[0], s3, tmp, k4)
            for i in range(sz):
                psi[i] = psi[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if (k + 1) % stride == 0:
                for i in range(sz):
                    snaps[c * sz + i] = psi[i]
                c += 1
        if n_total % stride != 0:
            for i in range(sz):
                snaps[c * sz + i] = psi[i]
    return psi_arr, snaps_arr
