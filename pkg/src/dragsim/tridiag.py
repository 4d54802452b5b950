"""Implicit-shift QL eigensolver for real symmetric tridiagonal matrices.

Direct structure-exploiting solver in the classic tqli formulation:
Givens rotations with Wilkinson-style implicit shifts, accumulating the
rotations into an eigenvector matrix.  Eigenvalues of a symmetric
tridiagonal matrix are real and the accumulated transform is orthogonal,
so orthonormality holds to machine precision by construction.
"""

import numpy as np

from .errors import ConvergenceError

_MAX_SWEEPS = 40


def eigh_tridiagonal(diag, offdiag):
    """Eigen-decomposition of the symmetric tridiagonal matrix T(diag, offdiag).

    Parameters
    ----------
    diag : (n,) array_like
        Main diagonal.
    offdiag : (n-1,) array_like
        Sub/super diagonal.

    Returns
    -------
    w : (n,) ndarray
        Eigenvalues in ascending order.
    v : (n, n) ndarray
        Orthonormal eigenvectors as columns, v[:, k] belongs to w[k].

    Raises
    ------
    ConvergenceError
        If an eigenvalue fails to converge within the sweep budget.
    """
    d = np.asarray(diag, dtype=float).copy()
    n = d.size
    off = np.atleast_1d(np.asarray(offdiag, dtype=float))
    if n == 0:
        return np.empty(0), np.empty((0, 0))
    if n == 1:
        return d, np.ones((1, 1))
    if off.shape != (n - 1,):
        raise ValueError("offdiag must have length n-1")
    e = np.zeros(n)
    e[:-1] = off
    v = np.eye(n)

    for l in range(n):
        sweeps = 0
        while True:
            # find a negligible off-diagonal element splitting the matrix
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= np.finfo(float).eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > _MAX_SWEEPS:
                raise ConvergenceError(
                    f"QL iteration for eigenvalue {l} did not converge "
                    f"in {_MAX_SWEEPS} sweeps"
                )
            # implicit shift from the leading 2x2 block
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s, c = 1.0, 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # recover from underflow
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                # accumulate the rotation (vectorized over rows)
                col_i1 = v[:, i + 1].copy()
                v[:, i + 1] = s * v[:, i] + c * col_i1
                v[:, i] = c * v[:, i] - s * col_i1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
                continue
            continue

    order = np.argsort(d, kind="stable")
    return d[order], v[:, order]
