"""Propagation backend selection.

The compiled extension is used when importable; the numpy reference
implementation otherwise.  Set DRAGSIM_PURE_PYTHON=1 to force the
fallback (used by the backend-equivalence tests and the benchmark).
"""

import os

if os.environ.get("DRAGSIM_PURE_PYTHON"):
    from . import _purekernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _rk4core as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _purekernels as _impl

        BACKEND = "python"

dense_block = _impl.dense_block
dense_unitary = _impl.dense_unitary
dense_state = _impl.dense_state
tridiag_state = _impl.tridiag_state


def backend() -> str:
    """Name of the active propagation backend ('cython' or 'python')."""
    return BACKEND
