"""Hot co-array kernels with a compiled backend and a NumPy fallback.

The compiled module is used when it was built and importable; setting
``SUBSPACE_DOA_PURE_PYTHON=1`` forces the NumPy versions. ``BACKEND`` names
the active one.
"""

import os

from . import _pykernels

if os.environ.get("SUBSPACE_DOA_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

lag_average = _impl.lag_average
toeplitz_hermitian = _impl.toeplitz_hermitian
diag_sums = _impl.diag_sums

__all__ = ["BACKEND", "lag_average", "toeplitz_hermitian", "diag_sums"]
