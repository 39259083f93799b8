"""NumPy implementations of the co-array kernels.

These are the reference versions; ``_ckernels`` mirrors them loop for loop.
All functions operate on a leading batch axis.
"""

import numpy as np


def lag_average(R, S, M):
    """Hermitian redundancy averaging of a batch of SLA covariances.

    Args:
        R: complex array (B, N, N).
        S: int array (N,) of sensor indices (any origin, strictly increasing).
        M: number of virtual ULA elements.

    Returns:
        complex array (B, M): first rows ``u`` of the completed Toeplitz
        matrices, ``u[l] = conj(r(l))`` with ``r(l)`` the lag-``l`` average.
    """
    R = np.asarray(R, dtype=np.complex128)
    S = np.asarray(S, dtype=np.int64)
    B, N, _ = R.shape
    diff = (S[:, None] - S[None, :]).ravel()
    lags = np.arange(M)
    pos = (diff[None, :] == lags[:, None]).astype(np.float64)
    neg = (diff[None, :] == -lags[:, None]).astype(np.float64)
    count = pos.sum(axis=1) + neg.sum(axis=1)
    if np.any(count == 0):
        raise ValueError("co-array has holes; missing lags %s" % lags[count == 0].tolist())
    flat = R.reshape(B, N * N)
    r = (flat @ pos.T + flat.conj() @ neg.T) / count
    return r.conj()


def toeplitz_hermitian(U):
    """Materialize Hermitian Toeplitz matrices from first rows (B, M)."""
    U = np.asarray(U, dtype=np.complex128)
    M = U.shape[1]
    off = np.arange(M)[None, :] - np.arange(M)[:, None]
    vals = U[:, np.abs(off)]
    T = np.where(off >= 0, vals, vals.conj())
    idx = np.arange(M)
    T[:, idx, idx] = U[:, :1].real
    return T


def diag_sums(C):
    """Sums along every diagonal of a batch of square matrices.

    Returns complex array (B, 2M-1) whose column ``u + M - 1`` holds
    ``sum_m C[m, m + u]`` for ``u`` in ``[-(M-1), M-1]``.
    """
    C = np.asarray(C, dtype=np.complex128)
    M = C.shape[-1]
    return np.stack(
        [np.trace(C, offset=u, axis1=1, axis2=2) for u in range(-(M - 1), M)],
        axis=1,
    )
