"""Co-array covariance completion and subspace extraction."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .array_sim import as_hermitian
from .errors import ContractError
from .grassmann import SubspacePoint, sorted_eigh


@dataclass(frozen=True)
class ToeplitzHermitian:
    """Hermitian Toeplitz matrix given by its first row (entry 0 real)."""

    first_row: np.ndarray

    def matrix(self):
        return kernels.toeplitz_hermitian(self.first_row[None, :])[0]

    @property
    def size(self):
        return self.first_row.shape[0]


def direct_augmentation_batch(rhat_s, geom):
    """First rows of the completed Toeplitz matrices for a stack (B, N, N)."""
    if not geom.coarray_complete:
        raise ContractError(f"co-array of S={geom.S} has holes for M={geom.M}")
    rhat_s = np.asarray(rhat_s, dtype=np.complex128)
    if rhat_s.shape[-2:] != (geom.N, geom.N):
        raise ContractError(f"expected ({geom.N}, {geom.N}) covariances, got {rhat_s.shape[-2:]}")
    return kernels.lag_average(rhat_s.reshape(-1, geom.N, geom.N), geom.S, geom.M)


def direct_augmentation(rhat_s, geom):
    """Redundancy averaging: least-squares Hermitian Toeplitz completion.

    Each lag ``l`` of the ULA covariance is the average of every SLA entry at
    lag ``l`` together with the conjugates of the entries at lag ``-l``.
    The result is Hermitian and Toeplitz but may be indefinite.
    """
    u = direct_augmentation_batch(rhat_s, geom)[0]
    u[0] = u[0].real
    return ToeplitzHermitian(u)


class SmoothedCovariance(np.ndarray):
    """Result of ``spatial_smoothing`` that remembers its factor R.

    Subspace extraction uses the SVD of the factor instead of the eigen-
    decomposition of ``R R^H / M``, which would square the condition number.
    Arrays derived from this one (slices, arithmetic) drop the factor.
    """

    def __array_finalize__(self, obj):
        self.factor = None


def spatial_smoothing(R):
    """``R R^H / M``: positive semidefinite with the column space of R."""
    R = np.asarray(R, dtype=np.complex128)
    out = R @ np.swapaxes(R.conj(), -1, -2) / R.shape[-1]
    out = (0.5 * (out + np.swapaxes(out.conj(), -1, -2))).view(SmoothedCovariance)
    out.factor = R
    return out


def _split(r, k):
    factor = getattr(r, "factor", None)
    M = np.shape(r)[-1]
    if not 1 <= k <= M - 1:
        raise ContractError(f"k={k} outside [1, {M - 1}]")
    if factor is not None and factor.ndim == 2:
        # eigenvectors of R R^H are the left singular vectors of R
        V, s, _ = np.linalg.svd(factor)
        return s**2 / M, V
    return sorted_eigh(as_hermitian(np.asarray(r)))


def signal_subspace(r, k):
    """Span of the k leading eigenvectors of a Hermitian matrix."""
    _, V = _split(r, k)
    return SubspacePoint(V[:, :k])


def noise_subspace(r, k):
    """Span of the M - k trailing eigenvectors of a Hermitian matrix."""
    _, V = _split(r, k)
    return SubspacePoint(V[:, k:])


def da_ss_subspace(rhat_s, geom, k):
    """Direct augmentation, spatial smoothing, then the k-dim signal subspace."""
    return signal_subspace(spatial_smoothing(direct_augmentation(rhat_s, geom).matrix()), k)
