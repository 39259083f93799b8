"""Gridless DoA recovery by rooting the MUSIC polynomial."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ContractError, EstimationFailure, NumericError
from .grassmann import SubspacePoint

_MODULUS_TIE = 1e-12


@dataclass(frozen=True)
class DoaEstimate:
    theta_hat: np.ndarray
    root_moduli: np.ndarray

    @property
    def k(self):
        return self.theta_hat.shape[0]


def music_coefficients(C):
    """Coefficients ``c_u = sum_m C[m, m+u]``, u = -(M-1)..M-1."""
    C = np.asarray(C, dtype=np.complex128)
    return kernels.diag_sums(C[None])[0]


def polynomial_roots(coeffs):
    """Roots of ``sum_u c_u z^(u + M - 1)`` via companion-matrix eigenvalues.

    ``coeffs`` is ordered by ascending lag as returned by
    ``music_coefficients``. Leading and trailing zero coefficients are
    stripped; trailing zeros contribute roots at the origin.
    """
    c = np.asarray(coeffs, dtype=np.complex128)[::-1]  # highest power first
    if not np.all(np.isfinite(c)):
        raise NumericError("non-finite polynomial coefficients")
    scale = np.abs(c).max()
    if scale == 0.0:
        raise NumericError("all polynomial coefficients vanish")
    nz = np.flatnonzero(np.abs(c) > 1e-14 * scale)
    lead, last = nz[0], nz[-1]
    core = c[lead : last + 1]
    zeros_at_origin = len(c) - 1 - last
    deg = len(core) - 1
    if deg == 0:
        return np.zeros(zeros_at_origin, dtype=np.complex128)
    companion = np.zeros((deg, deg), dtype=np.complex128)
    companion[0, :] = -core[1:] / core[0]
    companion[np.arange(1, deg), np.arange(deg - 1)] = 1.0
    roots = np.linalg.eigvals(companion)
    return np.concatenate([roots, np.zeros(zeros_at_origin, dtype=np.complex128)])


def pair_roots(roots):
    """Merge the conjugate-reciprocal pairs ``(z, 1/conj(z))`` of the roots.

    Every root is reflected into the closed unit disk; reflected roots are
    then matched greedily by distance and each matched pair is replaced by
    its midpoint. An unmatched leftover (odd root count) is dropped.
    """
    roots = np.asarray(roots, dtype=np.complex128)
    roots = roots[np.isfinite(roots)]
    mod = np.abs(roots)
    reps = np.where(mod <= 1.0, roots, 1.0 / np.conj(np.where(mod > 0, roots, 1.0)))
    n = reps.shape[0]
    if n < 2:
        return np.zeros(0, dtype=np.complex128)
    i, j = np.triu_indices(n, 1)
    dist = np.abs(reps[i] - reps[j])
    used = np.zeros(n, dtype=bool)
    merged = []
    for p in np.argsort(dist, kind="stable"):
        a, b = i[p], j[p]
        if used[a] or used[b]:
            continue
        used[a] = used[b] = True
        merged.append(0.5 * (reps[a] + reps[b]))
        if len(merged) == n // 2:
            break
    return np.asarray(merged, dtype=np.complex128)


def select_roots(candidates, k):
    """Pick the k candidates closest to the unit circle (ties: larger |z|)."""
    mod = np.abs(candidates)
    dev = np.abs(1.0 - mod)
    # lexsort: last key is primary; quantize the deviation to make ties exact
    order = np.lexsort((-mod, np.round(dev / _MODULUS_TIE)))
    return candidates[order[:k]]


def root_music(subspace, k, geom, kind="signal"):
    """Estimate k angles from a signal or noise subspace of the virtual ULA.

    Args:
        subspace: ``SubspacePoint`` (or orthonormal basis) of dimension k when
            ``kind == "signal"`` or ``M - k`` when ``kind == "noise"``.
        k: number of sources.
        geom: array geometry; only ``M`` and the spacing ratio are used.
        kind: which subspace was supplied.

    Raises:
        EstimationFailure: fewer than k admissible roots were found.
    """
    U = subspace.basis if isinstance(subspace, SubspacePoint) else np.asarray(subspace, dtype=np.complex128)
    M = geom.M
    if U.shape[0] != M:
        raise ContractError(f"subspace lives in C^{U.shape[0]}, expected C^{M}")
    if not 1 <= k <= M - 1:
        raise ContractError(f"k={k} outside [1, {M - 1}]")
    if kind == "signal":
        if U.shape[1] != k:
            raise ContractError(f"signal subspace has dim {U.shape[1]}, expected {k}")
        C = np.eye(M) - U @ U.conj().T
    elif kind == "noise":
        if U.shape[1] != M - k:
            raise ContractError(f"noise subspace has dim {U.shape[1]}, expected {M - k}")
        C = U @ U.conj().T
    else:
        raise ContractError(f"kind must be 'signal' or 'noise', got {kind!r}")
    roots = polynomial_roots(music_coefficients(C))
    candidates = pair_roots(roots)
    if candidates.shape[0] < k:
        raise EstimationFailure(
            f"only {candidates.shape[0]} admissible roots for k={k}",
            {"roots": roots, "candidates": candidates, "k": k},
        )
    chosen = select_roots(candidates, k)
    omega = np.angle(chosen)
    theta = np.arccos(np.clip(omega / (2.0 * np.pi * geom.spacing_ratio), -1.0, 1.0))
    order = np.argsort(theta)
    return DoaEstimate(theta_hat=theta[order], root_moduli=np.abs(chosen)[order])
