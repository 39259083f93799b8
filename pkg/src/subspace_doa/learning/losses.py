"""Subspace, covariance and end-to-end losses with analytic gradients.

Gradients w.r.t. a complex matrix X are returned as
``dL/dRe X + 1j * dL/dIm X``. Batched functions take a leading batch axis
and return per-sample losses; callers average.

Subspace loss gradient
----------------------
The loss depends on X only through the projector ``P`` onto the top-k
eigenvectors of ``G = X X^H``. With ``c_i`` the eigenvalues of
``T^H P T`` (squared principal cosines against the target basis T)::

    dL/dP     = T W diag(dL/dc) W^H T^H
    dL/dG     = V [ (V^H dL/dP V) o F ] V^H,  F_ij = 1/|lam_i - lam_j| across blocks
    dL/dX     = 2 (dL/dG) X

Only the gap between eigenvalue k and k+1 enters, so ties inside either
block are harmless.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from ..array_sim import manifold_matrix
from ..errors import ContractError, NumericError
from ..grassmann import (
    DISTANCE_KINDS,
    SubspacePoint,
    distance_angle_grad,
    distance_from_angles,
    principal_angles_batch,
    sorted_eigh,
)
from .network import r_index

GAP_TOL = 1e-12
COS_EPS = 1e-7
_JITTER_SEED = 20240229


@dataclass
class SplitInfo:
    eigenvalues: np.ndarray
    degenerate: bool


def _herm(A):
    return np.swapaxes(A.conj(), -1, -2)


def _eigh_desc(G):
    w, V = np.linalg.eigh(0.5 * (G + _herm(G)))
    return w[..., ::-1], V[..., ::-1]


def _gap_degenerate(w, k):
    scale = np.maximum(np.abs(w[..., 0]), np.finfo(float).tiny)
    return (w[..., k - 1] - w[..., k]) < GAP_TOL * scale


def gram_split(X, k):
    """Signal / noise subspaces of ``X X^H`` split after the k-th eigenvalue.

    Returns:
        (signal, noise, info) where ``info.degenerate`` flags an eigen-gap
        below 1e-12 of the largest eigenvalue.
    """
    X = np.asarray(X, dtype=np.complex128)
    M = X.shape[0]
    if not 1 <= k <= M - 1:
        raise ContractError(f"k={k} outside [1, {M - 1}]")
    w, V = sorted_eigh(X @ X.conj().T)
    info = SplitInfo(eigenvalues=w, degenerate=bool(_gap_degenerate(w, k)))
    return SubspacePoint(V[:, :k]), SubspacePoint(V[:, k:]), info


def _check_kind(kind):
    if kind not in DISTANCE_KINDS:
        raise ContractError(f"unknown distance kind {kind!r}")


def subspace_loss_batch(X, T, kind="geodesic"):
    """Per-sample subspace distance between span of top-k of X X^H and T."""
    _check_kind(kind)
    X = np.asarray(X, dtype=np.complex128)
    T = np.asarray(T, dtype=np.complex128)
    k = T.shape[-1]
    _, V = _eigh_desc(X @ _herm(X))
    return distance_from_angles(principal_angles_batch(V[..., :k], T), kind)


def _jitter_direction(M):
    rng = np.random.default_rng(_JITTER_SEED)
    return rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))


def subspace_loss_and_grad(X, T, kind="geodesic"):
    """Batched subspace loss and its gradient w.r.t. X.

    Samples with a degenerate eigen-gap are evaluated at ``X + eps D`` with
    ``eps = 1e-8 ||X||_F`` and a fixed seeded direction D. Principal cosines
    are clamped to ``[1e-7, 1 - 1e-7]`` for the derivative only.

    Returns:
        (loss (B,), grad (B, M, M), flags) where ``flags`` is a dict of
        boolean arrays ``degenerate`` and ``clamped``.
    """
    _check_kind(kind)
    X = np.array(X, dtype=np.complex128)
    T = np.asarray(T, dtype=np.complex128)
    B, M, _ = X.shape
    k = T.shape[-1]
    if T.shape[:2] != (B, M) or not 1 <= k <= M - 1:
        raise ContractError(f"target shape {T.shape} incompatible with X {X.shape}")

    w, V = _eigh_desc(X @ _herm(X))
    degenerate = _gap_degenerate(w, k)
    if np.any(degenerate):
        D = _jitter_direction(M)
        eps = 1e-8 * np.linalg.norm(X[degenerate], axis=(1, 2))
        X[degenerate] = X[degenerate] + eps[:, None, None] * D
        w[degenerate], V[degenerate] = _eigh_desc(X[degenerate] @ _herm(X[degenerate]))

    U = V[..., :k]
    loss = distance_from_angles(principal_angles_batch(U, T), kind)

    UT = _herm(U) @ T  # (B, k, k)
    c, Wk = np.linalg.eigh(_herm(UT) @ UT)
    sigma = np.sqrt(np.clip(c, 0.0, 1.0))
    clamped = np.any((sigma > 1.0 - COS_EPS) | (sigma < COS_EPS), axis=-1)
    sigma = np.clip(sigma, COS_EPS, 1.0 - COS_EPS)
    phi = np.arccos(sigma)
    dL_dc = distance_angle_grad(phi, kind) * (-1.0 / np.sin(2.0 * phi))

    TW = T @ Wk
    dL_dP = (TW * dL_dc[:, None, :]) @ _herm(TW)
    inner = _herm(V) @ dL_dP @ V
    diff = np.abs(w[:, :, None] - w[:, None, :])
    cross = np.zeros((M, M), dtype=bool)
    cross[:k, k:] = True
    cross[k:, :k] = True
    F = np.where(cross, 1.0 / np.where(cross, diff, 1.0), 0.0)
    dL_dG = V @ (inner * F) @ _herm(V)
    grad = 2.0 * dL_dG @ X
    return loss, grad, {"degenerate": degenerate, "clamped": clamped}


def subspace_loss(X, target, kind="geodesic"):
    """Distance between the k-dim signal subspace of ``X X^H`` and ``target``."""
    T = target.basis if isinstance(target, SubspacePoint) else np.asarray(target)
    return float(subspace_loss_batch(np.asarray(X)[None], T[None], kind)[0])


def subspace_loss_grad(X, target, kind="geodesic"):
    """Gradient of ``subspace_loss`` w.r.t. X plus safeguard metadata."""
    T = target.basis if isinstance(target, SubspacePoint) else np.asarray(target)
    _, grad, flags = subspace_loss_and_grad(np.asarray(X)[None], T[None], kind)
    return grad[0], {name: bool(v[0]) for name, v in flags.items()}


# -- covariance-fitting baselines ---------------------------------------------


def fro_gram_loss_and_grad(X, R0):
    """``||X X^H - R0||_F`` per sample and its gradient."""
    X = np.asarray(X, dtype=np.complex128)
    E = X @ _herm(X) - R0
    loss = np.linalg.norm(E, axis=(1, 2))
    scale = np.where(loss > 0, 1.0 / np.where(loss > 0, loss, 1.0), 0.0)
    return loss, 2.0 * (E * scale[:, None, None]) @ X


def aff_gram_loss_and_grad(X, R0, delta=1e-4):
    """Affine-invariant distance between ``X X^H`` and ``R0 + delta I``."""
    X = np.asarray(X, dtype=np.complex128)
    M = X.shape[-1]
    F = np.asarray(R0, dtype=np.complex128) + delta * np.eye(M)
    f, Q = np.linalg.eigh(F)
    if np.any(f <= 0):
        raise NumericError("shifted target is not positive definite")
    F_isqrt = (Q / np.sqrt(f)[:, None, :]) @ _herm(Q)
    Z = F_isqrt @ X @ _herm(X) @ F_isqrt
    mu, W = np.linalg.eigh(0.5 * (Z + _herm(Z)))
    if np.any(mu <= 0) or not np.all(np.isfinite(mu)):
        raise NumericError("X X^H is not positive definite; affine-invariant distance undefined")
    logmu = np.log(mu)
    loss = np.sqrt(np.sum(logmu**2, axis=-1))
    safe = np.where(loss > 0, loss, 1.0)
    coef = np.where(loss[:, None] > 0, logmu / (mu * safe[:, None]), 0.0)
    Gam = F_isqrt @ (W * coef[:, None, :]) @ _herm(W) @ F_isqrt
    return loss, 2.0 * Gam @ X


def toeplitz_target(geom, theta):
    """First row of ``A(theta) A(theta)^H``."""
    A = manifold_matrix(geom, np.atleast_1d(theta))
    return (A[0:1, :] @ A.conj().T)[0]


def squ_toeplitz_loss_and_grad(u, v):
    """``||u - v||^2 / (2M)`` per sample and its gradient w.r.t. u."""
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    M = u.shape[-1]
    d = u - v
    return np.sum(np.abs(d) ** 2, axis=-1) / (2.0 * M), d / M


def covariance_loss(prediction, target, kind, delta=1e-4):
    """Covariance-fitting losses used by the DNN baselines.

    ``fro_gram`` / ``aff_gram`` take a square X and the noiseless R0;
    ``squ_toeplitz`` takes a first row u and the first row of A A^H.
    """
    prediction = np.asarray(prediction)[None]
    target = np.asarray(target)[None]
    if kind == "fro_gram":
        return float(fro_gram_loss_and_grad(prediction, target)[0][0])
    if kind == "aff_gram":
        return float(aff_gram_loss_and_grad(prediction, target, delta)[0][0])
    if kind == "squ_toeplitz":
        return float(squ_toeplitz_loss_and_grad(prediction, target)[0][0])
    raise ContractError(f"unknown covariance loss {kind!r}")


# -- end-to-end angle heads ---------------------------------------------------


def head_projection(angle_block, k):
    """Angles produced by the k-th head: entries ``r(k)+1 .. r(k)+k`` (1-based)."""
    angle_block = np.asarray(angle_block)
    n = angle_block.shape[-1]
    M = int(round((1 + np.sqrt(1 + 8 * n)) / 2))
    if r_index(M) != n:
        raise ContractError(f"angle block length {n} is not r(M) for any M")
    if not 1 <= k <= M - 1:
        raise ContractError(f"k={k} outside [1, {M - 1}]")
    start = r_index(k)
    return angle_block[..., start : start + k]


def end_to_end_loss(theta_hat, theta):
    """``(1/k) min_perm ||perm(theta_hat) - theta||^2`` via sorting."""
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    if theta_hat.shape != theta.shape:
        raise ContractError(f"length mismatch: {theta_hat.shape} vs {theta.shape}")
    return float(np.mean((np.sort(theta_hat) - np.sort(theta)) ** 2))


def end_to_end_loss_brute(theta_hat, theta):
    """Minimum over all k! permutations (reference implementation)."""
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    if theta_hat.shape != theta.shape:
        raise ContractError("length mismatch")
    k = theta.shape[0]
    return min(float(np.sum((theta_hat[list(p)] - theta) ** 2)) / k for p in itertools.permutations(range(k)))


def end_to_end_loss_and_grad(theta_hat, theta):
    """Batched sorted squared loss (B, k) and its gradient w.r.t. theta_hat."""
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    k = theta_hat.shape[-1]
    order = np.argsort(theta_hat, axis=-1)
    diff = np.take_along_axis(theta_hat, order, -1) - np.sort(theta, axis=-1)
    grad = np.empty_like(theta_hat)
    np.put_along_axis(grad, order, 2.0 * diff / k, -1)
    return np.mean(diff**2, axis=-1), grad
