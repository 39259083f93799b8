"""Points on Grassmannians, principal angles, and subspace distances.

A point of Gr(k, M) is stored as an M x k matrix with orthonormal columns.
Every distance here is a function of the principal angles, so all of them
are invariant to the choice of basis and to a common unitary rotation.
"""

import numpy as np

from .errors import ContractError

DISTANCE_KINDS = (
    "geodesic",
    "fubini_study",
    "chordal",
    "projection_2norm",
    "chordal_frobenius",
    "chordal_2norm",
)

_ORTHO_TOL = 1e-10


class SubspacePoint:
    """A k-dimensional subspace of C^M given by an orthonormal basis.

    The basis is re-orthonormalized (thin QR) when ``basis^H basis`` deviates
    from the identity by more than 1e-10; otherwise it is kept verbatim so
    that eigenvector bases survive round trips unchanged.
    """

    __slots__ = ("basis",)

    def __init__(self, basis):
        basis = np.array(basis, dtype=np.complex128, copy=True)
        if basis.ndim == 1:
            basis = basis[:, None]
        if basis.ndim != 2:
            raise ContractError("basis must be a 2-D array")
        M, k = basis.shape
        if not 1 <= k <= M - 1:
            raise ContractError(f"subspace dimension {k} outside [1, {M - 1}]")
        gram = basis.conj().T @ basis
        if np.abs(gram - np.eye(k)).max() > _ORTHO_TOL:
            q, r = np.linalg.qr(basis)
            if np.min(np.abs(np.diag(r))) < 1e-12 * max(1.0, np.abs(r).max()):
                raise ContractError("basis columns are linearly dependent")
            basis = q
        self.basis = basis

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    def __repr__(self):
        return f"SubspacePoint(M={self.ambient_dim}, k={self.dim})"


def _basis(u):
    return u.basis if isinstance(u, SubspacePoint) else np.asarray(u, dtype=np.complex128)


def projector(u):
    """Orthogonal projector ``U U^H`` onto the subspace."""
    U = _basis(u)
    P = U @ U.conj().T
    return 0.5 * (P + P.conj().T)


def principal_cosines(U1, U2):
    """Singular values of ``U1^H U2`` clipped to [0, 1], sorted descending.

    Works on stacks of bases (leading batch axes).
    """
    s = np.linalg.svd(np.swapaxes(U1.conj(), -1, -2) @ U2, compute_uv=False)
    return np.clip(s, 0.0, 1.0)


def principal_angles_batch(U1, U2):
    """Principal angles, ascending, for stacks of equal-dimension bases.

    Large angles come from ``arccos`` of the cosines; angles whose cosine
    exceeds 1/sqrt(2) are taken from ``arcsin`` of the singular values of
    ``U2 - U1 U1^H U2`` instead, which keeps tiny angles accurate.
    """
    U1 = np.asarray(U1, dtype=np.complex128)
    U2 = np.asarray(U2, dtype=np.complex128)
    cos = principal_cosines(U1, U2)
    resid = U2 - U1 @ (np.swapaxes(U1.conj(), -1, -2) @ U2)
    sin = np.clip(np.linalg.svd(resid, compute_uv=False), 0.0, 1.0)[..., ::-1]
    return np.where(cos**2 >= 0.5, np.arcsin(sin), np.arccos(cos))


def principal_angles(u1, u2):
    """Principal angles between two subspaces of equal dimension."""
    U1, U2 = _basis(u1), _basis(u2)
    if U1.shape != U2.shape:
        raise ContractError(f"dimension mismatch: {U1.shape} vs {U2.shape}")
    return principal_angles_batch(U1, U2)


def distance_from_angles(phi, kind="geodesic"):
    """Evaluate a subspace distance from principal angles (last axis)."""
    phi = np.asarray(phi, dtype=np.float64)
    if kind == "geodesic":
        return np.sqrt(np.sum(phi**2, axis=-1))
    if kind == "fubini_study":
        cos = np.cos(phi)
        with np.errstate(divide="ignore"):
            log_cos = np.sum(np.log(cos), axis=-1)
        prod = np.where(np.any(cos <= 0.0, axis=-1), 0.0, np.exp(log_cos))
        # 1 - prod(cos^2) without cancellation
        one_minus = -np.expm1(np.sum(np.log1p(-np.sin(phi) ** 2), axis=-1))
        one_minus = np.where(np.any(cos <= 0.0, axis=-1), 1.0, one_minus)
        return np.arctan2(np.sqrt(np.clip(one_minus, 0.0, 1.0)), prod)
    if kind == "chordal":
        return np.sqrt(np.sum(np.sin(phi) ** 2, axis=-1))
    if kind == "projection_2norm":
        return np.sin(np.max(phi, axis=-1))
    if kind == "chordal_frobenius":
        return 2.0 * np.sqrt(np.sum(np.sin(phi / 2.0) ** 2, axis=-1))
    if kind == "chordal_2norm":
        return 2.0 * np.sin(np.max(phi, axis=-1) / 2.0)
    raise ContractError(f"unknown distance kind {kind!r}; expected one of {DISTANCE_KINDS}")


def distance_angle_grad(phi, kind="geodesic"):
    """Partial derivatives of ``distance_from_angles`` w.r.t. each angle.

    Where the distance itself is zero the (sub)gradient is set to zero.
    For the max-based kinds the derivative goes to the largest angle.
    """
    phi = np.asarray(phi, dtype=np.float64)
    d = distance_from_angles(phi, kind)[..., None]
    safe = np.where(d > 0.0, d, 1.0)
    if kind == "geodesic":
        g = phi / safe
    elif kind == "fubini_study":
        g = np.cos(d) * np.tan(phi) / np.where(np.sin(d) > 0.0, np.sin(d), 1.0)
    elif kind == "chordal":
        g = np.sin(phi) * np.cos(phi) / safe
    elif kind == "chordal_frobenius":
        g = np.sin(phi) / safe
    elif kind in ("projection_2norm", "chordal_2norm"):
        onehot = np.zeros_like(phi)
        np.put_along_axis(onehot, np.argmax(phi, axis=-1)[..., None], 1.0, axis=-1)
        g = onehot * (np.cos(phi) if kind == "projection_2norm" else np.cos(phi / 2.0))
    else:
        raise ContractError(f"unknown distance kind {kind!r}")
    return np.where(d > 0.0, g, 0.0)


def subspace_distance(u1, u2, kind="geodesic"):
    """Distance between two subspaces of equal dimension.

    Args:
        u1, u2: ``SubspacePoint`` or orthonormal M x k arrays.
        kind: one of ``DISTANCE_KINDS``.
    """
    if kind not in DISTANCE_KINDS:
        raise ContractError(f"unknown distance kind {kind!r}; expected one of {DISTANCE_KINDS}")
    return float(distance_from_angles(principal_angles(u1, u2), kind))


def projector_bound(u1, u2):
    """Geodesic distance and its upper bound via the projector distance.

    Returns:
        (lhs, rhs) with ``lhs`` the geodesic distance and
        ``rhs = sqrt(k) * arcsin(||P1 - P2||_F / sqrt(2))``.
    """
    U1, U2 = _basis(u1), _basis(u2)
    k = U1.shape[1]
    lhs = subspace_distance(U1, U2, "geodesic")
    gap = np.linalg.norm(projector(U1) - projector(U2)) / np.sqrt(2.0)
    rhs = np.sqrt(k) * np.arcsin(min(gap, 1.0))
    return lhs, float(rhs)


def random_subspace(M, k, rng):
    """Haar-distributed point of Gr(k, M)."""
    Z = rng.standard_normal((M, k)) + 1j * rng.standard_normal((M, k))
    q, _ = np.linalg.qr(Z)
    return SubspacePoint(q)


def random_unitary(n, rng):
    """Haar-distributed n x n unitary matrix."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(Z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def sorted_eigh(A, tie_tol=1e-13):
    """Hermitian eigendecomposition with eigenvalues in descending order.

    Eigenvector phases are fixed so the largest-magnitude entry is real and
    positive. Eigenvalues within ``tie_tol * |lambda_max|`` of each other form
    a cluster whose vectors are ordered by the index of their largest entry.
    """
    A = np.asarray(A, dtype=np.complex128)
    w, V = np.linalg.eigh(0.5 * (A + A.conj().T))
    w, V = w[::-1], V[:, ::-1]
    lead = np.argmax(np.abs(V), axis=0)
    phase = V[lead, np.arange(V.shape[1])]
    V = V * (np.abs(phase) / phase)[None, :]
    scale = max(np.abs(w).max(), np.finfo(float).tiny)
    order = np.arange(len(w))
    start = 0
    while start < len(w):
        stop = start + 1
        while stop < len(w) and w[stop - 1] - w[stop] < tie_tol * scale:
            stop += 1
        if stop - start > 1:
            block = order[start:stop]
            order[start:stop] = block[np.argsort(lead[block], kind="stable")]
        start = stop
    return w[order], V[:, order]
