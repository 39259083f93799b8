import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subspace_doa.errors import ContractError
from subspace_doa.grassmann import (
    DISTANCE_KINDS,
    SubspacePoint,
    distance_angle_grad,
    distance_from_angles,
    principal_angles,
    principal_angles_batch,
    projector,
    projector_bound,
    random_subspace,
    random_unitary,
    sorted_eigh,
    subspace_distance,
)

from conftest import crandn


def _rotated_pair(M, phis, rng):
    """Bases whose principal angles are exactly ``phis``."""
    k = len(phis)
    Q = random_unitary(M, rng)
    E = np.zeros((M, k), complex)
    F = np.zeros((M, k), complex)
    for i, p in enumerate(phis):
        E[i, i] = 1.0
        F[i, i] = np.cos(p)
        F[k + i, i] = np.sin(p)
    return Q @ E, Q @ F


def test_subspace_point_orthonormalizes(rng):
    B = crandn(rng, 6, 2)
    u = SubspacePoint(B)
    np.testing.assert_allclose(u.basis.conj().T @ u.basis, np.eye(2), atol=1e-12)
    assert (u.ambient_dim, u.dim) == (6, 2)
    # span preserved
    assert np.linalg.norm(B - u.basis @ (u.basis.conj().T @ B)) < 1e-12


def test_subspace_point_keeps_orthonormal_basis_verbatim(rng):
    q = random_subspace(6, 3, rng).basis
    np.testing.assert_array_equal(SubspacePoint(q).basis, q)


def test_subspace_point_dimension_limits(rng):
    with pytest.raises(ContractError):
        SubspacePoint(crandn(rng, 4, 4))
    with pytest.raises(ContractError):
        SubspacePoint(np.zeros((4, 0)))
    with pytest.raises(ContractError):
        SubspacePoint(np.ones((4, 2)))


def test_projector_properties(rng):
    u = random_subspace(8, 3, rng)
    P = projector(u)
    np.testing.assert_allclose(P @ P, P, atol=1e-12)
    np.testing.assert_allclose(P, P.conj().T, atol=1e-15)
    assert abs(np.trace(P).real - 3) < 1e-12


def test_projector_basis_invariance(rng):
    u = random_subspace(10, 4, rng)
    P = projector(u)
    dev = max(np.abs(projector(u.basis @ random_unitary(4, rng)) - P).max() for _ in range(20))
    assert dev < 1e-10


def test_principal_angles_known_values(rng):
    phis = np.array([0.1, 0.5, 1.2])
    U, V = _rotated_pair(8, phis, rng)
    np.testing.assert_allclose(principal_angles(U, V), phis, atol=1e-12)


def test_small_principal_angles_are_accurate(rng):
    phis = np.array([1e-9, 3e-7])
    U, V = _rotated_pair(6, phis, rng)
    np.testing.assert_allclose(principal_angles(U, V), phis, rtol=1e-5)


def test_principal_angles_range_and_order(rng):
    U = np.stack([random_subspace(7, 3, rng).basis for _ in range(50)])
    V = np.stack([random_subspace(7, 3, rng).basis for _ in range(50)])
    phi = principal_angles_batch(U, V)
    assert np.all(np.diff(phi, axis=-1) >= -1e-12)
    assert np.all((phi >= 0) & (phi <= np.pi / 2 + 1e-15))


def test_principal_angles_dimension_mismatch(rng):
    with pytest.raises(ContractError):
        principal_angles(random_subspace(6, 2, rng), random_subspace(6, 3, rng))


def test_identical_subspaces_have_zero_distance(rng):
    u = random_subspace(9, 4, rng)
    v = SubspacePoint(u.basis @ random_unitary(4, rng))
    for kind in DISTANCE_KINDS:
        assert subspace_distance(u, v, kind) < 1e-7


@pytest.mark.parametrize(
    "kind,expected",
    [
        ("geodesic", lambda p: np.linalg.norm(p)),
        ("chordal", lambda p: np.linalg.norm(np.sin(p))),
        ("projection_2norm", lambda p: np.sin(p.max())),
        ("chordal_frobenius", lambda p: 2 * np.linalg.norm(np.sin(p / 2))),
        ("chordal_2norm", lambda p: 2 * np.sin(p.max() / 2)),
        ("fubini_study", lambda p: np.arccos(np.prod(np.cos(p)))),
    ],
)
def test_distance_formulas(kind, expected):
    phi = np.array([0.2, 0.7, 1.3])
    assert abs(distance_from_angles(phi, kind) - expected(phi)) < 1e-12


def test_distance_matches_frobenius_projector_identity(rng):
    u, v = random_subspace(8, 3, rng), random_subspace(8, 3, rng)
    phi = principal_angles(u, v)
    fro = np.linalg.norm(projector(u) - projector(v))
    assert abs(fro - np.sqrt(2) * subspace_distance(u, v, "chordal")) < 1e-12
    assert abs(np.sqrt(2) * np.linalg.norm(np.sin(phi)) - fro) < 1e-12


def test_fubini_study_small_angles_accurate():
    phi = np.array([1e-10, 2e-10])
    assert abs(distance_from_angles(phi, "fubini_study") - np.linalg.norm(phi)) < 1e-20


def test_unknown_kind(rng):
    u = random_subspace(5, 2, rng)
    with pytest.raises(ContractError):
        subspace_distance(u, u, "manhattan")
    with pytest.raises(ContractError):
        distance_angle_grad(np.array([0.1]), "manhattan")


@pytest.mark.parametrize("kind", DISTANCE_KINDS)
def test_distance_angle_grad_matches_finite_differences(kind, rng):
    for _ in range(10):
        phi = np.sort(rng.uniform(0.05, 1.5, size=4))
        g = distance_angle_grad(phi, kind)
        h = 1e-6
        fd = np.array([
            (distance_from_angles(phi + h * e, kind) - distance_from_angles(phi - h * e, kind)) / (2 * h)
            for e in np.eye(4)
        ])
        np.testing.assert_allclose(g, fd, atol=1e-7)


def test_distance_angle_grad_zero_at_origin():
    for kind in DISTANCE_KINDS:
        np.testing.assert_array_equal(distance_angle_grad(np.zeros(3), kind), 0.0)


@given(M=st.integers(3, 9), data=st.data())
def test_distances_symmetric_and_bounded(M, data):
    k = data.draw(st.integers(1, M - 1))
    seed = data.draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    u, v = random_subspace(M, k, rng), random_subspace(M, k, rng)
    for kind in DISTANCE_KINDS:
        d1, d2 = subspace_distance(u, v, kind), subspace_distance(v, u, kind)
        assert abs(d1 - d2) < 1e-9
        assert d1 >= 0
    assert subspace_distance(u, v) <= np.sqrt(k) * np.pi / 2 + 1e-12
    lhs, rhs = projector_bound(u, v)
    assert lhs <= rhs + 1e-9


def test_random_unitary_is_unitary(rng):
    Q = random_unitary(7, rng)
    np.testing.assert_allclose(Q @ Q.conj().T, np.eye(7), atol=1e-12)


def test_sorted_eigh(rng):
    A = crandn(rng, 6, 6)
    H = A + A.conj().T
    w, V = sorted_eigh(H)
    assert np.all(np.diff(w) <= 0)
    np.testing.assert_allclose(V @ np.diag(w) @ V.conj().T, H, atol=1e-12)
    lead = V[np.argmax(np.abs(V), axis=0), np.arange(6)]
    np.testing.assert_allclose(lead.imag, 0, atol=1e-15)
    assert np.all(lead.real > 0)


def test_sorted_eigh_orders_ties_by_lead_index():
    w, V = sorted_eigh(np.diag([1.0, 3.0, 1.0, 1.0]))
    np.testing.assert_allclose(w, [3, 1, 1, 1])
    np.testing.assert_array_equal(np.argmax(np.abs(V), axis=0), [1, 0, 2, 3])
