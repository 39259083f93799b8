"""Turning raw network outputs into subspaces and angle estimates."""

import numpy as np

from .. import kernels
from ..array_sim import manifold_matrix
from ..grassmann import distance_from_angles, principal_angles_batch
from ..rootmusic import root_music
from .losses import _eigh_desc, _herm, head_projection
from .network import scm_features


def raw_outputs(model, scms):
    raw, _ = model.forward_batch(scm_features(np.asarray(scms)))
    return raw


def subspaces_from_raw(model, raw, k, geom=None):
    """Orthonormal bases (B, M, k) of the predicted signal subspaces."""
    mode = model.spec.mode
    out = model.decode(raw)
    if mode == "gram":
        _, V = _eigh_desc(out @ _herm(out))
    elif mode == "toeplitz":
        _, V = _eigh_desc(kernels.toeplitz_hermitian(out))
    else:
        theta = np.clip(head_projection(out, k), 0.0, np.pi)
        A = np.stack([manifold_matrix(geom, t) for t in theta])
        _, V = _eigh_desc(A @ _herm(A))
    return V[..., :k]


def predict_subspaces(model, scms, k, geom=None):
    return subspaces_from_raw(model, raw_outputs(model, scms), k, geom)


def mean_distance(model, records, geom, kind="geodesic"):
    """Mean subspace distance of the model's predictions over ``records``."""
    if not records:
        return float("nan")
    ks = np.array([r.k for r in records])
    total = 0.0
    for k in np.unique(ks):
        group = [r for r in records if r.k == k]
        U = predict_subspaces(model, np.stack([r.scm for r in group]), int(k), geom)
        T = np.stack([r.target for r in group])
        total += float(np.sum(distance_from_angles(principal_angles_batch(U, T), kind)))
    return total / len(records)


def predict_angles(model, scm, k, geom):
    """Angle estimates for one SCM; root-MUSIC unless the model emits angles."""
    raw = raw_outputs(model, np.asarray(scm)[None])
    if model.spec.mode == "angles":
        theta = np.sort(np.clip(head_projection(model.decode(raw)[0], k), 0.0, np.pi))
        return theta
    U = subspaces_from_raw(model, raw, k, geom)[0]
    return root_music(U, k, geom).theta_hat
