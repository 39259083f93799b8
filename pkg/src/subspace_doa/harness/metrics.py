"""Angle-estimation error metrics."""

import itertools

import numpy as np

from ..errors import ContractError


def _angles(est):
    return np.asarray(getattr(est, "theta_hat", est), dtype=np.float64)


def trial_error(theta_hat, theta):
    """``(1/k) min_perm ||perm(theta_hat) - theta||^2`` via sorting."""
    theta_hat, theta = _angles(theta_hat), np.asarray(theta, dtype=np.float64)
    if theta_hat.shape != theta.shape:
        raise ContractError(f"estimate has {theta_hat.shape[0]} angles, truth has {theta.shape[0]}")
    return float(np.mean((np.sort(theta_hat) - np.sort(theta)) ** 2))


def mse_metric(estimates, truths):
    """Mean over trials of the per-trial permutation-free squared error (rad^2)."""
    if len(estimates) != len(truths):
        raise ContractError(f"{len(estimates)} estimates for {len(truths)} truths")
    if not estimates:
        raise ContractError("no trials")
    return float(np.mean([trial_error(e, t) for e, t in zip(estimates, truths)]))


def mse_metric_brute(estimates, truths):
    """Same as ``mse_metric`` but minimizing over all k! permutations."""
    total = 0.0
    for est, truth in zip(estimates, truths):
        a, b = _angles(est), np.asarray(truth, dtype=np.float64)
        k = b.shape[0]
        total += min(float(np.sum((a[list(p)] - b) ** 2)) for p in itertools.permutations(range(k))) / k
    return total / len(truths)
