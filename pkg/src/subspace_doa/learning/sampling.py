"""Batch samplers over records of mixed source count."""

import numpy as np


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def consistent_rank_batches(ks, batch_size, seed):
    """Batches of record indices where every batch shares one source count.

    Each stratum (records with equal k) is shuffled and cut into batches of
    ``batch_size`` (the last may be short); all batches of all strata are then
    shuffled together. Every index appears exactly once per call.

    Args:
        ks: source count per record (sequence of ints).
        batch_size: maximum batch length, >= 1.
        seed: int seed (or Generator) fixing the order.

    Returns:
        list of int arrays.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    ks = np.asarray(ks)
    rng = _rng(seed)
    batches = []
    for k in np.unique(ks):
        idx = np.flatnonzero(ks == k)
        idx = idx[rng.permutation(idx.size)]
        batches.extend(idx[i : i + batch_size] for i in range(0, idx.size, batch_size))
    return [batches[i] for i in rng.permutation(len(batches))]


def uniform_batches(n, batch_size, seed):
    """Plain shuffled minibatches over ``n`` records, ignoring k."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    perm = _rng(seed).permutation(n)
    return [perm[i : i + batch_size] for i in range(0, n, batch_size)]
