"""Trainable subspace-representation models and their losses."""

from .checkpoint import load_checkpoint, save_checkpoint
from .losses import (
    covariance_loss,
    end_to_end_loss,
    gram_split,
    head_projection,
    subspace_loss,
    subspace_loss_grad,
)
from .network import ModelOutput, Network, NetworkSpec, forward
from .sampling import consistent_rank_batches
from .train import TrainingConfig, train

__all__ = [
    "ModelOutput",
    "Network",
    "NetworkSpec",
    "TrainingConfig",
    "consistent_rank_batches",
    "covariance_loss",
    "end_to_end_loss",
    "forward",
    "gram_split",
    "head_projection",
    "load_checkpoint",
    "save_checkpoint",
    "subspace_loss",
    "subspace_loss_grad",
    "train",
]
