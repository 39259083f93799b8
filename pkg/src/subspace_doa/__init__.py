"""Direction-of-arrival estimation on sparse linear arrays.

Array simulation, co-array completion, Grassmannian subspace geometry,
root-MUSIC, learned subspace representations and an evaluation harness.
"""

from .array_sim import (
    ArrayGeometry,
    DatasetSpec,
    ImperfectionParams,
    SourceScene,
    generate_dataset,
    generate_snapshots,
    sample_scm,
)
from .coarray import direct_augmentation, signal_subspace, spatial_smoothing
from .errors import (
    ConfigError,
    ContractError,
    DomainError,
    EstimationFailure,
    FileFormatError,
    NumericError,
    SubspaceDoaError,
    TrainingDiverged,
)
from .grassmann import SubspacePoint, principal_angles, subspace_distance
from .rootmusic import DoaEstimate, root_music

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "ConfigError",
    "ContractError",
    "DatasetSpec",
    "DoaEstimate",
    "DomainError",
    "EstimationFailure",
    "FileFormatError",
    "ImperfectionParams",
    "NumericError",
    "SourceScene",
    "SubspaceDoaError",
    "SubspacePoint",
    "TrainingDiverged",
    "direct_augmentation",
    "generate_dataset",
    "generate_snapshots",
    "principal_angles",
    "root_music",
    "sample_scm",
    "signal_subspace",
    "spatial_smoothing",
    "subspace_distance",
]
