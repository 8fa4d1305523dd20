"""Joint clustering and synchronization over orthogonal groups."""

from ._core import (
    BlockMatrix,
    ClusterSyncError,
    GroundTruth,
    eta,
    exact_recovery,
    generate,
    load_observation,
    recover,
    save_observation,
    sync_error,
)

__all__ = [
    "BlockMatrix",
    "ClusterSyncError",
    "GroundTruth",
    "eta",
    "exact_recovery",
    "generate",
    "load_observation",
    "recover",
    "save_observation",
    "sync_error",
]
