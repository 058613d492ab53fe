"""Twin-network pair similarity trainer.

Trains a shared-weight two-branch network on labeled image (or histogram)
pairs and exports a symmetric pairwise cost matrix in the JSON exchange
format the orgclust pipeline consumes through its external-file provider.
"""

from .config import TwinConfig
from .model import TwinNetwork, base_parameter_count
from .preprocess import preprocess
from .train import TrainResult, train

__all__ = [
    "TwinConfig",
    "TwinNetwork",
    "TrainResult",
    "base_parameter_count",
    "preprocess",
    "train",
]
