"""Short-horizon building heating demand forecasting with schedule-driven
transitional features, Levenberg-Marquardt trained perceptrons and
orthogonal-array schedule search."""

from heatcast.dataset import Dataset, NormStats, Sample, SplitSpec, load_csv, split
from heatcast.features import DynamicsSpec, FeatureMatrix, TransitionalConfig, assemble
from heatcast.mlp import MlpParams, TrainConfig, TrainResult, train
from heatcast.oa import OrthogonalArray, load_oa, verify_strength
from heatcast.schedules import Calendar, DayType, FactorAssignment, ScheduleSet, StepProfile

__version__ = "0.1.0"

__all__ = [
    "Calendar",
    "Dataset",
    "DayType",
    "DynamicsSpec",
    "FactorAssignment",
    "FeatureMatrix",
    "MlpParams",
    "NormStats",
    "OrthogonalArray",
    "Sample",
    "ScheduleSet",
    "SplitSpec",
    "StepProfile",
    "TrainConfig",
    "TrainResult",
    "TransitionalConfig",
    "assemble",
    "load_csv",
    "load_oa",
    "split",
    "train",
    "verify_strength",
]
