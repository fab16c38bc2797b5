"""Graph-based automatic feature selection."""

from ._gbafs import (
    ConfigError,
    DataError,
    NumericalError,
    accuracy,
    balanced_f,
    cfs_select,
    embed,
    feature_space,
    fisher_scores,
    kneedle,
    knn_predict,
    mss,
    pam,
    random_select,
    relieff_weights,
    select_features,
    set_max_threads,
    silhouette,
    simplified_silhouette,
)

__version__ = "0.1.0"
