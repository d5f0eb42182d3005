"""Inject controlled data bias into tabular datasets, measure its effect on
fairness, and summarise a dataset's bias signature as a Data Bias Profile."""
from .data import (ColumnSpec, EncodedMatrix, Encoder, SyntheticSpec, TabularDataset, encode,
                   fit_encoder, load_csv, make_synthetic, read_schema, stratified_split, write_schema)
from .detect import (DataBiasProfile, build_profile, compare_profiles, delta_wauc, delta_xauc,
                     representation_difference, sensitive_auc, separation_difference)
from .errors import DataBiasError, DataError, MetricError
from .experiment import (ExperimentConfig, emit_table, load_config, run_bias_grid, run_detection_grid,
                         run_experiment, run_joint_grid)
from .inject import BiasSpec, InjectionReport, apply_bias, parse_bias
from .metrics import (auc, balanced_accuracy, demographic_parity, equal_opportunity, fairness_report,
                      prediction_quality_parity, xauc)
from .model import TrainConfig, TrainedClassifier, classify, predict_proba, train
from .stats import welch_t_test

__version__ = "0.1.0"

__all__ = [
    "ColumnSpec", "EncodedMatrix", "Encoder", "SyntheticSpec", "TabularDataset", "encode", "fit_encoder",
    "load_csv", "make_synthetic", "read_schema", "stratified_split", "write_schema",
    "DataBiasProfile", "build_profile", "compare_profiles", "delta_wauc", "delta_xauc",
    "representation_difference", "sensitive_auc", "separation_difference",
    "DataBiasError", "DataError", "MetricError",
    "ExperimentConfig", "emit_table", "load_config", "run_bias_grid", "run_detection_grid", "run_experiment",
    "run_joint_grid",
    "BiasSpec", "InjectionReport", "apply_bias", "parse_bias",
    "auc", "balanced_accuracy", "demographic_parity", "equal_opportunity", "fairness_report",
    "prediction_quality_parity", "xauc",
    "TrainConfig", "TrainedClassifier", "classify", "predict_proba", "train",
    "welch_t_test",
]
