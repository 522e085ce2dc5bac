"""Prometheus 监控与结构化日志模块。

提供画像、判决、训练与实验网格点的监控指标，以及实验事件的结构化日志。
"""

from src.monitoring.logging_utils import ExperimentLogger, get_experiment_logger
from src.monitoring.metrics import (
    REGISTRY,
    experiment_grid_points_total,
    no_backscatter_total,
    observe_training,
    profiles_built_total,
    record_grid_point,
    record_no_backscatter,
    record_profile_built,
    record_verdict,
    svm_training_seconds,
    verdicts_total,
    write_metrics_textfile,
)

__all__ = [
    "ExperimentLogger",
    "get_experiment_logger",
    "REGISTRY",
    "profiles_built_total",
    "verdicts_total",
    "no_backscatter_total",
    "svm_training_seconds",
    "experiment_grid_points_total",
    "record_profile_built",
    "record_verdict",
    "record_no_backscatter",
    "observe_training",
    "record_grid_point",
    "write_metrics_textfile",
]
