"""Prometheus 指标定义。

所有指标注册在独立的 REGISTRY 上；记录函数在 prometheus_enabled 为 False 时不做任何事。
CLI 在 metrics_textfile 设置时把注册表写成 textfile collector 格式。
"""

from pathlib import Path

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

from src.config import get_settings

REGISTRY = CollectorRegistry()

# 已构建的画像向量数
profiles_built_total = Counter(
    "shieldscatter_profiles_built_total",
    "Total propagation profiles built",
    registry=REGISTRY,
)

# 判决计数
# 标签: label (legitimate, attacker, no_backscatter)
verdicts_total = Counter(
    "shieldscatter_verdicts_total",
    "Total detection verdicts by label",
    ["label"],
    registry=REGISTRY,
)

# 未检测到反向散射的轨迹数
# 标签: role (message1, message3)
no_backscatter_total = Counter(
    "shieldscatter_no_backscatter_total",
    "Traces without detectable backscatter",
    ["role"],
    registry=REGISTRY,
)

# 单类 SVM 训练耗时
svm_training_seconds = Histogram(
    "shieldscatter_svm_training_seconds",
    "One-class SVM training duration in seconds",
    buckets=(0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0, 60.0),
    registry=REGISTRY,
)

# 实验网格点
# 标签: axis (扫描轴)
experiment_grid_points_total = Counter(
    "shieldscatter_experiment_grid_points_total",
    "Completed experiment grid points",
    ["axis"],
    registry=REGISTRY,
)


def _enabled() -> bool:
    return get_settings().prometheus_enabled


def record_profile_built() -> None:
    if _enabled():
        profiles_built_total.inc()


def record_verdict(label: str) -> None:
    if _enabled():
        verdicts_total.labels(label=label).inc()


def record_no_backscatter(role: str) -> None:
    if _enabled():
        no_backscatter_total.labels(role=role or "unknown").inc()


def observe_training(seconds: float) -> None:
    if _enabled():
        svm_training_seconds.observe(seconds)


def record_grid_point(axis: str) -> None:
    if _enabled():
        experiment_grid_points_total.labels(axis=axis).inc()


def write_metrics_textfile(path: Path) -> None:
    """把注册表写入 textfile collector 文件。"""
    path.parent.mkdir(parents=True, exist_ok=True)
    write_to_textfile(str(path), REGISTRY)
