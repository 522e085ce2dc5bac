"""实验模块。

消息对生成、参数扫描、TP/FP 评分、结果读写与汇总。命令行入口见 src.harness.commands。
"""

from src.harness.domain.models import (
    AttackerKind,
    DetectionMethod,
    ExperimentConfig,
    MetricsRecord,
    RunManifest,
    SweepAxis,
)
from src.harness.services.cohort import PairSample, SessionFactory

__all__ = [
    "AttackerKind",
    "DetectionMethod",
    "ExperimentConfig",
    "MetricsRecord",
    "RunManifest",
    "SweepAxis",
    "PairSample",
    "SessionFactory",
]
