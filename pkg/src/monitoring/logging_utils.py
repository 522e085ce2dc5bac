"""实验结构化日志工具。

提供结构化日志记录功能，事件名与上下文字段通过 ``extra`` 传递。
"""

import logging
from typing import Any

logger = logging.getLogger(__name__)


class ExperimentLogger:
    """实验与检测事件的结构化日志记录器。"""

    def __init__(self, component: str = "experiment"):
        """初始化日志记录器。

        Args:
            component: 组件名称
        """
        self.component = component
        self._logger = logging.getLogger(f"src.monitoring.{component}")

    def log_run_started(
        self, run_id: str, axis: str, grid: list[Any], repetitions: int, seed: int
    ) -> None:
        """记录实验开始事件。

        Args:
            run_id: 运行 ID
            axis: 扫描轴
            grid: 网格取值
            repetitions: 重复次数
            seed: 主种子
        """
        self._logger.info(
            "实验开始",
            extra={
                "event": "run_started",
                "run_id": run_id,
                "axis": axis,
                "grid": grid,
                "repetitions": repetitions,
                "seed": seed,
            },
        )

    def log_grid_point_completed(
        self,
        axis: str,
        value: Any,
        repetition: int,
        method: str,
        tp_rate: float,
        fp_rate: float,
        elapsed_ms: int,
    ) -> None:
        """记录网格点完成事件。"""
        self._logger.info(
            "网格点完成",
            extra={
                "event": "grid_point_completed",
                "axis": axis,
                "value": value,
                "repetition": repetition,
                "method": method,
                "tp_rate": tp_rate,
                "fp_rate": fp_rate,
                "elapsed_ms": elapsed_ms,
            },
        )

    def log_model_trained(
        self,
        training_size: int,
        nu: float,
        gamma: float,
        support_vectors: int,
        elapsed_ms: int,
    ) -> None:
        """记录模型训练事件。

        Args:
            training_size: 训练画像数
            nu: ν
            gamma: 核带宽
            support_vectors: 支持向量数
            elapsed_ms: 训练耗时（毫秒）
        """
        self._logger.info(
            "模型训练完成",
            extra={
                "event": "model_trained",
                "training_size": training_size,
                "nu": nu,
                "gamma": gamma,
                "support_vectors": support_vectors,
                "elapsed_ms": elapsed_ms,
            },
        )

    def log_verdict(self, label: str, score: float | None, source: str = "") -> None:
        """记录判决事件。"""
        self._logger.debug(
            "检测判决",
            extra={"event": "verdict", "label": label, "score": score, "source": source},
        )

    def log_no_backscatter(self, role: str, reason: str, source: str = "") -> None:
        """记录未检测到反向散射事件。

        Args:
            role: 消息角色（message1 / message3）
            reason: 失败原因
            source: 轨迹来源描述
        """
        self._logger.warning(
            "未检测到反向散射",
            extra={"event": "no_backscatter", "role": role, "reason": reason, "source": source},
        )

    def log_scenario_outcome(
        self,
        scenario: str,
        outcome: str,
        expected: str,
        steps: int,
    ) -> None:
        """记录攻击场景结果事件。"""
        level = logging.INFO if outcome == expected else logging.WARNING
        self._logger.log(
            level,
            "攻击场景结束",
            extra={
                "event": "scenario_outcome",
                "scenario": scenario,
                "outcome": outcome,
                "expected": expected,
                "steps": steps,
            },
        )


# 全局日志记录器实例
_experiment_logger = ExperimentLogger()


def get_experiment_logger() -> ExperimentLogger:
    """获取实验日志记录器实例。

    Returns:
        ExperimentLogger: 日志记录器实例
    """
    return _experiment_logger
