"""参数扫描实验运行器。

每个 (网格点, 重复) 是一个独立任务：生成训练、验证与测试消息对，训练单类 SVM，
在测试集上同时评估 SVM 路径与相关系数基线。任务种子由主种子、网格点序号与
重复序号派生，任务之间不共享可变状态，可放入进程池并行执行。
"""

import logging
import time
import uuid
from datetime import datetime, timezone
from concurrent.futures import ProcessPoolExecutor
from typing import Any

import numpy as np
from returns.result import Failure

from src.config import Settings
from src.defense.domain.voting import vote
from src.detection.domain.models import DecisionLabel, OcSvmModel
from src.detection.services.ocsvm import OneClassSvmTrainer, decide, median_gamma, select_nu
from src.harness.domain.models import (
    DEFAULT_TARGET_TP,
    AttackerKind,
    DetectionMethod,
    ExperimentConfig,
    MetricsRecord,
    RunManifest,
    format_value,
)
from src.harness.services.cohort import PairSample, SessionFactory
from src.harness.services.metrics_scorer import TrialOutcome, score
from src.monitoring.logging_utils import get_experiment_logger
from src.monitoring.metrics import observe_training, record_grid_point
from src.pipeline.services.authentication_pipeline import AuthenticationPipeline, pearson
from src.shared.errors import CorrelationUndefinedError, ProfileError, TrainingError
from src.shared.seeding import derive_seed

logger = logging.getLogger(__name__)

# 任务内各数据集的种子用途键
_TRAIN = 11
_VALIDATION_POS = 12
_VALIDATION_NEG = 13
_TEST_LEGIT = 14
_TEST_ATTACK = 15


class TrialDecision:
    """一次（可能多 AP）试验的两种方法判决。"""

    __slots__ = ("svm", "correlation")

    def __init__(self, svm: TrialOutcome, correlation: TrialOutcome) -> None:
        self.svm = svm
        self.correlation = correlation


def _merge(labels: list[TrialOutcome]) -> TrialOutcome:
    """多 AP 投票：未检测到反向散射的 AP 投攻击者票，全部未检测到时返回 None。"""
    if all(label is None for label in labels):
        return None
    return vote([label if label is not None else DecisionLabel.ATTACKER for label in labels])


class ExperimentRunner:
    """实验运行器。"""

    def __init__(self, settings: Settings) -> None:
        self.settings = settings
        self.pipeline = AuthenticationPipeline.from_settings(settings)
        self.trainer = OneClassSvmTrainer.from_settings(settings)
        self._events = get_experiment_logger()

    # ──── 1. 数据生成 ────

    def factory(self, point: ExperimentConfig, environment: str) -> SessionFactory:
        return SessionFactory.from_settings(
            self.settings,
            environment=environment,
            tag_count=point.tag_count,
            noise_sigma=point.noise_sigma,
        )

    def make_pair(
        self, factory: SessionFactory, point: ExperimentConfig, seed: int, attacker: bool
    ) -> PairSample:
        """按配置生成一对合法或攻击消息。"""
        if not attacker:
            return factory.legitimate_pair(
                seed, movement=point.device_movement, tag_random=point.tag_random
            )
        if point.attacker_kind == AttackerKind.ADVANCED:
            return factory.advanced_attack_pair(
                seed, estimation_error=point.estimation_error, tag_random=point.tag_random
            )
        return factory.basic_attack_pair(
            seed, point.attacker_divergence, tag_random=point.tag_random
        )

    def profiles(
        self,
        factory: SessionFactory,
        point: ExperimentConfig,
        count: int,
        seed: int,
        attacker: bool,
    ) -> np.ndarray:
        """生成 count 对消息的画像矩阵，跳过未检测到反向散射的消息对。"""
        rows = []
        for index in range(count):
            pair = self.make_pair(factory, point, derive_seed(seed, index), attacker)
            result = self.pipeline.profile_pair(
                pair.message1, pair.message3, pair.reference_schedule, pair.recorded_schedule
            )
            if isinstance(result, Failure):
                continue
            rows.append(result.unwrap().distances)
        if len(rows) < count:
            logger.warning(f"生成画像 {count} 对中有 {count - len(rows)} 对未检测到反向散射")
        if not rows:
            return np.empty((0, self.pipeline.profile_builder.dimension))
        return np.vstack(rows)

    # ──── 2. 训练 ────

    def train(self, point: ExperimentConfig, factory: SessionFactory, task_seed: int) -> OcSvmModel:
        """只用合法画像训练；ν 固定或在验证集上选择。

        Raises:
            TrainingError: 训练画像不足
        """
        train = self.profiles(
            factory, point, point.training_size, derive_seed(task_seed, _TRAIN), False
        )
        if train.shape[0] == 0:
            raise TrainingError("没有可用于训练的画像")
        gamma = self.settings.svm_gamma or median_gamma(train)

        if point.nu is not None:
            nu = point.nu
        else:
            val_pos = self.profiles(
                factory,
                point,
                point.validation_positives,
                derive_seed(task_seed, _VALIDATION_POS),
                False,
            )
            val_neg = self.profiles(
                factory,
                point,
                point.validation_negatives,
                derive_seed(task_seed, _VALIDATION_NEG),
                True,
            )
            target_tp = point.target_tp
            if val_neg.shape[0] == 0 and target_tp is None:
                target_tp = DEFAULT_TARGET_TP
            if val_pos.shape[0]:
                nu = select_nu(
                    train,
                    val_pos,
                    val_neg,
                    point.nu_grid,
                    trainer=self.trainer,
                    gamma=gamma,
                    target_tp=target_tp,
                ).nu
            else:
                nu = self.settings.svm_nu
        nu = max(nu, 1.0 / train.shape[0])

        started = time.perf_counter()
        model = self.trainer.train(train, nu=nu, gamma=gamma)
        elapsed = time.perf_counter() - started
        observe_training(elapsed)
        self._events.log_model_trained(
            training_size=train.shape[0],
            nu=nu,
            gamma=gamma,
            support_vectors=model.alphas.size,
            elapsed_ms=int(elapsed * 1000),
        )
        return model

    # ──── 3. 测试 ────

    def trial(
        self,
        model: OcSvmModel,
        factory: SessionFactory,
        point: ExperimentConfig,
        seed: int,
        attacker: bool,
    ) -> TrialDecision:
        """一次试验：每个 AP 独立生成消息对并判决，再投票合并。"""
        svm_labels: list[TrialOutcome] = []
        correlation_labels: list[TrialOutcome] = []
        for ap in range(point.ap_count):
            pair = self.make_pair(factory, point, derive_seed(seed, ap), attacker)
            features = self.pipeline.features_pair(
                pair.message1, pair.message3, pair.reference_schedule, pair.recorded_schedule
            )
            if isinstance(features, Failure):
                svm_labels.append(None)
                correlation_labels.append(None)
                continue
            first, second = features.unwrap()
            try:
                profile = self.pipeline.profile_builder.build(first, second)
                svm_labels.append(decide(model, profile).label)
            except ProfileError:
                svm_labels.append(None)
            try:
                correlation = pearson(first.smoothed, second.smoothed)
                correlation_labels.append(self.pipeline.baseline_label(correlation))
            except CorrelationUndefinedError:
                correlation_labels.append(DecisionLabel.ATTACKER)
        return TrialDecision(svm=_merge(svm_labels), correlation=_merge(correlation_labels))

    def run_point(
        self, config: ExperimentConfig, value_index: int, repetition: int
    ) -> list[MetricsRecord]:
        """运行一个 (网格点, 重复) 任务。"""
        started = time.perf_counter()
        value = config.grid[value_index]
        point = config.at(value)
        task_seed = derive_seed(config.seed, value_index, repetition)

        model = self.train(point, self.factory(point, point.environment), task_seed)
        test_factory = self.factory(point, point.evaluation_environment)
        legit = [
            self.trial(model, test_factory, point, derive_seed(task_seed, _TEST_LEGIT, i), False)
            for i in range(point.test_legitimate)
        ]
        attackers = [
            self.trial(model, test_factory, point, derive_seed(task_seed, _TEST_ATTACK, i), True)
            for i in range(point.test_attackers)
        ]

        text_value = format_value(value)
        records = [
            score(
                config.axis,
                text_value,
                repetition,
                DetectionMethod.SVM,
                [t.svm for t in legit],
                [t.svm for t in attackers],
                task_seed,
                nu=model.nu,
            )
        ]
        if config.include_baseline:
            records.append(
                score(
                    config.axis,
                    text_value,
                    repetition,
                    DetectionMethod.CORRELATION,
                    [t.correlation for t in legit],
                    [t.correlation for t in attackers],
                    task_seed,
                )
            )
        elapsed_ms = int((time.perf_counter() - started) * 1000)
        for record in records:
            self._events.log_grid_point_completed(
                axis=config.axis.value,
                value=text_value,
                repetition=repetition,
                method=record.method.value,
                tp_rate=record.tp_rate,
                fp_rate=record.fp_rate,
                elapsed_ms=elapsed_ms,
            )
        return records

    # ──── 4. 整体运行 ────

    def run(self, config: ExperimentConfig) -> tuple[list[MetricsRecord], RunManifest]:
        """运行整个扫描，记录按 (网格点, 重复, 方法) 排序。"""
        manifest = RunManifest(run_id=str(uuid.uuid4()), config=config)
        self._events.log_run_started(
            manifest.run_id,
            config.axis.value,
            [format_value(v) for v in config.grid],
            config.repetitions,
            config.seed,
        )
        tasks = [
            (index, repetition)
            for index in range(len(config.grid))
            for repetition in range(config.repetitions)
        ]
        task_seeds = {
            f"{format_value(config.grid[index])}/{repetition}": derive_seed(
                config.seed, index, repetition
            )
            for index, repetition in tasks
        }

        if config.workers > 1 and len(tasks) > 1:
            payload = self.settings.model_dump()
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                batches = list(
                    pool.map(
                        _run_task,
                        [(payload, config, index, repetition) for index, repetition in tasks],
                    )
                )
        else:
            batches = [self.run_point(config, index, repetition) for index, repetition in tasks]

        records = [record for batch in batches for record in batch]
        for _ in tasks:
            record_grid_point(config.axis.value)
        manifest = manifest.model_copy(
            update={
                "task_seeds": task_seeds,
                "record_count": len(records),
                "finished_at": datetime.now(timezone.utc),
            }
        )
        logger.info(f"实验 {manifest.run_id} 完成: {len(tasks)} 个任务, {len(records)} 条记录")
        return records, manifest


def _run_task(args: tuple[dict[str, Any], ExperimentConfig, int, int]) -> list[MetricsRecord]:
    """进程池入口。"""
    payload, config, index, repetition = args
    return ExperimentRunner(Settings(**payload)).run_point(config, index, repetition)
