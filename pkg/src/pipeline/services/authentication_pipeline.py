"""认证流水线。

分段 → 标签随机化重排 → 特征提取 → DTW 画像 → 单类 SVM 判决，
以及作为对照的相关系数基线。

预期内的失败（未检测到反向散射、分段过短）以 Result 返回；
前置条件违反（超出相干时间预算）直接抛出异常。
"""

import logging

import numpy as np
from returns.result import Failure, Result, Success
from scipy.stats import pearsonr

from src.channel.domain.models import SignalTrace, TagSchedule
from src.config import Settings
from src.defense.domain.models import AuthSession
from src.defense.domain.tag_random import rearrange_by_schedule
from src.detection.domain.models import Decision, DecisionLabel, OcSvmModel
from src.detection.services.ocsvm import decide
from src.features.domain.models import FeatureSet
from src.features.services.extractor import FeatureExtractor
from src.monitoring.logging_utils import ExperimentLogger, get_experiment_logger
from src.monitoring.metrics import record_no_backscatter, record_profile_built, record_verdict
from src.profiling.domain.models import ProfileVector
from src.profiling.services.profile_builder import ProfileBuilder
from src.segmentation.domain.models import Segment
from src.segmentation.services.segmenter import Segmenter, slot_segments
from src.shared.errors import (
    CoherenceBudgetExceeded,
    CorrelationUndefinedError,
    FeatureError,
    NoBackscatterError,
    ProfileError,
    SegmentationError,
    ShieldScatterError,
)

logger = logging.getLogger(__name__)

MESSAGE1 = "message1"
MESSAGE3 = "message3"
NO_BACKSCATTER = "no_backscatter"


class AuthenticationPipeline:
    """AP 侧认证流水线。

    检测路径只读取采样值，不读取轨迹的来源标签。
    """

    def __init__(
        self,
        segmenter: Segmenter,
        extractor: FeatureExtractor,
        profile_builder: ProfileBuilder,
        correlation_threshold: float = 0.6789,
        experiment_logger: ExperimentLogger | None = None,
    ) -> None:
        """初始化流水线。

        Args:
            segmenter: 分段服务
            extractor: 特征提取器
            profile_builder: 画像构建器
            correlation_threshold: 相关系数基线的判决门限
            experiment_logger: 结构化日志记录器
        """
        self.segmenter = segmenter
        self.extractor = extractor
        self.profile_builder = profile_builder
        self.correlation_threshold = correlation_threshold
        self._events = experiment_logger or get_experiment_logger()

    @classmethod
    def from_settings(cls, settings: Settings) -> "AuthenticationPipeline":
        return cls(
            segmenter=Segmenter.from_settings(settings),
            extractor=FeatureExtractor(
                block=settings.feature_block, smoothing_window=settings.smoothing_window
            ),
            profile_builder=ProfileBuilder(
                original_chunks=settings.original_chunks,
                blockwise_chunks=settings.blockwise_chunks,
            ),
            correlation_threshold=settings.correlation_threshold,
        )

    # ──── 1. 分段与重排 ────

    def segment(self, trace: SignalTrace, role: str) -> Result[Segment, NoBackscatterError]:
        """对一条消息分段，失败时在错误上标注消息角色。"""
        result = self.segmenter.segment(trace)
        if isinstance(result, Failure):
            error = result.failure()
            record_no_backscatter(role)
            self._events.log_no_backscatter(role, error.message)
            return Failure(NoBackscatterError(error.message, trace_role=role))
        return Success(result.unwrap().segment)

    def rearrange_message(
        self,
        trace: SignalTrace,
        segment: Segment,
        recorded: TagSchedule,
        reference: TagSchedule,
    ) -> tuple[SignalTrace, Segment]:
        """按时隙几何切出各标签分段，按记录的顺序重排回参考顺序并拼接。

        保护间隔不进入拼接结果。

        Raises:
            SegmentationError: 标签时隙超出轨迹
            DefenseError: 顺序不匹配
        """
        parts = rearrange_by_schedule(
            slot_segments(segment, recorded, len(trace)), recorded, reference
        )
        samples = np.concatenate(
            [trace.samples[part.start_index : part.end_index] for part in parts]
        )
        rearranged = SignalTrace(samples=samples, sample_rate_hz=trace.sample_rate_hz)
        return rearranged, Segment(start_index=0, end_index=samples.size)

    def _features(
        self,
        trace: SignalTrace,
        role: str,
        recorded: TagSchedule | None,
        reference: TagSchedule | None,
    ) -> Result[FeatureSet, ShieldScatterError]:
        segmented = self.segment(trace, role)
        if isinstance(segmented, Failure):
            return segmented
        segment = segmented.unwrap()
        try:
            if recorded is not None and reference is not None:
                trace, segment = self.rearrange_message(trace, segment, recorded, reference)
            return Success(self.extractor.extract(trace, segment))
        except (SegmentationError, FeatureError) as e:
            logger.debug(f"{role} 特征提取失败: {e.message}")
            return Failure(e)

    def features_pair(
        self,
        message1: SignalTrace,
        message3: SignalTrace,
        reference_schedule: TagSchedule | None = None,
        recorded_schedule: TagSchedule | None = None,
    ) -> Result[tuple[FeatureSet, FeatureSet], ShieldScatterError]:
        """两条消息的特征。

        给出任一调度时两条消息都按时隙切分：消息 1 保持参考顺序，消息 3 按记录的顺序
        重排回参考顺序。只给出记录顺序时参考顺序取标签编号升序；只给出参考顺序时视为
        消息 3 未随机化。都不给出时使用整个分段。
        """
        if recorded_schedule is not None and reference_schedule is None:
            reference_schedule = recorded_schedule.with_order(sorted(recorded_schedule.order))
        if reference_schedule is not None and recorded_schedule is None:
            recorded_schedule = reference_schedule
        first = self._features(message1, MESSAGE1, reference_schedule, reference_schedule)
        if isinstance(first, Failure):
            return first
        second = self._features(message3, MESSAGE3, recorded_schedule, reference_schedule)
        if isinstance(second, Failure):
            return second
        return Success((first.unwrap(), second.unwrap()))

    # ──── 2. 画像与判决 ────

    def profile_pair(
        self,
        message1: SignalTrace,
        message3: SignalTrace,
        reference_schedule: TagSchedule | None = None,
        recorded_schedule: TagSchedule | None = None,
    ) -> Result[ProfileVector, ShieldScatterError]:
        """比较两条消息，生成画像向量。

        Args:
            message1: 固定标签顺序反射的消息
            message3: 消息 3，若给出 recorded_schedule 则按其重排
            reference_schedule: 消息 1 的标签顺序
            recorded_schedule: AP 记录的消息 3 标签顺序

        Returns:
            Result[ProfileVector, ShieldScatterError]: 未检测到反向散射或分段过短时失败
        """
        features = self.features_pair(message1, message3, reference_schedule, recorded_schedule)
        if isinstance(features, Failure):
            return features
        try:
            profile = self.profile_builder.build(*features.unwrap())
        except ProfileError as e:
            return Failure(e)
        record_profile_built()
        return Success(profile)

    def authenticate(
        self,
        model: OcSvmModel,
        message1: SignalTrace,
        message3: SignalTrace,
        reference_schedule: TagSchedule | None = None,
        recorded_schedule: TagSchedule | None = None,
    ) -> Result[Decision, ShieldScatterError]:
        """对一对消息作出判决。"""
        result = self.profile_pair(message1, message3, reference_schedule, recorded_schedule)
        if isinstance(result, Failure):
            record_verdict(NO_BACKSCATTER)
            return result
        decision = decide(model, result.unwrap())
        record_verdict(decision.label.value)
        self._events.log_verdict(decision.label.value, decision.score)
        return Success(decision)

    def authenticate_session(
        self, model: OcSvmModel, session: AuthSession
    ) -> Result[Decision, ShieldScatterError]:
        """先检查相干时间预算，再对会话判决。

        Raises:
            CoherenceBudgetExceeded: 会话总时长超出预算
        """
        if not session.within_budget:
            raise CoherenceBudgetExceeded(
                f"会话时长 {session.span_s * 1e3:.2f} ms 超出相干时间预算 "
                f"{session.coherence_budget_s * 1e3:.2f} ms"
            )
        return self.authenticate(
            model,
            session.message1_trace,
            session.message3_trace,
            reference_schedule=session.schedule1,
            recorded_schedule=session.schedule3,
        )

    # ──── 3. 相关系数基线 ────

    def correlate(
        self,
        message1: SignalTrace,
        message3: SignalTrace,
        reference_schedule: TagSchedule | None = None,
        recorded_schedule: TagSchedule | None = None,
    ) -> Result[float, ShieldScatterError]:
        """两条消息平滑幅度序列的 Pearson 相关系数（按较短者截断对齐）。"""
        features = self.features_pair(message1, message3, reference_schedule, recorded_schedule)
        if isinstance(features, Failure):
            return features
        first, second = features.unwrap()
        try:
            return Success(pearson(first.smoothed, second.smoothed))
        except CorrelationUndefinedError as e:
            return Failure(e)

    def baseline_label(self, correlation: float) -> DecisionLabel:
        """相关系数 >= 门限判为合法。"""
        if correlation >= self.correlation_threshold:
            return DecisionLabel.LEGITIMATE
        return DecisionLabel.ATTACKER


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """截断到共同长度后的 Pearson 相关系数。

    Raises:
        CorrelationUndefinedError: 任一序列方差为零或长度不足
    """
    length = min(a.size, b.size)
    if length < 2:
        raise CorrelationUndefinedError("序列长度不足，无法计算相关系数")
    x, y = a[:length], b[:length]
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise CorrelationUndefinedError("序列方差为零，相关系数无定义")
    return float(pearsonr(x, y).statistic)
