"""认证流水线测试。"""

import numpy as np
import pytest
from returns.result import Failure, Success

from src.channel.domain.models import SignalTrace, TagSchedule
from src.defense.domain.models import AuthSession
from src.detection.domain.models import DecisionLabel
from src.pipeline.services.authentication_pipeline import MESSAGE1, MESSAGE3, pearson
from src.segmentation.domain.models import Segment
from src.shared.errors import (
    CoherenceBudgetExceeded,
    CorrelationUndefinedError,
    NoBackscatterError,
)


def _acceptance(pipeline, model, pairs) -> float:
    accepted = 0
    for pair in pairs:
        result = pipeline.authenticate(
            model, pair.message1, pair.message3, pair.reference_schedule, pair.recorded_schedule
        )
        match result:
            case Success(decision):
                accepted += decision.label == DecisionLabel.LEGITIMATE
            case _:
                pass
    return accepted / len(pairs)


@pytest.mark.unit
class TestPearson:
    """测试相关系数基线的数值部分。"""

    def test_linear_relation(self):
        """测试线性相关的序列系数为 1。"""
        a = np.array([1.0, 2.0, 4.0, 8.0])

        assert pearson(a, 2 * a + 1) == pytest.approx(1.0)

    def test_truncates_to_common_length(self):
        """测试按较短序列截断。"""
        a = np.array([1.0, 2.0, 3.0, 100.0, -50.0])
        b = np.array([3.0, 2.0, 1.0])

        assert pearson(a, b) == pytest.approx(-1.0)

    def test_constant_series_undefined(self):
        """测试方差为零时相关系数无定义。"""
        with pytest.raises(CorrelationUndefinedError):
            pearson(np.ones(10), np.arange(10.0))

    def test_too_short(self):
        """测试长度不足 2。"""
        with pytest.raises(CorrelationUndefinedError):
            pearson(np.ones(1), np.ones(1))

    def test_threshold_is_inclusive(self, pipeline):
        """测试相关系数等于门限时判为合法。"""
        assert pipeline.baseline_label(0.6789) == DecisionLabel.LEGITIMATE
        assert pipeline.baseline_label(0.6788) == DecisionLabel.ATTACKER


@pytest.mark.integration
class TestAuthenticationPipeline:
    """测试端到端认证。"""

    def test_no_backscatter_is_explicit(self, pipeline, trained_model, session_factory):
        """测试没有标签反射时返回失败而不是接受。"""
        silent = SignalTrace(samples=np.ones(8100, dtype=np.complex128), sample_rate_hz=1e6)
        pair = session_factory.legitimate_pair(1)

        result = pipeline.authenticate(trained_model, silent, pair.message3)

        assert isinstance(result, Failure)
        error = result.failure()
        assert isinstance(error, NoBackscatterError)
        assert error.trace_role == MESSAGE1

    def test_no_backscatter_in_message3(self, pipeline, trained_model, session_factory):
        """测试消息 3 未检测到反射时标注角色。"""
        pair = session_factory.legitimate_pair(2)
        flat = SignalTrace(samples=np.ones(8100, dtype=np.complex128), sample_rate_hz=1e6)

        result = pipeline.authenticate(trained_model, pair.message1, flat)

        assert isinstance(result, Failure)
        assert result.failure().trace_role == MESSAGE3

    def test_rearranged_message_keeps_length(self, pipeline, session_factory):
        """测试重排后的消息 3 只保留各标签时隙，去掉保护间隔。"""
        pair = session_factory.legitimate_pair(3)
        segment = pipeline.segment(pair.message3, MESSAGE3).unwrap()

        trace, rearranged = pipeline.rearrange_message(
            pair.message3, segment, pair.recorded_schedule, pair.reference_schedule
        )

        assert len(trace) == 3 * 2000
        assert rearranged == Segment(start_index=0, end_index=6000)

    def test_session_beyond_coherence_budget(self, pipeline, trained_model, session_factory):
        """测试会话超出相干时间预算时拒绝分类。"""
        pair = session_factory.legitimate_pair(4)
        session = AuthSession(
            message1_trace=pair.message1,
            message3_trace=pair.message3,
            schedule1=pair.reference_schedule,
            schedule3=pair.recorded_schedule,
            message3_time_s=0.5,
            coherence_budget_s=0.1,
        )

        with pytest.raises(CoherenceBudgetExceeded):
            pipeline.authenticate_session(trained_model, session)

    def test_session_within_budget(self, pipeline, trained_model, session_factory):
        """测试预算内的会话按记录的顺序重排后判决。"""
        pair = session_factory.legitimate_pair(5)
        session = AuthSession(
            message1_trace=pair.message1,
            message3_trace=pair.message3,
            schedule1=pair.reference_schedule,
            schedule3=pair.recorded_schedule,
            message3_time_s=0.02,
        )

        result = pipeline.authenticate_session(trained_model, session)

        assert isinstance(result, Success)

    def test_correlation_baseline(self, pipeline, session_factory):
        """测试合法消息对的平滑幅度高度相关。"""
        pair = session_factory.legitimate_pair(6, tag_random=False)

        correlation = pipeline.correlate(
            pair.message1, pair.message3, pair.reference_schedule, pair.recorded_schedule
        ).unwrap()

        assert -1.0 <= correlation <= 1.0
        assert pipeline.baseline_label(correlation) == DecisionLabel.LEGITIMATE


@pytest.mark.slow
class TestOperatingPoint:
    """测试校准模型的工作点。"""

    def test_legitimate_pairs_accepted(self, pipeline, calibrated_model, session_factory):
        """测试新的合法消息对接受率不低于 90%。"""
        pairs = [session_factory.legitimate_pair(seed) for seed in range(100, 200)]

        assert _acceptance(pipeline, calibrated_model, pairs) >= 0.9

    def test_basic_attackers_rejected(self, pipeline, calibrated_model, session_factory):
        """测试信道差异明显的基础攻击者接受率不超过 10%。"""
        pairs = [
            session_factory.basic_attack_pair(seed, divergence=0.8) for seed in range(200, 300)
        ]

        assert _acceptance(pipeline, calibrated_model, pairs) <= 0.1


@pytest.mark.slow
class TestTagRandomDefense:
    """测试标签随机化对高级攻击者的作用。"""

    def test_randomization_lowers_acceptance(self, pipeline, calibrated_model, session_factory):
        """测试随机化顺序后完美估计信道的高级攻击者接受率下降。"""
        fixed = [
            session_factory.advanced_attack_pair(seed, tag_random=False)
            for seed in range(300, 330)
        ]
        randomized = [session_factory.advanced_attack_pair(seed) for seed in range(300, 330)]

        assert _acceptance(pipeline, calibrated_model, fixed) > _acceptance(
            pipeline, calibrated_model, randomized
        )

    def test_random_order_bounds_acceptance(self, pipeline, calibrated_model, session_factory):
        """测试三标签随机化后高级攻击者的接受率不超过 1/3! + 0.05。"""
        pairs = [session_factory.advanced_attack_pair(seed) for seed in range(400, 700)]

        assert _acceptance(pipeline, calibrated_model, pairs) <= 1 / 6 + 0.05

    def test_five_tags_bound_acceptance(self, pipeline, five_tag_model, five_tag_factory):
        """测试五标签随机化后高级攻击者的接受率不超过 1/5! + 0.05。"""
        pairs = [five_tag_factory.advanced_attack_pair(seed) for seed in range(700, 900)]

        assert _acceptance(pipeline, five_tag_model, pairs) <= 1 / 120 + 0.05

    def test_wrong_order_rejected(self, pipeline, calibrated_model, session_factory):
        """测试高级攻击者按错误排列发送时几乎全部被拒绝。"""
        wrong_orders = [[1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]]
        pairs = []
        for k, seed in enumerate(range(900, 960)):
            pair = session_factory.advanced_attack_pair(seed, tag_random=False)
            reference = pair.reference_schedule
            recorded = TagSchedule(
                order=wrong_orders[k % len(wrong_orders)],
                slot_length_samples=reference.slot_length_samples,
                guard_samples=reference.guard_samples,
                start_sample=reference.start_sample,
            )
            pairs.append(pair.model_copy(update={"recorded_schedule": recorded}))

        assert _acceptance(pipeline, calibrated_model, pairs) <= 0.05
