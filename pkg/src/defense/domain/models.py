"""防御领域模型。"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.channel.domain.models import SignalTrace, TagSchedule


class SessionVerdict(str, Enum):
    """认证会话状态。"""

    PENDING = "pending"
    LEGITIMATE = "legitimate"
    ATTACKER = "attacker"


class AuthSession(BaseModel):
    """一次挑战-应答认证会话。

    消息 1 用固定标签顺序反射，消息 3 用随机顺序反射且该顺序在比较特征前已被记录。
    时间均以会话开始为零点。

    Attributes:
        message1_trace: 消息 1 的接收轨迹
        message3_trace: 消息 3 的接收轨迹
        schedule1: 消息 1 的固定标签顺序
        schedule3: 消息 3 的随机标签顺序（AP 侧记录）
        message1_time_s: 消息 1 到达时间
        message3_time_s: 消息 3 到达时间
        coherence_budget_s: 会话必须完成的相干时间预算
        verdict: 判决状态
    """

    model_config = ConfigDict(frozen=True)

    message1_trace: SignalTrace
    message3_trace: SignalTrace
    schedule1: TagSchedule
    schedule3: TagSchedule
    message1_time_s: float = Field(default=0.0, ge=0)
    message3_time_s: float = Field(default=0.0, ge=0)
    coherence_budget_s: float = Field(default=0.1, gt=0)
    verdict: SessionVerdict = SessionVerdict.PENDING

    @model_validator(mode="after")
    def validate_schedules(self) -> "AuthSession":
        if sorted(self.schedule1.order) != sorted(self.schedule3.order):
            raise ValueError("两条消息的标签顺序必须是同一标签集合的排列")
        if self.message3_time_s < self.message1_time_s:
            raise ValueError("消息 3 不能早于消息 1 到达")
        return self

    @property
    def span_s(self) -> float:
        """从消息 1 开始到消息 3 结束的总时长。"""
        return self.message3_time_s + self.message3_trace.duration_s - self.message1_time_s

    @property
    def within_budget(self) -> bool:
        return self.span_s <= self.coherence_budget_s

    def with_verdict(self, verdict: SessionVerdict) -> "AuthSession":
        return self.model_copy(update={"verdict": verdict})
