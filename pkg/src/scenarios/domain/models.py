"""攻击场景领域模型。

上层协议帧被抽象为时间线上的事件；"在上层丢弃该帧"对应步骤上的 accepted=False。
"""

from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.harness.domain.models import AttackerKind


class ScenarioKind(str, Enum):
    """攻击场景类型。"""

    DEAUTH_DEADLOCK = "deauth_deadlock"
    JAM_REPLAY = "jam_replay"
    AUTH_DEADLOCK = "auth_deadlock"


class Actor(str, Enum):
    """时间线上的参与者。"""

    DEVICE = "device"
    AP = "ap"
    ATTACKER = "attacker"


class Action(str, Enum):
    """时间线动作。

    SEND_MESSAGE1 建立参考消息；JAM_AND_RECORD 用攻击者信号干扰参考消息并录下设备原始信号；
    INJECT_DEAUTH、SEND_AUTH_REQUEST、REPLAY、SEND_MESSAGE3 是需要与参考消息比对的可疑帧；
    SEND_ACK 只记录，不参与比对。
    """

    SEND_MESSAGE1 = "send_message1"
    SEND_ACK = "send_ack"
    SEND_MESSAGE3 = "send_message3"
    INJECT_DEAUTH = "inject_deauth"
    SEND_AUTH_REQUEST = "send_auth_request"
    JAM_AND_RECORD = "jam_and_record"
    REPLAY = "replay"


# 需要比对签名的帧
VERIFIED_ACTIONS = frozenset(
    {Action.SEND_MESSAGE3, Action.INJECT_DEAUTH, Action.SEND_AUTH_REQUEST, Action.REPLAY}
)


class ScenarioOutcome(str, Enum):
    """场景结果。"""

    ATTACK_BLOCKED = "attack_blocked"
    ATTACK_SUCCEEDS = "attack_succeeds"
    LEGITIMATE = "legitimate"
    FALSE_ALARM = "false_alarm"


class TimelineEvent(BaseModel):
    """时间线事件。"""

    model_config = ConfigDict(frozen=True)

    time_s: float = Field(..., ge=0, description="相对会话开始的时间（秒）")
    actor: Actor
    action: Action


class AttackerParameters(BaseModel):
    """攻击者参数。"""

    model_config = ConfigDict(frozen=True)

    kind: AttackerKind = AttackerKind.BASIC
    divergence: float = Field(default=0.5, ge=0, description="与合法设备的信道差异")
    estimation_error: float = Field(default=0.0, ge=0, description="高级攻击者的信道估计误差")


class ScenarioScript(BaseModel):
    """攻击场景脚本。"""

    model_config = ConfigDict(frozen=True)

    scenario: ScenarioKind
    timeline: list[TimelineEvent] = Field(..., min_length=1)
    expected_outcome: ScenarioOutcome
    attacker: AttackerParameters = Field(default_factory=AttackerParameters)
    seed: int = Field(default=20240601, ge=0)
    auth_attempts: int | None = Field(
        default=None, ge=1, description="每个可疑帧的重复认证次数，为空时取配置"
    )
    environment: str = Field(default="laboratory")
    tag_count: int = Field(default=3, ge=1, le=8)
    noise_sigma: float = Field(default=0.02, ge=0)
    model_path: Path | None = Field(
        default=None, description="预训练模型；为空时用合法会话现场训练"
    )
    training_size: int = Field(default=120, ge=2, description="现场训练的画像数量")
    nu: float = Field(default=0.16, gt=0, le=1)

    @field_validator("timeline")
    @classmethod
    def validate_order(cls, v: list[TimelineEvent]) -> list[TimelineEvent]:
        """时间线必须严格按时间递增。"""
        for earlier, later in zip(v, v[1:]):
            if later.time_s <= earlier.time_s:
                raise ValueError(
                    f"时间线未严格递增: {earlier.time_s} -> {later.time_s}"
                )
        return v

    @property
    def has_attacker(self) -> bool:
        return any(event.actor == Actor.ATTACKER for event in self.timeline)

    def without_attacker(self) -> "ScenarioScript":
        """去掉攻击者的对照脚本：攻击者发出的可疑帧改由设备发出（重放改为消息 3），干扰事件删除。"""
        timeline = []
        for event in self.timeline:
            if event.actor != Actor.ATTACKER:
                timeline.append(event)
            elif event.action in VERIFIED_ACTIONS:
                action = Action.SEND_MESSAGE3 if event.action == Action.REPLAY else event.action
                timeline.append(
                    event.model_copy(update={"actor": Actor.DEVICE, "action": action})
                )
        return self.model_copy(
            update={"timeline": timeline, "expected_outcome": ScenarioOutcome.LEGITIMATE}
        )


class StepRecord(BaseModel):
    """时间线上一步的执行记录。"""

    model_config = ConfigDict(frozen=True)

    time_s: float
    actor: Actor
    action: Action
    label: str | None = Field(default=None, description="legitimate / attacker / no_backscatter")
    score: float | None = None
    accepted: bool | None = Field(default=None, description="上层是否接受该帧")
    per_tag_energy_delta: list[float] = Field(default_factory=list)
    note: str = ""


class ScenarioResult(BaseModel):
    """一次场景运行的汇总记录。"""

    model_config = ConfigDict(frozen=True)

    scenario: ScenarioKind
    outcome: ScenarioOutcome
    expected_outcome: ScenarioOutcome
    seed: int
    steps: list[StepRecord]

    @property
    def matches_expectation(self) -> bool:
        return self.outcome == self.expected_outcome

    @property
    def per_step_scores(self) -> list[float | None]:
        return [step.score for step in self.steps if step.action in VERIFIED_ACTIONS]
