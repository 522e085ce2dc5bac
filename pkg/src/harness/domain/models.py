"""实验领域模型。"""

import math
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.channel.services.presets import PRESETS


class SweepAxis(str, Enum):
    """实验扫描轴。"""

    NU = "nu"
    TAG_COUNT = "tag_count"
    TRAINING_SIZE = "training_size"
    POS_NEG_RATIO = "pos_neg_ratio"
    ATTACKER_DIVERGENCE = "attacker_divergence"
    AP_COUNT = "ap_count"
    DEVICE_MOVEMENT = "device_movement"
    ENVIRONMENT = "environment"


class AttackerKind(str, Enum):
    """攻击者类型。"""

    BASIC = "basic"
    ADVANCED = "advanced"


class DetectionMethod(str, Enum):
    """检测方法。"""

    SVM = "svm"
    CORRELATION = "correlation"


# 取整数值的扫描轴
_INTEGER_AXES = {SweepAxis.TAG_COUNT, SweepAxis.TRAINING_SIZE, SweepAxis.AP_COUNT}

DEFAULT_NU_GRID = [0.02, 0.05, 0.08, 0.12, 0.16, 0.2, 0.3, 0.4, 0.6, 0.8]

# 没有攻击者验证样本时 ν 选择的目标 TP 率
DEFAULT_TARGET_TP = 0.93


class ExperimentConfig(BaseModel):
    """一次参数扫描实验的配置。

    未被扫描的参数取字段值；扫描轴上的参数在每个网格点被覆盖。
    """

    model_config = ConfigDict(frozen=True)

    axis: SweepAxis = Field(..., description="扫描轴")
    grid: list[float | str] = Field(..., min_length=1, description="网格取值")
    repetitions: int = Field(default=1, ge=1, description="每个网格点的重复次数")

    # 场景参数
    tag_count: int = Field(default=3, ge=1, le=8)
    noise_sigma: float = Field(default=0.02, ge=0)
    environment: str = Field(default="laboratory", description="训练环境预设")
    test_environment: str | None = Field(
        default=None, description="测试环境预设，为空时与训练环境相同"
    )
    device_movement: float = Field(
        default=0.0, ge=0, description="两条消息之间设备移动引起的额外漂移"
    )
    tag_random: bool = Field(default=True, description="消息 3 是否使用随机标签顺序")
    ap_count: int = Field(default=1, ge=1, description="参与投票的 AP 数量")

    # 攻击者参数
    attacker_kind: AttackerKind = AttackerKind.BASIC
    attacker_divergence: float = Field(default=0.25, ge=0, description="攻击者信道差异")
    estimation_error: float = Field(default=0.0, ge=0, description="高级攻击者的信道估计误差")

    # 训练与验证
    training_size: int = Field(default=577, ge=1)
    validation_positives: int = Field(default=500, ge=1)
    pos_neg_ratio: float = Field(default=0.154, ge=0, description="验证集负样本/正样本比例")
    nu: float | None = Field(
        default=None, gt=0, le=1, description="固定 ν，为空时在 nu_grid 上选择"
    )
    nu_grid: list[float] = Field(default_factory=lambda: list(DEFAULT_NU_GRID), min_length=1)
    target_tp: float | None = Field(
        default=None,
        ge=0,
        le=1,
        description="无攻击者验证样本时的目标 TP 率，为空时取 DEFAULT_TARGET_TP",
    )

    # 测试
    test_legitimate: int = Field(default=500, ge=1)
    test_attackers: int = Field(default=500, ge=1)
    include_baseline: bool = Field(default=True, description="是否同时评估相关系数基线")

    seed: int = Field(default=20240601, ge=0)
    workers: int = Field(default=1, ge=1)
    output_path: Path = Field(default=Path("output/metrics.csv"))

    @field_validator("environment", "test_environment")
    @classmethod
    def validate_environment(cls, v: str | None) -> str | None:
        if v is not None and v not in PRESETS:
            raise ValueError(f"未知环境预设: {v}")
        return v

    @field_validator("nu_grid")
    @classmethod
    def validate_nu_grid(cls, v: list[float]) -> list[float]:
        if any(not 0 < nu <= 1 for nu in v):
            raise ValueError("nu_grid 取值必须位于 (0, 1]")
        return v

    @model_validator(mode="after")
    def validate_grid(self) -> "ExperimentConfig":
        for value in self.grid:
            if self.axis == SweepAxis.ENVIRONMENT:
                if str(value) not in PRESETS:
                    raise ValueError(f"环境轴取值必须是预设名称: {value}")
                continue
            if isinstance(value, str):
                raise ValueError(f"扫描轴 {self.axis.value} 的取值必须是数值: {value!r}")
            if self.axis in _INTEGER_AXES and (value != int(value) or value < 1):
                raise ValueError(f"扫描轴 {self.axis.value} 的取值必须是正整数: {value}")
            if self.axis == SweepAxis.NU and not 0 < value <= 1:
                raise ValueError(f"ν 取值必须位于 (0, 1]: {value}")
            if value < 0:
                raise ValueError(f"扫描取值不能为负: {value}")
        return self

    def at(self, value: float | str) -> "ExperimentConfig":
        """返回把扫描轴参数设为 value 的副本。"""
        if self.axis == SweepAxis.ENVIRONMENT:
            update: dict[str, float | int | str] = {"test_environment": str(value)}
        elif self.axis in _INTEGER_AXES:
            update = {self.axis.value: int(value)}
        else:
            update = {self.axis.value: float(value)}
        return type(self).model_validate({**self.model_dump(), **update})

    @property
    def evaluation_environment(self) -> str:
        return self.test_environment or self.environment

    @property
    def validation_negatives(self) -> int:
        """验证集负样本数 = ratio · 正样本数，半数向上取整。"""
        return math.floor(self.pos_neg_ratio * self.validation_positives + 0.5)


def format_value(value: float | str) -> str:
    """网格取值在 CSV 中的文本形式。"""
    if isinstance(value, str):
        return value
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


class MetricsRecord(BaseModel):
    """一个网格点一次重复的一种检测方法的结果。

    TP 率 = 被接受的合法试验 / 合法试验总数；
    FP 率 = 被接受的攻击试验 / 攻击试验总数。未检测到反向散射的试验计为未接受。
    """

    model_config = ConfigDict(frozen=True)

    axis: SweepAxis
    value: str
    repetition: int = Field(..., ge=0)
    method: DetectionMethod
    nu: float | None = None
    tp_rate: float = Field(..., ge=0, le=1)
    fp_rate: float = Field(..., ge=0, le=1)
    legit_trials: int = Field(..., ge=1)
    attacker_trials: int = Field(..., ge=1)
    legit_no_backscatter: int = Field(default=0, ge=0)
    attacker_no_backscatter: int = Field(default=0, ge=0)
    seed: int = Field(..., ge=0)

    @property
    def trial_count(self) -> int:
        return self.legit_trials + self.attacker_trials


class RunManifest(BaseModel):
    """一次实验运行的审计记录（JSON Lines 中的一行）。"""

    run_id: str
    config: ExperimentConfig
    task_seeds: dict[str, int] = Field(default_factory=dict, description="value/repetition → 种子")
    record_count: int = 0
    started_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    finished_at: datetime | None = None
