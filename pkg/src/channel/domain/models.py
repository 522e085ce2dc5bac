"""信道仿真领域模型。

定义信号轨迹、标签配置、多径信道与标签时隙调度。
"""

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.shared.schemas import ArrayModel, ComplexArray


class OriginLabel(int, Enum):
    """轨迹来源标签，仅用于评估，检测器不可见。"""

    LEGITIMATE = 0
    BASIC_ATTACKER = 1
    ADVANCED_ATTACKER = 2
    UNKNOWN = 3


class Modulation(str, Enum):
    """源信号调制方式。"""

    CONSTANT_ENVELOPE = "constant_envelope"
    RANDOM_QPSK = "random_qpsk"


class SignalTrace(ArrayModel):
    """复基带采样序列。

    Attributes:
        samples: 复数采样点
        sample_rate_hz: 采样率
        origin_label: 生成该轨迹的角色（仅评估使用）
    """

    samples: ComplexArray = Field(..., description="复基带采样")
    sample_rate_hz: float = Field(..., gt=0, description="采样率（Hz）")
    origin_label: OriginLabel = Field(default=OriginLabel.UNKNOWN, description="来源标签")

    @field_validator("samples")
    @classmethod
    def validate_samples(cls, v: np.ndarray) -> np.ndarray:
        """采样非空且全部有限。"""
        if v.size == 0:
            raise ValueError("samples 不能为空")
        if not np.all(np.isfinite(v)):
            raise ValueError("samples 含有非有限值")
        return v

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        """轨迹时长（秒）。"""
        return len(self) / self.sample_rate_hz

    @property
    def amplitude(self) -> np.ndarray:
        """幅度序列 |x(i)|。"""
        return np.abs(self.samples)


class TagConfig(BaseModel):
    """反向散射标签配置。

    reflection_coefficients 是接收机视角下的等效反射系数，随发射机位置变化。
    """

    model_config = ConfigDict(frozen=True)

    reflection_coefficients: list[complex] = Field(
        ..., min_length=1, description="各标签复反射系数 α"
    )
    bit_rate_bps: float = Field(default=1e4, gt=0, description="标签比特率")
    per_tag_delay_samples: list[int] = Field(
        default_factory=list, description="各标签附加时延（采样点），为空表示全 0"
    )
    geometry_note: str = Field(default="", description="部署说明，仅文档用途")

    @field_validator("reflection_coefficients")
    @classmethod
    def validate_coefficients(cls, v: list[complex]) -> list[complex]:
        """|α| 必须位于 [0, 1)。"""
        for alpha in v:
            if not abs(alpha) < 1.0:
                raise ValueError(f"反射系数 |α| 必须小于 1: {alpha}")
        return v

    @model_validator(mode="after")
    def validate_delays(self) -> "TagConfig":
        if self.per_tag_delay_samples and len(self.per_tag_delay_samples) != self.tag_count:
            raise ValueError("per_tag_delay_samples 长度必须等于标签数量")
        if any(d < 0 for d in self.per_tag_delay_samples):
            raise ValueError("标签时延不能为负")
        return self

    @property
    def tag_count(self) -> int:
        return len(self.reflection_coefficients)

    def delay_of(self, tag: int) -> int:
        """标签 tag 的附加时延。"""
        return self.per_tag_delay_samples[tag] if self.per_tag_delay_samples else 0


class PathSpec(BaseModel):
    """单条传播路径：复衰减 β_n 与整数时延 t_n。"""

    model_config = ConfigDict(frozen=True)

    gain: complex = Field(..., description="复路径增益 β")
    delay_samples: int = Field(default=0, ge=0, description="路径时延（采样点）")


class ChannelSpec(BaseModel):
    """多径信道描述。"""

    model_config = ConfigDict(frozen=True)

    paths: list[PathSpec] = Field(..., min_length=1, description="传播路径列表")
    noise_sigma: float = Field(default=0.0, ge=0, description="复高斯噪声标准差")
    rng_seed: int = Field(default=0, ge=0, lt=2**64, description="噪声随机种子")

    @field_validator("paths")
    @classmethod
    def validate_direct_path(cls, v: list[PathSpec]) -> list[PathSpec]:
        """至少包含一条时延为 0 的直射路径。"""
        if not any(p.delay_samples == 0 for p in v):
            raise ValueError("信道必须包含时延为 0 的直射路径")
        return v

    @property
    def max_delay(self) -> int:
        return max(p.delay_samples for p in self.paths)

    @property
    def path_power(self) -> float:
        """各路径功率之和 Σ|β|²。"""
        return float(sum(abs(p.gain) ** 2 for p in self.paths))


class TagSchedule(BaseModel):
    """标签时隙调度。

    位置 p 上激活的标签为 order[p]，其时隙覆盖
    [start_sample + p*(slot+guard), start_sample + p*(slot+guard) + slot)。
    """

    model_config = ConfigDict(frozen=True)

    order: list[int] = Field(..., min_length=1, description="标签激活顺序（排列）")
    slot_length_samples: int = Field(..., gt=0, description="每个标签的时隙长度")
    guard_samples: int = Field(default=0, ge=0, description="时隙间保护间隔")
    start_sample: int = Field(default=0, ge=0, description="首个时隙起点")

    @field_validator("order")
    @classmethod
    def validate_permutation(cls, v: list[int]) -> list[int]:
        """order 必须是 0..n-1 的排列。"""
        if sorted(v) != list(range(len(v))):
            raise ValueError(f"order 不是有效排列: {v}")
        return v

    @property
    def tag_count(self) -> int:
        return len(self.order)

    @property
    def end_sample(self) -> int:
        """最后一个时隙的结束位置（不含）。"""
        return self.slot_bounds(self.tag_count - 1)[1]

    def slot_bounds(self, position: int) -> tuple[int, int]:
        """第 position 个时隙的 [start, stop)。"""
        start = self.start_sample + position * (self.slot_length_samples + self.guard_samples)
        return start, start + self.slot_length_samples

    def with_order(self, order: list[int]) -> "TagSchedule":
        """返回仅更换顺序的调度副本。"""
        return self.model_copy(update={"order": list(order)})


class LinkProfile(BaseModel):
    """某一发射位置到 AP 的完整链路：标签等效系数与多径信道。"""

    model_config = ConfigDict(frozen=True)

    tags: TagConfig
    channel: ChannelSpec


class ChannelEstimate(BaseModel):
    """高级攻击者掌握的合法链路知识。"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    source: SignalTrace
    link: LinkProfile
