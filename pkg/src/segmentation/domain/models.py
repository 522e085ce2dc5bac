"""分段领域模型。"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.shared.schemas import ArrayModel, FloatArray


class Segment(BaseModel):
    """反向散射区间 [start_index, end_index)。"""

    model_config = ConfigDict(frozen=True)

    start_index: int = Field(..., ge=0, description="起点 η_s")
    end_index: int = Field(..., description="终点 η_e（不含）")

    @model_validator(mode="after")
    def validate_order(self) -> "Segment":
        if self.end_index <= self.start_index:
            raise ValueError(
                f"分段终点必须大于起点: ({self.start_index}, {self.end_index})"
            )
        return self

    def __len__(self) -> int:
        return self.end_index - self.start_index

    def fits(self, trace_length: int) -> bool:
        """分段是否位于长度为 trace_length 的轨迹内。"""
        return self.end_index <= trace_length


class EnergyEnvelope(ArrayModel):
    """滑动窗口平均能量 E(i)。"""

    values: FloatArray = Field(..., description="E(i)")
    window_length: int = Field(..., ge=1, description="窗口长度 N")

    @field_validator("values")
    @classmethod
    def validate_nonnegative(cls, v: np.ndarray) -> np.ndarray:
        if v.size and v.min() < 0:
            raise ValueError("能量包络不能为负")
        return v

    def __len__(self) -> int:
        return int(self.values.size)


class DecodeResult(BaseModel):
    """反向散射解码结果。

    bits 为空时表示未检测到反向散射，此时 detect_start = detect_end = 0。
    """

    model_config = ConfigDict(frozen=True)

    bits: list[int] = Field(default_factory=list, description="解码比特")
    detect_start: int = Field(default=0, ge=0, description="η_1")
    detect_end: int = Field(default=0, ge=0, description="η_2")
    bit_edges: list[int] = Field(default_factory=list, description="比特边界采样位置")
    tag_energy: float = Field(default=0.0, ge=0, description="标签反射能量摆幅 e")

    @property
    def detected(self) -> bool:
        return bool(self.bits)


class VarianceBounds(BaseModel):
    """方差门限穿越位置（方差序列索引）。"""

    model_config = ConfigDict(frozen=True)

    eta3: int = Field(..., ge=0)
    eta4: int = Field(..., ge=0)


class SegmentationResult(BaseModel):
    """一次完整分段的中间量与最终区间。"""

    model_config = ConfigDict(frozen=True)

    decode: DecodeResult
    variance_bounds: VarianceBounds
    variance_start: int = Field(..., description="η_3 映射到采样域的起点")
    variance_end: int = Field(..., description="η_4 映射到采样域的终点")
    threshold: float = Field(..., gt=0, description="方差门限 T")
    segment: Segment
