"""特征领域模型。"""

import numpy as np
from pydantic import Field, model_validator

from src.shared.schemas import ArrayModel, FloatArray

# 固定的特征顺序，画像向量布局与 CSV 列顺序都遵循该顺序
FEATURE_NAMES: tuple[str, ...] = (
    "original",
    "smoothed",
    "envelope",
    "variance",
    "maximum",
    "minimum",
)
SAMPLEWISE_FEATURES: tuple[str, ...] = FEATURE_NAMES[:2]
BLOCKWISE_FEATURES: tuple[str, ...] = FEATURE_NAMES[2:]


class FeatureSet(ArrayModel):
    """一个分段上的六条幅度特征序列。

    original/smoothed 逐采样点；envelope/variance/maximum/minimum 按不重叠的块计算，
    长度为 floor(分段长度 / block)。
    """

    original: FloatArray = Field(..., description="幅度 |x(i)|")
    smoothed: FloatArray = Field(..., description="滑动平均后的幅度")
    envelope: FloatArray = Field(..., description="每块平均能量")
    variance: FloatArray = Field(..., description="每块幅度总体方差")
    maximum: FloatArray = Field(..., description="每块幅度最大值")
    minimum: FloatArray = Field(..., description="每块幅度最小值")
    block: int = Field(default=50, ge=1, description="块长度")

    @model_validator(mode="after")
    def validate_shapes(self) -> "FeatureSet":
        if self.original.size != self.smoothed.size:
            raise ValueError("original 与 smoothed 长度不一致")
        blocks = self.original.size // self.block
        for name in BLOCKWISE_FEATURES:
            if getattr(self, name).size != blocks:
                raise ValueError(f"{name} 长度应为 {blocks}")
        for name in FEATURE_NAMES:
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} 含有非有限值")
        if np.any(self.envelope < 0) or np.any(self.variance < 0):
            raise ValueError("envelope 与 variance 不能为负")
        if np.any(self.maximum < self.minimum):
            raise ValueError("存在 maximum < minimum 的块")
        return self

    def series(self, name: str) -> np.ndarray:
        """按名称取特征序列。"""
        if name not in FEATURE_NAMES:
            raise KeyError(f"未知特征: {name}")
        return getattr(self, name)  # type: ignore[no-any-return]

    @property
    def block_count(self) -> int:
        return int(self.envelope.size)
