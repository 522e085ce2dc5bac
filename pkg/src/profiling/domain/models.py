"""画像领域模型。"""

import numpy as np
from pydantic import Field, field_validator

from src.features.domain.models import BLOCKWISE_FEATURES, SAMPLEWISE_FEATURES
from src.shared.schemas import ArrayModel, FloatArray

DEFAULT_ORIGINAL_CHUNKS = 128
DEFAULT_BLOCKWISE_CHUNKS = 58
# 2 × 128 + 4 × 58
PROFILE_LENGTH = (
    len(SAMPLEWISE_FEATURES) * DEFAULT_ORIGINAL_CHUNKS
    + len(BLOCKWISE_FEATURES) * DEFAULT_BLOCKWISE_CHUNKS
)


def profile_columns(
    original_chunks: int = DEFAULT_ORIGINAL_CHUNKS,
    blockwise_chunks: int = DEFAULT_BLOCKWISE_CHUNKS,
) -> list[str]:
    """画像向量各维的列名，顺序即向量布局。"""
    columns = []
    for name in SAMPLEWISE_FEATURES:
        columns.extend(f"{name}_{k:03d}" for k in range(original_chunks))
    for name in BLOCKWISE_FEATURES:
        columns.extend(f"{name}_{k:03d}" for k in range(blockwise_chunks))
    return columns


class ProfileVector(ArrayModel):
    """两条消息特征序列之间的分块 DTW 距离向量。"""

    distances: FloatArray = Field(..., description="分块 DTW 距离")

    @field_validator("distances")
    @classmethod
    def validate_distances(cls, v: np.ndarray) -> np.ndarray:
        if v.size == 0:
            raise ValueError("画像向量不能为空")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("画像向量的元素必须为有限非负数")
        return v

    def __len__(self) -> int:
        return int(self.distances.size)
