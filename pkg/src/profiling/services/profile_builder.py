"""画像向量构建。

每条特征序列按各自长度近似等分为固定块数，逐块计算 DTW 距离后按固定布局拼接：
original、smoothed 各 128 块，envelope、variance、maximum、minimum 各 58 块。
"""

import logging

import numpy as np

from src.features.domain.models import BLOCKWISE_FEATURES, SAMPLEWISE_FEATURES, FeatureSet
from src.profiling.domain.dtw import batched_dtw
from src.profiling.domain.models import (
    DEFAULT_BLOCKWISE_CHUNKS,
    DEFAULT_ORIGINAL_CHUNKS,
    ProfileVector,
)
from src.shared.chunking import chunk_bounds
from src.shared.errors import ProfileError

logger = logging.getLogger(__name__)


def _chunks(series: np.ndarray, count: int, name: str) -> list[np.ndarray]:
    if series.size < count:
        raise ProfileError(f"特征 {name} 长度 {series.size} 小于分块数 {count}")
    return [series[a:b] for a, b in chunk_bounds(series.size, count)]


def build_profile(
    a: FeatureSet,
    b: FeatureSet,
    original_chunks: int = DEFAULT_ORIGINAL_CHUNKS,
    blockwise_chunks: int = DEFAULT_BLOCKWISE_CHUNKS,
) -> ProfileVector:
    """比较两组特征，生成画像向量。

    Args:
        a: 第一条消息的特征
        b: 第二条消息的特征
        original_chunks: 逐采样特征的分块数
        blockwise_chunks: 按块特征的分块数

    Returns:
        ProfileVector: 长度 2*original_chunks + 4*blockwise_chunks 的距离向量

    Raises:
        ProfileError: 任一特征序列短于其分块数
    """
    parts = []
    for name in SAMPLEWISE_FEATURES + BLOCKWISE_FEATURES:
        count = original_chunks if name in SAMPLEWISE_FEATURES else blockwise_chunks
        parts.append(
            batched_dtw(
                _chunks(a.series(name), count, name),
                _chunks(b.series(name), count, name),
            )
        )
    return ProfileVector(distances=np.concatenate(parts))


class ProfileBuilder:
    """带固定分块数的画像构建器。"""

    def __init__(
        self,
        original_chunks: int = DEFAULT_ORIGINAL_CHUNKS,
        blockwise_chunks: int = DEFAULT_BLOCKWISE_CHUNKS,
    ) -> None:
        self.original_chunks = original_chunks
        self.blockwise_chunks = blockwise_chunks

    @property
    def dimension(self) -> int:
        return len(SAMPLEWISE_FEATURES) * self.original_chunks + len(
            BLOCKWISE_FEATURES
        ) * self.blockwise_chunks

    def min_segment_length(self, block: int) -> int:
        """满足分块数要求的最短分段长度。"""
        return max(self.original_chunks, self.blockwise_chunks * block)

    def build(self, a: FeatureSet, b: FeatureSet) -> ProfileVector:
        return build_profile(a, b, self.original_chunks, self.blockwise_chunks)
