"""特征提取。

在分段内计算幅度、平滑幅度以及按块的能量、方差、最大值与最小值。
只使用幅度，不使用相位。
"""

import numpy as np
from scipy.ndimage import uniform_filter1d

from src.channel.domain.models import SignalTrace
from src.features.domain.models import FeatureSet
from src.segmentation.domain.models import Segment
from src.shared.errors import FeatureError


def extract_features(
    trace: SignalTrace,
    segment: Segment,
    block: int = 50,
    smoothing_window: int = 50,
) -> FeatureSet:
    """提取分段的六条特征序列。

    Args:
        trace: 接收轨迹
        segment: 反向散射区间
        block: 块长度，尾部不足一块的采样被丢弃
        smoothing_window: 平滑窗口

    Returns:
        FeatureSet: 特征集合

    Raises:
        FeatureError: 分段越界或短于一个块
    """
    if block < 1:
        raise FeatureError(f"块长度必须为正: {block}")
    if not segment.fits(len(trace)):
        raise FeatureError(
            f"分段 ({segment.start_index}, {segment.end_index}) 超出轨迹长度 {len(trace)}"
        )
    if len(segment) < block:
        raise FeatureError(f"分段长度 {len(segment)} 短于一个块 {block}")

    original = np.abs(trace.samples[segment.start_index : segment.end_index])
    smoothed = uniform_filter1d(original, smoothing_window, mode="nearest")

    count = original.size // block
    blocks = original[: count * block].reshape(count, block)

    return FeatureSet(
        original=original,
        smoothed=smoothed,
        envelope=(blocks**2).mean(axis=1),
        variance=blocks.var(axis=1),
        maximum=blocks.max(axis=1),
        minimum=blocks.min(axis=1),
        block=block,
    )


class FeatureExtractor:
    """带固定参数的特征提取器。"""

    def __init__(self, block: int = 50, smoothing_window: int = 50) -> None:
        self.block = block
        self.smoothing_window = smoothing_window

    def extract(self, trace: SignalTrace, segment: Segment) -> FeatureSet:
        return extract_features(trace, segment, self.block, self.smoothing_window)
