"""分段模块。

融合反向散射解码与能量包络方差检测，定位每条消息中的反向散射区间。
"""

from src.segmentation.domain.models import (
    DecodeResult,
    EnergyEnvelope,
    Segment,
    SegmentationResult,
    VarianceBounds,
)
from src.segmentation.services.segmenter import (
    Segmenter,
    decode_backscatter,
    energy_envelope,
    envelope_variance,
    fuse_segment,
    slot_segments,
    variance_thresholds,
)

__all__ = [
    "DecodeResult",
    "EnergyEnvelope",
    "Segment",
    "SegmentationResult",
    "Segmenter",
    "VarianceBounds",
    "decode_backscatter",
    "energy_envelope",
    "envelope_variance",
    "fuse_segment",
    "slot_segments",
    "variance_thresholds",
]
