"""信道仿真模块。

合成合法设备、基础攻击者与高级攻击者的接收轨迹。
"""

from src.channel.domain.models import (
    ChannelEstimate,
    ChannelSpec,
    LinkProfile,
    Modulation,
    OriginLabel,
    PathSpec,
    SignalTrace,
    TagConfig,
    TagSchedule,
)
from src.channel.domain.physics import coherence_time_s
from src.channel.infrastructure.trace_codec import TraceCodec
from src.channel.services.presets import PRESETS, EnvironmentPreset, build_link, get_preset
from src.channel.services.simulator import (
    apply_backscatter_channel,
    craft_advanced_attack,
    default_schedule,
    drift_link,
    perturb_link,
    synthesize_source,
)

__all__ = [
    "ChannelEstimate",
    "ChannelSpec",
    "EnvironmentPreset",
    "LinkProfile",
    "Modulation",
    "OriginLabel",
    "PRESETS",
    "PathSpec",
    "SignalTrace",
    "TagConfig",
    "TagSchedule",
    "TraceCodec",
    "apply_backscatter_channel",
    "build_link",
    "coherence_time_s",
    "craft_advanced_attack",
    "default_schedule",
    "drift_link",
    "get_preset",
    "perturb_link",
    "synthesize_source",
]
