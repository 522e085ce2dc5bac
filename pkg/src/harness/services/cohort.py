"""仿真会话生成。

为实验与场景生成消息对：消息 1 总是由合法设备发出并按固定顺序反射，
消息 3 由合法设备、基础攻击者或高级攻击者发出，按 AP 记录的（随机）顺序反射。
所有随机性由种子派生，相同种子产生逐比特一致的轨迹。
"""

import logging

from pydantic import BaseModel, ConfigDict

from src.channel.domain.models import (
    ChannelEstimate,
    LinkProfile,
    Modulation,
    OriginLabel,
    SignalTrace,
    TagSchedule,
)
from src.channel.domain.physics import samples_per_bit
from src.channel.services.presets import EnvironmentPreset, build_link, get_preset
from src.channel.services.simulator import (
    apply_backscatter_channel,
    craft_advanced_attack,
    default_schedule,
    drift_link,
    perturb_link,
    synthesize_source,
    with_noise,
)
from src.config import Settings
from src.defense.domain.tag_random import draw_random_schedule
from src.shared.seeding import derive_rng, derive_seed

logger = logging.getLogger(__name__)

# 种子派生用途键
_LINK = 1
_MESSAGE1 = 2
_MESSAGE3 = 3
_SCHEDULE = 4
_ATTACKER = 5
_NOISE = 6


class PairSample(BaseModel):
    """一对消息及其调度记录。actor 只供评分使用，检测路径不读取。"""

    model_config = ConfigDict(frozen=True)

    message1: SignalTrace
    message3: SignalTrace
    reference_schedule: TagSchedule
    recorded_schedule: TagSchedule
    actor: OriginLabel


class SessionFactory:
    """消息对生成器。

    Attributes:
        preset: 环境预设
        tag_count: 标签数量
        noise_sigma: 接收噪声
    """

    def __init__(
        self,
        preset: EnvironmentPreset,
        tag_count: int = 3,
        message_samples: int = 8100,
        lead_samples: int = 1000,
        guard_samples: int = 50,
        noise_sigma: float = 0.02,
        sample_rate_hz: float = 1e6,
        bit_rate_bps: float = 1e4,
        modulation: Modulation = Modulation.CONSTANT_ENVELOPE,
    ) -> None:
        self.preset = preset
        self.tag_count = tag_count
        self.message_samples = message_samples
        self.noise_sigma = noise_sigma
        self.sample_rate_hz = sample_rate_hz
        self.bit_rate_bps = bit_rate_bps
        self.modulation = modulation
        self.reference_schedule = default_schedule(
            tag_count,
            message_samples,
            lead_samples,
            guard_samples,
            samples_per_bit(sample_rate_hz, bit_rate_bps),
        )

    @classmethod
    def from_settings(
        cls,
        settings: Settings,
        environment: str = "laboratory",
        tag_count: int | None = None,
        noise_sigma: float | None = None,
    ) -> "SessionFactory":
        return cls(
            preset=get_preset(environment),
            tag_count=tag_count if tag_count is not None else settings.tag_count,
            message_samples=settings.message_samples,
            lead_samples=settings.lead_samples,
            guard_samples=settings.guard_samples,
            noise_sigma=noise_sigma if noise_sigma is not None else settings.noise_sigma,
            sample_rate_hz=settings.sample_rate_hz,
            bit_rate_bps=settings.tag_bit_rate_bps,
        )

    def draw_link(self, seed: int) -> LinkProfile:
        """随机生成一个合法设备位置。"""
        return build_link(
            self.preset, self.tag_count, derive_rng(seed, _LINK), bit_rate_bps=self.bit_rate_bps
        )

    def source(self, seed: int) -> SignalTrace:
        return synthesize_source(
            self.message_samples, self.modulation, seed, sample_rate_hz=self.sample_rate_hz
        )

    def transmit(
        self,
        link: LinkProfile,
        schedule: TagSchedule,
        seed: int,
        label: OriginLabel,
        source: SignalTrace | None = None,
    ) -> SignalTrace:
        """一条消息经链路到达 AP。"""
        channel = with_noise(link.channel, self.noise_sigma, derive_seed(seed, _NOISE))
        return apply_backscatter_channel(
            source if source is not None else self.source(seed),
            link.tags,
            schedule,
            channel,
            origin_label=label,
        )

    def recorded_schedule(self, seed: int, tag_random: bool) -> TagSchedule:
        """AP 为消息 3 选定并记录的标签顺序。"""
        if not tag_random:
            return self.reference_schedule
        return draw_random_schedule(self.reference_schedule, derive_rng(seed, _SCHEDULE))

    def _message1(self, link: LinkProfile, seed: int) -> SignalTrace:
        return self.transmit(
            link, self.reference_schedule, derive_seed(seed, _MESSAGE1), OriginLabel.LEGITIMATE
        )

    def legitimate_pair(
        self,
        seed: int,
        link: LinkProfile | None = None,
        movement: float = 0.0,
        tag_random: bool = True,
    ) -> PairSample:
        """合法设备发出的两条消息，中间有环境漂移与可选的设备移动。"""
        link = link or self.draw_link(seed)
        recorded = self.recorded_schedule(seed, tag_random)
        moved = drift_link(link, self.preset.drift_sigma + movement, derive_rng(seed, _MESSAGE3))
        return PairSample(
            message1=self._message1(link, seed),
            message3=self.transmit(
                moved, recorded, derive_seed(seed, _MESSAGE3), OriginLabel.LEGITIMATE
            ),
            reference_schedule=self.reference_schedule,
            recorded_schedule=recorded,
            actor=OriginLabel.LEGITIMATE,
        )

    def basic_attack_pair(
        self,
        seed: int,
        divergence: float,
        link: LinkProfile | None = None,
        tag_random: bool = True,
    ) -> PairSample:
        """基础攻击者在另一位置冒充设备发出消息 3（发射功率已匹配）。"""
        link = link or self.draw_link(seed)
        recorded = self.recorded_schedule(seed, tag_random)
        attacker_link = perturb_link(link, divergence, derive_rng(seed, _ATTACKER))
        return PairSample(
            message1=self._message1(link, seed),
            message3=self.transmit(
                attacker_link, recorded, derive_seed(seed, _MESSAGE3), OriginLabel.BASIC_ATTACKER
            ),
            reference_schedule=self.reference_schedule,
            recorded_schedule=recorded,
            actor=OriginLabel.BASIC_ATTACKER,
        )

    def advanced_attack_pair(
        self,
        seed: int,
        estimation_error: float = 0.0,
        link: LinkProfile | None = None,
        tag_random: bool = True,
    ) -> PairSample:
        """高级攻击者按估计的链路伪造多径信号。

        攻击者不知道 AP 记录的顺序；启用标签随机化时它均匀猜测一个排列，
        否则沿用消息 1 的固定顺序。
        """
        link = link or self.draw_link(seed)
        recorded = self.recorded_schedule(seed, tag_random)
        if tag_random:
            assumed = draw_random_schedule(self.reference_schedule, derive_rng(seed, _ATTACKER))
        else:
            assumed = self.reference_schedule
        message1 = self._message1(link, seed)
        estimate = ChannelEstimate(source=self.source(derive_seed(seed, _MESSAGE3)), link=link)
        message3 = craft_advanced_attack(
            message1,
            estimate,
            assumed,
            estimation_error,
            derive_seed(seed, _ATTACKER),
            receiver_noise_sigma=self.noise_sigma,
        )
        return PairSample(
            message1=message1,
            message3=message3,
            reference_schedule=self.reference_schedule,
            recorded_schedule=recorded,
            actor=OriginLabel.ADVANCED_ATTACKER,
        )
