"""环境反向散射信道仿真器。

接收信号模型：

    S_r(i) = Σ_n β_n · S_t(i - t_n) + Σ_k α_k · S_b,k(i) · S_t(i - d_k) + η(i)

其中标签 k 仅在其时隙内按方波 S_b,k 反射。所有随机性来自显式种子，
相同输入产生逐比特一致的输出。
"""

import logging

import numpy as np

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
from src.channel.domain.physics import samples_per_bit, tag_waveform
from src.shared.errors import ScheduleError, TraceFormatError

logger = logging.getLogger(__name__)

# 扰动后反射系数幅度上限，保持 |α| < 1
MAX_REFLECTION_MAGNITUDE = 0.95

# QPSK 星座点（单位幅度）
_QPSK = np.exp(1j * (np.pi / 4 + np.pi / 2 * np.arange(4)))


def _complex_gaussian(rng: np.random.Generator, size: int) -> np.ndarray:
    """单位方差的圆对称复高斯样本。"""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)


def synthesize_source(
    duration_samples: int,
    modulation: Modulation,
    seed: int,
    amplitude: float = 1.0,
    sample_rate_hz: float = 1e6,
    samples_per_symbol: int = 1,
) -> SignalTrace:
    """生成挑战/应答消息的源波形 S_t(i)。

    Args:
        duration_samples: 采样点数
        modulation: 调制方式
        seed: 随机种子
        amplitude: 包络幅度
        sample_rate_hz: 采样率
        samples_per_symbol: QPSK 每符号采样点数

    Returns:
        SignalTrace: 源波形

    Raises:
        ValueError: duration_samples < 1
    """
    if duration_samples < 1:
        raise ValueError("duration_samples 必须 >= 1")
    if samples_per_symbol < 1:
        raise ValueError("samples_per_symbol 必须 >= 1")

    rng = np.random.default_rng(seed)
    if modulation == Modulation.CONSTANT_ENVELOPE:
        phase = rng.uniform(0.0, 2.0 * np.pi)
        samples = np.full(duration_samples, amplitude * np.exp(1j * phase), dtype=np.complex128)
    else:
        n_symbols = -(-duration_samples // samples_per_symbol)
        symbols = _QPSK[rng.integers(0, 4, size=n_symbols)]
        samples = amplitude * np.repeat(symbols, samples_per_symbol)[:duration_samples]

    return SignalTrace(samples=samples, sample_rate_hz=sample_rate_hz)


def _validate_schedule(
    schedule: TagSchedule, tags: TagConfig, source_length: int
) -> None:
    if max(schedule.order) >= tags.tag_count:
        raise ScheduleError(
            f"调度中的标签索引越界: order={schedule.order}, tag_count={tags.tag_count}"
        )
    for position, tag in enumerate(schedule.order):
        _, stop = schedule.slot_bounds(position)
        if stop + tags.delay_of(tag) > source_length:
            raise ScheduleError(
                f"时隙 {position} 超出源信号长度: stop={stop}, length={source_length}"
            )


def tag_reflection_term(
    source: SignalTrace, tags: TagConfig, schedule: TagSchedule, tag: int, output_length: int
) -> np.ndarray:
    """单个标签的反射分量 α_k · S_b,k(i) · S_t(i - d_k)。

    Args:
        source: 源波形
        tags: 标签配置
        schedule: 时隙调度
        tag: 标签索引
        output_length: 输出长度

    Returns:
        np.ndarray: 长度为 output_length 的复数数组，时隙外为 0
    """
    term = np.zeros(output_length, dtype=np.complex128)
    if tag not in schedule.order:
        return term
    spb = samples_per_bit(source.sample_rate_hz, tags.bit_rate_bps)
    position = schedule.order.index(tag)
    start, stop = schedule.slot_bounds(position)
    delay = tags.delay_of(tag)
    wave = tag_waveform(stop - start, spb)
    alpha = complex(tags.reflection_coefficients[tag])
    term[start + delay : stop + delay] = alpha * wave * source.samples[start:stop]
    return term


def apply_backscatter_channel(
    source: SignalTrace,
    tags: TagConfig,
    schedule: TagSchedule,
    channel: ChannelSpec,
    origin_label: OriginLabel | None = None,
) -> SignalTrace:
    """让源信号经过多径信道与标签反射，得到 AP 接收轨迹。

    Args:
        source: 源波形
        tags: 标签配置
        schedule: 时隙调度
        channel: 多径信道
        origin_label: 输出轨迹的来源标签，默认沿用源波形

    Returns:
        SignalTrace: 长度为 len(source) + 最大路径时延 的接收轨迹

    Raises:
        ScheduleError: 时隙越界或标签索引越界
    """
    samples_per_bit(source.sample_rate_hz, tags.bit_rate_bps)
    length = len(source)
    _validate_schedule(schedule, tags, length)

    output_length = length + channel.max_delay
    received = np.zeros(output_length, dtype=np.complex128)
    for path in channel.paths:
        received[path.delay_samples : path.delay_samples + length] += (
            complex(path.gain) * source.samples
        )

    for tag in schedule.order:
        received += tag_reflection_term(source, tags, schedule, tag, output_length)

    if channel.noise_sigma > 0:
        rng = np.random.default_rng(channel.rng_seed)
        received += channel.noise_sigma * _complex_gaussian(rng, output_length)

    label = source.origin_label if origin_label is None else origin_label
    return SignalTrace(samples=received, sample_rate_hz=source.sample_rate_hz, origin_label=label)


def add_receiver_noise(trace: SignalTrace, sigma: float, seed: int) -> SignalTrace:
    """叠加接收端复高斯噪声。"""
    if sigma < 0:
        raise ValueError("sigma 不能为负")
    if sigma == 0:
        return trace
    rng = np.random.default_rng(seed)
    noisy = trace.samples + sigma * _complex_gaussian(rng, len(trace))
    return SignalTrace(
        samples=noisy, sample_rate_hz=trace.sample_rate_hz, origin_label=trace.origin_label
    )


def superpose(first: SignalTrace, second: SignalTrace, label: OriginLabel) -> SignalTrace:
    """两路同时到达 AP 的信号叠加（较短者尾部补零）。"""
    if first.sample_rate_hz != second.sample_rate_hz:
        raise TraceFormatError("叠加的两条轨迹采样率不同")
    length = max(len(first), len(second))
    combined = np.zeros(length, dtype=np.complex128)
    combined[: len(first)] += first.samples
    combined[: len(second)] += second.samples
    return SignalTrace(samples=combined, sample_rate_hz=first.sample_rate_hz, origin_label=label)


def _scale_coefficient(alpha: complex, factor: complex) -> complex:
    scaled = alpha * factor
    magnitude = abs(scaled)
    if magnitude > MAX_REFLECTION_MAGNITUDE:
        scaled *= MAX_REFLECTION_MAGNITUDE / magnitude
    return complex(scaled)


def perturb_link(
    link: LinkProfile,
    divergence: float,
    rng: np.random.Generator,
    power_match: bool = True,
    vary_delays: bool = True,
) -> LinkProfile:
    """对链路做相对复扰动，模拟另一发射位置。

    每条路径增益与每个标签等效系数乘以 (1 + d·z)，z 为单位复高斯；
    非直射路径时延按 (1 + d·u) 缩放。power_match 时整体缩放使接收功率不变，
    对应攻击者调节发射功率。

    Args:
        link: 原始链路
        divergence: 扰动强度 d（0 表示同一位置）
        rng: 随机数生成器
        power_match: 是否匹配原链路的路径功率
        vary_delays: 是否扰动路径时延

    Returns:
        LinkProfile: 扰动后的链路
    """
    if divergence < 0:
        raise ValueError("divergence 不能为负")

    channel = link.channel
    gain_noise = _complex_gaussian(rng, len(channel.paths))
    delay_noise = rng.standard_normal(len(channel.paths))
    tag_noise = _complex_gaussian(rng, link.tags.tag_count)

    paths: list[PathSpec] = []
    for path, z, u in zip(channel.paths, gain_noise, delay_noise, strict=True):
        delay = path.delay_samples
        if vary_delays and delay > 0:
            delay = max(1, int(round(delay * (1.0 + divergence * u))))
        gain = complex(path.gain) * (1.0 + divergence * z)
        paths.append(PathSpec(gain=gain, delay_samples=delay))

    scale = 1.0
    if power_match:
        new_power = sum(abs(p.gain) ** 2 for p in paths)
        if new_power > 0:
            scale = float(np.sqrt(channel.path_power / new_power))
        paths = [PathSpec(gain=p.gain * scale, delay_samples=p.delay_samples) for p in paths]

    coefficients = [
        _scale_coefficient(complex(alpha), (1.0 + divergence * z) * scale)
        for alpha, z in zip(link.tags.reflection_coefficients, tag_noise, strict=True)
    ]
    tags = link.tags.model_copy(update={"reflection_coefficients": coefficients})
    return LinkProfile(tags=tags, channel=channel.model_copy(update={"paths": paths}))


def drift_link(link: LinkProfile, sigma: float, rng: np.random.Generator) -> LinkProfile:
    """同一设备两条消息之间的小幅信道漂移（人员走动、设备轻微移动）。"""
    return perturb_link(link, sigma, rng, power_match=False, vary_delays=False)


def with_noise(channel: ChannelSpec, noise_sigma: float, seed: int) -> ChannelSpec:
    """返回更换噪声参数后的信道副本。"""
    return channel.model_copy(update={"noise_sigma": noise_sigma, "rng_seed": int(seed)})


def default_schedule(
    tag_count: int,
    message_samples: int,
    lead_samples: int,
    guard_samples: int,
    spb: int,
    order: list[int] | None = None,
) -> TagSchedule:
    """在消息中均分标签时隙。

    首尾各保留 lead_samples 的无反射区，时隙长度向下取整到整比特。

    Raises:
        ScheduleError: 消息过短，放不下至少一个比特的时隙
    """
    available = message_samples - 2 * lead_samples - (tag_count - 1) * guard_samples
    slot = (available // tag_count // spb) * spb
    if slot < spb:
        raise ScheduleError(
            f"消息长度 {message_samples} 不足以容纳 {tag_count} 个标签时隙"
        )
    return TagSchedule(
        order=list(order) if order is not None else list(range(tag_count)),
        slot_length_samples=slot,
        guard_samples=guard_samples,
        start_sample=lead_samples,
    )


def craft_advanced_attack(
    reference: SignalTrace,
    estimate: ChannelEstimate,
    assumed_schedule: TagSchedule,
    estimation_error_sigma: float,
    seed: int,
    receiver_noise_sigma: float = 0.0,
) -> SignalTrace:
    """高级攻击者构造虚拟多径信号。

    攻击者按估计的路径增益与标签系数、在假定的标签顺序下合成接收波形，
    再经预补偿的单一路径发送到 AP。估计误差为各增益上的相对复高斯扰动。

    Args:
        reference: 攻击者观测到的合法轨迹（用于长度与采样率校验）
        estimate: 攻击者估计的源波形与链路
        assumed_schedule: 攻击者假定的标签顺序
        estimation_error_sigma: 增益估计误差强度
        seed: 随机种子
        receiver_noise_sigma: AP 接收噪声

    Returns:
        SignalTrace: origin_label 为 ADVANCED_ATTACKER 的伪造轨迹
    """
    if estimation_error_sigma < 0:
        raise ValueError("estimation_error_sigma 不能为负")

    rng = np.random.default_rng(seed)
    link = estimate.link
    path_error = _complex_gaussian(rng, len(link.channel.paths))
    tag_error = _complex_gaussian(rng, link.tags.tag_count)

    paths = [
        PathSpec(
            gain=complex(p.gain) * (1.0 + estimation_error_sigma * z),
            delay_samples=p.delay_samples,
        )
        for p, z in zip(link.channel.paths, path_error, strict=True)
    ]
    coefficients = [
        _scale_coefficient(complex(alpha), 1.0 + estimation_error_sigma * z)
        for alpha, z in zip(link.tags.reflection_coefficients, tag_error, strict=True)
    ]
    emulated_channel = ChannelSpec(paths=paths, noise_sigma=0.0)
    emulated_tags = link.tags.model_copy(update={"reflection_coefficients": coefficients})

    crafted = apply_backscatter_channel(
        estimate.source,
        emulated_tags,
        assumed_schedule,
        emulated_channel,
        origin_label=OriginLabel.ADVANCED_ATTACKER,
    )
    if len(crafted) != len(reference) or crafted.sample_rate_hz != reference.sample_rate_hz:
        raise TraceFormatError("伪造轨迹与参考轨迹的长度或采样率不一致")

    noise_seed = int(rng.integers(0, 2**63))
    return add_receiver_noise(crafted, receiver_noise_sigma, noise_seed)
