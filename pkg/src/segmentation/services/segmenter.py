"""反向散射区间检测与分段。

融合两种检测结果：
1. 反向散射解码：平滑幅度与局部门限比较判决比特，得到 (η_1, η_2)；
   局部门限取一个开关周期窗口内较高一半与较低一半均值的中点
2. 能量包络方差：在解码区间附近搜索 E(i) 的滑动方差首末次超过门限 T，得到 (η_3, η_4)

两个检测器都只看局部窗口，因此在轨迹前补空闲采样只会平移结果。

最终区间取两者中点。
"""

import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from returns.result import Failure, Result, Success

from src.channel.domain.models import SignalTrace, TagSchedule
from src.channel.domain.physics import samples_per_bit
from src.config import Settings
from src.segmentation.domain.models import (
    DecodeResult,
    EnergyEnvelope,
    Segment,
    SegmentationResult,
    VarianceBounds,
)
from src.shared.errors import NoBackscatterError, SegmentationError

logger = logging.getLogger(__name__)

# 判决裕量相对偏差噪声标准差的倍数
_MARGIN_SIGMAS = 4.0
# 判决裕量下限（相对幅度中位数）
_MARGIN_FLOOR = 1e-6
# 每比特能量摆幅取该百分位作为 e
_TAG_ENERGY_PERCENTILE = 10.0


def energy_envelope(trace: SignalTrace, n: int) -> EnergyEnvelope:
    """滑动窗口平均能量 E(i) = (1/N)·Σ_{k=i}^{i+N-1} |x(k)|²。

    Args:
        trace: 接收轨迹
        n: 窗口长度 N

    Returns:
        EnergyEnvelope: 长度为 len(trace) - N + 1 的能量包络

    Raises:
        SegmentationError: N 非正或大于轨迹长度
    """
    if n < 1 or n > len(trace):
        raise SegmentationError(f"能量窗口 N={n} 非法（轨迹长度 {len(trace)}）")
    power = np.abs(trace.samples) ** 2
    values = sliding_window_view(power, n).mean(axis=1)
    return EnergyEnvelope(values=values, window_length=n)


def envelope_variance(envelope: EnergyEnvelope, n: int) -> np.ndarray:
    """能量包络的滑动总体方差 V(j) = Var[E(j) .. E(j+N-1)]。

    Raises:
        SegmentationError: N 非正或不小于包络长度
    """
    if n < 1 or n >= len(envelope):
        raise SegmentationError(f"方差窗口 N={n} 非法（包络长度 {len(envelope)}）")
    return sliding_window_view(envelope.values, n).var(axis=1)


def variance_thresholds(
    variance: np.ndarray, threshold: float
) -> Result[VarianceBounds, NoBackscatterError]:
    """寻找方差首末次超过门限的位置。

    η_3 是首个超过门限位置的前一个索引，η_4 是最后一个超过门限位置的后一个索引，
    两者都限制在 [0, len(V) - 1] 内：V(0) 已超过门限时 η_3 = 0，
    V 的末项仍超过门限时 η_4 = len(V) - 1。等于门限视为未超过。

    Args:
        variance: V(j)
        threshold: 门限 T

    Returns:
        Result[VarianceBounds, NoBackscatterError]: 从未超过门限时返回失败

    Raises:
        SegmentationError: V 为空或 T 非正
    """
    if variance.size == 0:
        raise SegmentationError("方差序列为空")
    if threshold <= 0:
        raise SegmentationError(f"门限必须为正: {threshold}")

    above = np.flatnonzero(variance > threshold)
    if above.size == 0:
        return Failure(NoBackscatterError("包络方差从未超过门限"))
    eta3 = max(int(above[0]) - 1, 0)
    eta4 = min(int(above[-1]) + 1, variance.size - 1)
    if eta3 >= eta4:
        return Failure(NoBackscatterError(f"方差超限区间退化: η_3={eta3}, η_4={eta4}"))
    return Success(VarianceBounds(eta3=eta3, eta4=eta4))


def fuse_segment(eta1: int, eta2: int, eta3: int, eta4: int) -> Segment:
    """η_s = (η_1+η_3)/2，η_e = (η_2+η_4)/2，四舍五入（半数向上）。

    Raises:
        SegmentationError: 边界交叉
    """
    if eta1 >= eta2 or eta3 >= eta4:
        raise SegmentationError(f"边界交叉: η_1={eta1}, η_2={eta2}, η_3={eta3}, η_4={eta4}")
    start = (eta1 + eta3 + 1) // 2
    end = (eta2 + eta4 + 1) // 2
    if start >= end:
        raise SegmentationError(f"融合后区间为空: ({start}, {end})")
    return Segment(start_index=start, end_index=end)


def slot_segments(segment: Segment, schedule: TagSchedule, trace_length: int) -> list[Segment]:
    """按时隙几何把分段切成各标签的子分段。

    融合分段的起点对齐首个时隙；第 p 个子分段为
    [η_s + p·(slot + guard), η_s + p·(slot + guard) + slot)，超出轨迹的部分被截断。
    返回顺序即 schedule.order 的位置顺序。

    Raises:
        SegmentationError: 某个子分段完全落在轨迹之外
    """
    offset = segment.start_index - schedule.start_sample
    parts = []
    for position in range(schedule.tag_count):
        start, stop = schedule.slot_bounds(position)
        start, stop = start + offset, min(stop + offset, trace_length)
        if start >= stop:
            raise SegmentationError(f"第 {position} 个标签时隙超出轨迹长度 {trace_length}")
        parts.append(Segment(start_index=start, end_index=stop))
    return parts


# ──── 反向散射解码 ────


def _moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """居中滑动平均，两端按边缘值延拓。"""
    left = window // 2
    padded = np.pad(values, (left, window - 1 - left), mode="edge")
    return sliding_window_view(padded, window).mean(axis=1)


def _half_midpoint(values: np.ndarray, period: int) -> np.ndarray:
    """每个采样处一个开关周期窗口内较低一半与较高一半均值的中点。"""
    left = period // 2
    half = period // 2
    padded = np.pad(values, (left, period - 1 - left), mode="edge")
    windows = np.partition(sliding_window_view(padded, period), half - 1, axis=1)
    lower = windows[:, :half].mean(axis=1)
    upper = windows[:, half:].mean(axis=1)
    return 0.5 * (lower + upper)


def _hold_undecided(high: np.ndarray, decidable: np.ndarray) -> np.ndarray:
    """不可判决的采样沿用前一个可判决采样的状态。"""
    index = np.where(decidable, np.arange(high.size), 0)
    np.maximum.accumulate(index, out=index)
    return high[index]


def _decision_margin(amplitude: np.ndarray, window: int) -> float:
    """估计平滑幅度的噪声水平并给出判决裕量。"""
    diffs = np.diff(amplitude)
    if diffs.size == 0:
        return _MARGIN_FLOOR
    mad = float(np.median(np.abs(diffs - np.median(diffs))))
    sigma_amplitude = 1.4826 * mad / np.sqrt(2.0)
    sigma_smoothed = sigma_amplitude / np.sqrt(window)
    floor = _MARGIN_FLOOR * max(float(np.median(amplitude)), 1e-12)
    return max(_MARGIN_SIGMAS * sigma_smoothed, floor)


def _longest_chain(mask: np.ndarray, max_gap: int) -> tuple[int, int] | None:
    """可判决采样中间隔不超过 max_gap 的最长链 [start, stop)。"""
    index = np.flatnonzero(mask)
    if index.size == 0:
        return None
    breaks = np.flatnonzero(np.diff(index) > max_gap + 1)
    starts = np.concatenate(([0], breaks + 1))
    stops = np.concatenate((breaks, [index.size - 1]))
    counts = stops - starts + 1
    best = int(np.argmax(counts))
    return int(index[starts[best]]), int(index[stops[best]]) + 1


def _runs(state: np.ndarray) -> list[tuple[int, int, bool]]:
    """游程编码：(start, stop, value)。"""
    change = np.flatnonzero(np.diff(state.astype(np.int8))) + 1
    edges = np.concatenate(([0], change, [state.size]))
    return [
        (int(a), int(b), bool(state[a])) for a, b in zip(edges[:-1], edges[1:], strict=True)
    ]


def _merge_short_runs(
    runs: list[tuple[int, int, bool]], min_length: int
) -> list[tuple[int, int, bool]]:
    """把短于 min_length 的游程并入前一个游程，再合并相邻同值游程。"""
    merged: list[tuple[int, int, bool]] = []
    for start, stop, value in runs:
        if merged and (stop - start < min_length or merged[-1][2] == value):
            prev_start, _, prev_value = merged[-1]
            merged[-1] = (prev_start, stop, prev_value)
        else:
            merged.append((start, stop, value))
    return merged


def _on_polarity(
    smoothed: np.ndarray, start: int, stop: int, spb: int
) -> tuple[bool, float | None]:
    """判断反射态对应幅度高于还是低于局部门限。

    Returns:
        (反射态取值, 区间外的空闲电平)；区间外样本不足时假定反射抬高幅度
    """
    outside = np.ones(smoothed.size, dtype=bool)
    outside[max(start - 2 * spb, 0) : stop + 2 * spb] = False
    if outside.sum() < spb:
        return True, None
    idle_level = float(np.median(smoothed[outside]))
    return bool(smoothed[start:stop].mean() > idle_level), idle_level


def _core_mean(values: np.ndarray, start: int, stop: int) -> float:
    """去掉首尾各 1/4 后的均值。"""
    quarter = (stop - start) // 4
    core = values[start + quarter : stop - quarter]
    return float(core.mean()) if core.size else float(values[start:stop].mean())


def _bit_energy_swing(
    power: np.ndarray,
    runs: list[tuple[int, int, bool]],
    offset: int,
    on_state: bool,
    idle_power: float,
) -> float:
    """每个反射比特相对相邻空闲比特的能量摆幅，取低百分位作为 e。"""
    swings = []
    for k, (start, stop, value) in enumerate(runs):
        if value != on_state:
            continue
        on_power = _core_mean(power, offset + start, offset + stop)
        neighbours = [
            _core_mean(power, offset + runs[j][0], offset + runs[j][1])
            for j in (k - 1, k + 1)
            if 0 <= j < len(runs) and runs[j][2] != on_state
        ]
        off_power = float(np.mean(neighbours)) if neighbours else idle_power
        swings.append(abs(on_power - off_power))
    if not swings:
        return 0.0
    return float(np.percentile(swings, _TAG_ENERGY_PERCENTILE))


def decode_backscatter(
    trace: SignalTrace, smoothing_window: int, bit_rate_bps: float = 1e4
) -> DecodeResult:
    """局部中点门限法解码反向散射比特。

    幅度先做 smoothing_window 点滑动平均；每个采样的门限取以它为中心、
    一个完整开关周期（2 个比特）窗口内较高一半与较低一半平滑幅度均值的中点。
    平滑幅度与门限之差超过噪声裕量的采样视为可判决，其余采样沿用前一个判决；
    间隔不超过 2 个比特周期的可判决采样构成连续检测区。

    Args:
        trace: 接收轨迹
        smoothing_window: 平滑窗口
        bit_rate_bps: 标签比特率

    Returns:
        DecodeResult: 未检测到时 bits 为空且 η_1 = η_2 = 0

    Raises:
        SegmentationError: 窗口不小于轨迹长度
    """
    length = len(trace)
    if smoothing_window < 1 or smoothing_window >= length:
        raise SegmentationError(f"平滑窗口 {smoothing_window} 非法（轨迹长度 {length}）")
    spb = samples_per_bit(trace.sample_rate_hz, bit_rate_bps)

    amplitude = trace.amplitude
    smoothed = _moving_average(amplitude, smoothing_window)
    deviation = smoothed - _half_midpoint(smoothed, 2 * spb)

    decidable = np.abs(deviation) > _decision_margin(amplitude, smoothing_window)
    chain = _longest_chain(decidable, max_gap=2 * spb)
    if chain is None:
        return DecodeResult()
    start, stop = chain

    on_state, idle_level = _on_polarity(smoothed, start, stop, spb)
    state = _hold_undecided(deviation[start:stop] > 0, decidable[start:stop])
    runs = _merge_short_runs(_runs(state), max(1, spb // 4))
    on_positions = [k for k, run in enumerate(runs) if run[2] == on_state]
    if not on_positions:
        return DecodeResult()
    first, last = on_positions[0], on_positions[-1]
    longest_on = max(runs[k][1] - runs[k][0] for k in on_positions)
    if longest_on < spb // 2:
        logger.debug(f"最长反射游程仅 {longest_on} 个采样点，视为噪声")
        return DecodeResult()

    selected = runs[first : last + 1]
    bits: list[int] = []
    edges: list[int] = []
    for run_start, run_stop, value in selected:
        count = max(1, int(round((run_stop - run_start) / spb)))
        bits.extend([1 if value == on_state else 0] * count)
        edges.append(start + run_start)
    edges.append(start + selected[-1][1])

    power = amplitude**2
    idle_power = idle_level**2 if idle_level is not None else float(np.median(power))
    tag_energy = _bit_energy_swing(power, runs, start, on_state, idle_power)

    return DecodeResult(
        bits=bits,
        detect_start=start + selected[0][0],
        detect_end=start + selected[-1][1],
        bit_edges=edges,
        tag_energy=tag_energy,
    )


class Segmenter:
    """分段服务：解码、能量方差检测与融合。

    方差索引 j 对应的窗口覆盖采样 [j, j + N_E + N_V - 1)；门限通常在约四分之一个
    窗口的能量变化进入后触发，据此把 η_3、η_4 映射回采样域。
    """

    def __init__(
        self,
        smoothing_window: int = 50,
        envelope_window: int = 50,
        variance_window: int = 50,
        threshold_scale: float = 0.125,
        bit_rate_bps: float = 1e4,
    ) -> None:
        """初始化分段服务。

        Args:
            smoothing_window: 解码平滑窗口
            envelope_window: 能量包络窗口 N_E
            variance_window: 方差窗口 N_V
            threshold_scale: 门限系数，T = (scale * e)^2
            bit_rate_bps: 标签比特率
        """
        self.smoothing_window = smoothing_window
        self.envelope_window = envelope_window
        self.variance_window = variance_window
        self.threshold_scale = threshold_scale
        self.bit_rate_bps = bit_rate_bps

    @classmethod
    def from_settings(cls, settings: Settings) -> "Segmenter":
        """由配置构造。"""
        return cls(
            smoothing_window=settings.smoothing_window,
            envelope_window=settings.envelope_window,
            variance_window=settings.variance_window,
            threshold_scale=settings.variance_threshold_scale,
            bit_rate_bps=settings.tag_bit_rate_bps,
        )

    def threshold_for(self, tag_energy: float) -> float:
        """由标签能量摆幅 e 计算方差门限。"""
        return (self.threshold_scale * tag_energy) ** 2

    def search_window(
        self, decoded: DecodeResult, trace: SignalTrace, variance_length: int
    ) -> tuple[int, int]:
        """方差门限的搜索范围 [lower, upper)。

        采样 s 影响的方差索引为 [s - (N_E + N_V - 2), s]；在解码区间对应的索引范围
        两侧各放宽一个开关周期。
        """
        spb = samples_per_bit(trace.sample_rate_hz, self.bit_rate_bps)
        span = self.envelope_window + self.variance_window - 2
        lower = max(decoded.detect_start - span - 2 * spb, 0)
        upper = min(decoded.detect_end + 2 * spb, variance_length)
        return lower, upper

    def variance_to_samples(self, bounds: VarianceBounds, trace_length: int) -> tuple[int, int]:
        """把方差索引 (η_3, η_4) 映射到采样域。"""
        lag = self.variance_window // 4
        start = bounds.eta3 + self.envelope_window + self.variance_window - 1 - lag
        end = bounds.eta4 + lag
        return min(max(start, 0), trace_length), min(max(end, 0), trace_length)

    def segment(self, trace: SignalTrace) -> Result[SegmentationResult, NoBackscatterError]:
        """对一条轨迹执行完整分段。

        Args:
            trace: 接收轨迹

        Returns:
            Result[SegmentationResult, NoBackscatterError]: 任一检测器未发现反向散射时失败
        """
        decoded = decode_backscatter(trace, self.smoothing_window, self.bit_rate_bps)
        if not decoded.detected:
            return Failure(NoBackscatterError("未解码出反向散射比特"))

        threshold = self.threshold_for(decoded.tag_energy)
        if threshold <= 0:
            return Failure(NoBackscatterError("标签能量摆幅为零"))

        envelope = energy_envelope(trace, self.envelope_window)
        variance = envelope_variance(envelope, self.variance_window)
        lower, upper = self.search_window(decoded, trace, variance.size)
        if lower >= upper:
            return Failure(NoBackscatterError("解码区间附近没有方差采样"))
        bounds_result = variance_thresholds(variance[lower:upper], threshold)
        if isinstance(bounds_result, Failure):
            return bounds_result
        local = bounds_result.unwrap()
        bounds = VarianceBounds(eta3=local.eta3 + lower, eta4=local.eta4 + lower)

        variance_start, variance_end = self.variance_to_samples(bounds, len(trace))
        if variance_start >= variance_end:
            return Failure(NoBackscatterError("方差检测区间为空"))

        try:
            segment = fuse_segment(
                decoded.detect_start, decoded.detect_end, variance_start, variance_end
            )
        except SegmentationError as e:
            return Failure(NoBackscatterError(e.message))

        logger.debug(
            f"分段完成: η_1={decoded.detect_start}, η_2={decoded.detect_end}, "
            f"η_3→{variance_start}, η_4→{variance_end}, 区间=({segment.start_index}, "
            f"{segment.end_index})"
        )
        return Success(
            SegmentationResult(
                decode=decoded,
                variance_bounds=bounds,
                variance_start=variance_start,
                variance_end=variance_end,
                threshold=threshold,
                segment=segment,
            )
        )
