"""传播物理量与标签波形。"""

import math

import numpy as np

SPEED_OF_LIGHT_MPS = 299_792_458.0


def coherence_time_s(wavelength_m: float, velocity_mps: float) -> float:
    """信道相干时间 T = 9λ / (16πv)。

    Args:
        wavelength_m: 载波波长（米）
        velocity_mps: 环境中物体的移动速度（米/秒）

    Returns:
        float: 相干时间（秒）

    Raises:
        ValueError: 任一输入非正
    """
    if wavelength_m <= 0 or velocity_mps <= 0:
        raise ValueError("波长与速度必须为正")
    return 9.0 * wavelength_m / (16.0 * math.pi * velocity_mps)


def wavelength_m(carrier_frequency_hz: float) -> float:
    """由载波频率计算波长。"""
    if carrier_frequency_hz <= 0:
        raise ValueError("载波频率必须为正")
    return SPEED_OF_LIGHT_MPS / carrier_frequency_hz


def samples_per_bit(sample_rate_hz: float, bit_rate_bps: float) -> int:
    """每个标签比特对应的采样点数。"""
    if bit_rate_bps >= sample_rate_hz / 2:
        raise ValueError("标签比特率必须低于采样率的一半")
    return int(round(sample_rate_hz / bit_rate_bps))


def tag_waveform(length: int, spb: int) -> np.ndarray:
    """标签开关波形 S_b(i)。

    时隙内以 1 开始、按比特率交替 1/0 的 50% 占空比方波。

    Args:
        length: 时隙长度（采样点）
        spb: 每比特采样点数

    Returns:
        np.ndarray: 取值 {0, 1} 的浮点数组
    """
    bit_index = np.arange(length) // spb
    return (bit_index % 2 == 0).astype(np.float64)
