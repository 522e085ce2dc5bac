"""SSCT 轨迹文件读写。

二进制格式（小端）：

    magic      4 字节  b"SSCT"
    version    uint32
    rate       float64  采样率（Hz）
    count      uint64   采样点数
    label      uint8    OriginLabel
    payload    count 对 float32 (I, Q)

调试用 CSV 格式为表头 ``index,i,q`` 的三列文本。
"""

import logging
import struct
from pathlib import Path

import numpy as np

from src.channel.domain.models import OriginLabel, SignalTrace
from src.shared.errors import TraceFormatError

logger = logging.getLogger(__name__)

MAGIC = b"SSCT"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIdQB")
_IQ_DTYPE = np.dtype("<f4")


class TraceCodec:
    """SSCT 二进制与 CSV 轨迹编解码器。"""

    def encode(self, trace: SignalTrace) -> bytes:
        """编码为 SSCT 字节串。"""
        header = _HEADER.pack(
            MAGIC, FORMAT_VERSION, float(trace.sample_rate_hz), len(trace), int(trace.origin_label)
        )
        iq = np.empty(2 * len(trace), dtype=_IQ_DTYPE)
        iq[0::2] = trace.samples.real
        iq[1::2] = trace.samples.imag
        return header + iq.tobytes()

    def decode(self, data: bytes, with_label: bool = True) -> SignalTrace:
        """解码 SSCT 字节串。

        Args:
            data: 文件内容
            with_label: 为 False 时丢弃来源标签（检测路径不得读取标签）

        Raises:
            TraceFormatError: 魔数、版本或长度不符
        """
        if len(data) < _HEADER.size:
            raise TraceFormatError("SSCT 文件头不完整")
        magic, version, rate, count, label = _HEADER.unpack_from(data, 0)
        if magic != MAGIC:
            raise TraceFormatError(f"魔数错误: {magic!r}")
        if version != FORMAT_VERSION:
            raise TraceFormatError(f"不支持的 SSCT 版本: {version}")
        if count == 0:
            raise TraceFormatError("SSCT 文件不含采样点")
        expected = _HEADER.size + 2 * count * _IQ_DTYPE.itemsize
        if len(data) != expected:
            raise TraceFormatError(f"SSCT 负载长度错误: 期望 {expected} 字节，实际 {len(data)}")
        try:
            origin = OriginLabel(label)
        except ValueError:
            raise TraceFormatError(f"未知来源标签: {label}")

        iq = np.frombuffer(data, dtype=_IQ_DTYPE, offset=_HEADER.size).astype(np.float64)
        samples = iq[0::2] + 1j * iq[1::2]
        return SignalTrace(
            samples=samples,
            sample_rate_hz=rate,
            origin_label=origin if with_label else OriginLabel.UNKNOWN,
        )

    def write(self, trace: SignalTrace, path: Path) -> None:
        """写入 SSCT 文件。"""
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.encode(trace))
        logger.debug(f"写入轨迹 {path}（{len(trace)} 个采样点）")

    def read(self, path: Path, with_label: bool = True) -> SignalTrace:
        """读取 SSCT 文件。"""
        try:
            data = path.read_bytes()
        except OSError as e:
            raise TraceFormatError(f"无法读取轨迹文件 {path}: {e}") from e
        return self.decode(data, with_label=with_label)

    def write_csv(self, trace: SignalTrace, path: Path) -> None:
        """写入调试用 CSV（index,i,q）。"""
        table = np.column_stack(
            [np.arange(len(trace)), trace.samples.real, trace.samples.imag]
        )
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(
            path,
            table,
            delimiter=",",
            header="index,i,q",
            comments="",
            fmt=["%d", "%.17g", "%.17g"],
        )

    def read_csv(self, path: Path, sample_rate_hz: float) -> SignalTrace:
        """读取调试用 CSV，来源标签为 UNKNOWN。"""
        try:
            table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        except (OSError, ValueError) as e:
            raise TraceFormatError(f"无法解析 CSV 轨迹 {path}: {e}")
        if table.shape[1] != 3:
            raise TraceFormatError("CSV 轨迹必须包含 index,i,q 三列")
        return SignalTrace(samples=table[:, 1] + 1j * table[:, 2], sample_rate_hz=sample_rate_hz)
