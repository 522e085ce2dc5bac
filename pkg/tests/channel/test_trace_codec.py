"""SSCT 轨迹编解码测试。"""

import struct

import numpy as np
import pytest

from src.channel.domain.models import OriginLabel, SignalTrace
from src.channel.infrastructure.trace_codec import MAGIC, TraceCodec
from src.shared.errors import TraceFormatError

pytestmark = pytest.mark.unit

# magic(4) + version(4) + rate(8) + count(8)
_LABEL_OFFSET = 24


@pytest.fixture
def codec() -> TraceCodec:
    return TraceCodec()


@pytest.fixture
def trace() -> SignalTrace:
    rng = np.random.default_rng(0)
    samples = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    return SignalTrace(samples=samples, sample_rate_hz=1e6, origin_label=OriginLabel.BASIC_ATTACKER)


class TestTraceCodec:
    """测试 SSCT 二进制格式。"""

    def test_header_layout(self, codec, trace):
        """测试文件头字段与负载长度。"""
        data = codec.encode(trace)

        assert data[:4] == MAGIC
        assert struct.unpack_from("<I", data, 4)[0] == 1
        assert struct.unpack_from("<d", data, 8)[0] == 1e6
        assert struct.unpack_from("<Q", data, 16)[0] == 64
        assert data[_LABEL_OFFSET] == int(OriginLabel.BASIC_ATTACKER)
        assert len(data) == 25 + 64 * 8

    def test_decode_restores_samples(self, codec, trace):
        """测试解码得到 float32 精度的采样与来源标签。"""
        decoded = codec.decode(codec.encode(trace))

        assert decoded.sample_rate_hz == 1e6
        assert decoded.origin_label == OriginLabel.BASIC_ATTACKER
        assert np.allclose(decoded.samples, trace.samples, atol=1e-6)

    def test_decode_without_label(self, codec, trace):
        """测试检测路径读取时丢弃来源标签。"""
        decoded = codec.decode(codec.encode(trace), with_label=False)

        assert decoded.origin_label == OriginLabel.UNKNOWN

    def test_bad_magic(self, codec, trace):
        """测试魔数错误。"""
        data = b"XXXX" + codec.encode(trace)[4:]

        with pytest.raises(TraceFormatError):
            codec.decode(data)

    def test_unsupported_version(self, codec, trace):
        """测试不支持的版本号。"""
        data = bytearray(codec.encode(trace))
        data[4:8] = struct.pack("<I", 2)

        with pytest.raises(TraceFormatError):
            codec.decode(bytes(data))

    def test_truncated_payload(self, codec, trace):
        """测试负载被截断。"""
        with pytest.raises(TraceFormatError):
            codec.decode(codec.encode(trace)[:-1])

    def test_truncated_header(self, codec):
        """测试文件头不完整。"""
        with pytest.raises(TraceFormatError):
            codec.decode(MAGIC)

    def test_unknown_label(self, codec, trace):
        """测试未知来源标签。"""
        data = bytearray(codec.encode(trace))
        data[_LABEL_OFFSET] = 9

        with pytest.raises(TraceFormatError):
            codec.decode(bytes(data))

    def test_missing_file(self, codec, temp_dir):
        """测试文件不存在时报格式错误。"""
        with pytest.raises(TraceFormatError):
            codec.read(temp_dir / "missing.ssct")

    def test_csv_export(self, codec, trace, temp_dir):
        """测试调试 CSV 的表头与读回结果。"""
        path = temp_dir / "trace.csv"
        codec.write_csv(trace, path)

        assert path.read_text().splitlines()[0] == "index,i,q"
        restored = codec.read_csv(path, sample_rate_hz=1e6)
        assert restored.origin_label == OriginLabel.UNKNOWN
        assert np.allclose(restored.samples, trace.samples)
