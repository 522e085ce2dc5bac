"""特征提取测试。"""

import numpy as np
import pytest
from pydantic import ValidationError

from src.channel.domain.models import SignalTrace
from src.features.domain.models import FEATURE_NAMES, FeatureSet
from src.features.infrastructure.feature_csv import read_feature_csv, write_feature_csv
from src.features.services.extractor import FeatureExtractor, extract_features
from src.segmentation.domain.models import Segment
from src.shared.errors import FeatureError

pytestmark = pytest.mark.unit


@pytest.fixture
def noisy_trace() -> SignalTrace:
    rng = np.random.default_rng(4)
    samples = 1.0 + 0.1 * (rng.standard_normal(1000) + 1j * rng.standard_normal(1000))
    return SignalTrace(samples=samples, sample_rate_hz=1e6)


class TestExtractFeatures:
    """测试六条特征序列。"""

    def test_lengths(self, noisy_trace):
        """测试逐采样与按块序列的长度，尾部不足一块被丢弃。"""
        features = extract_features(noisy_trace, Segment(start_index=100, end_index=375), block=50)

        assert features.original.size == 275
        assert features.smoothed.size == 275
        assert features.block_count == 5
        for name in FEATURE_NAMES[2:]:
            assert features.series(name).size == 5

    def test_block_statistics(self, noisy_trace):
        """测试按块统计量与直接计算一致。"""
        features = extract_features(noisy_trace, Segment(start_index=0, end_index=200), block=50)
        amplitude = np.abs(noisy_trace.samples[:200])

        for k in range(4):
            block = amplitude[50 * k : 50 * (k + 1)]
            assert features.envelope[k] == pytest.approx(np.mean(block**2))
            assert features.variance[k] == pytest.approx(np.var(block))
            assert features.maximum[k] == pytest.approx(block.max())
            assert features.minimum[k] == pytest.approx(block.min())

    def test_uses_amplitude_only(self, noisy_trace):
        """测试整体相位旋转不改变特征。"""
        rotated = SignalTrace(
            samples=noisy_trace.samples * np.exp(1j * 1.234), sample_rate_hz=1e6
        )
        segment = Segment(start_index=0, end_index=500)

        original = extract_features(noisy_trace, segment)
        turned = extract_features(rotated, segment)

        for name in FEATURE_NAMES:
            assert np.allclose(original.series(name), turned.series(name))

    def test_invariants_hold(self, noisy_trace):
        """测试非负、最大值不小于最小值。"""
        features = FeatureExtractor().extract(noisy_trace, Segment(start_index=0, end_index=1000))

        assert np.all(features.envelope >= 0)
        assert np.all(features.variance >= 0)
        assert np.all(features.maximum >= features.minimum)

    def test_constant_trace_smoothing(self):
        """测试恒定幅度的平滑序列不变。"""
        trace = SignalTrace(samples=np.full(300, 0.5 + 0.5j), sample_rate_hz=1e6)

        features = extract_features(trace, Segment(start_index=0, end_index=300))

        assert np.allclose(features.smoothed, abs(0.5 + 0.5j))
        assert np.allclose(features.variance, 0.0)

    def test_segment_beyond_trace(self, noisy_trace):
        """测试分段越界时报错。"""
        with pytest.raises(FeatureError):
            extract_features(noisy_trace, Segment(start_index=900, end_index=1100))

    def test_segment_shorter_than_block(self, noisy_trace):
        """测试分段短于一个块时报错。"""
        with pytest.raises(FeatureError):
            extract_features(noisy_trace, Segment(start_index=0, end_index=49), block=50)


class TestFeatureSet:
    """测试特征集合校验。"""

    def test_blockwise_length_mismatch(self):
        """测试按块序列长度与块数不一致时报错。"""
        with pytest.raises(ValidationError):
            FeatureSet(
                original=np.ones(100),
                smoothed=np.ones(100),
                envelope=np.ones(3),
                variance=np.zeros(2),
                maximum=np.ones(2),
                minimum=np.ones(2),
                block=50,
            )

    def test_maximum_below_minimum(self):
        """测试最大值小于最小值时报错。"""
        with pytest.raises(ValidationError):
            FeatureSet(
                original=np.ones(50),
                smoothed=np.ones(50),
                envelope=np.ones(1),
                variance=np.zeros(1),
                maximum=np.zeros(1),
                minimum=np.ones(1),
                block=50,
            )

    def test_unknown_series(self, noisy_trace):
        """测试按未知名称取序列时报错。"""
        features = extract_features(noisy_trace, Segment(start_index=0, end_index=100))

        with pytest.raises(KeyError):
            features.series("phase")

    def test_csv_export(self, noisy_trace, temp_dir):
        """测试 CSV 表头顺序与 NaN 补齐后的读回。"""
        features = extract_features(noisy_trace, Segment(start_index=0, end_index=260))
        path = temp_dir / "features.csv"

        write_feature_csv(features, path)

        assert path.read_text().splitlines()[0] == ",".join(FEATURE_NAMES)
        restored = read_feature_csv(path)
        assert restored.block_count == 5
        assert np.allclose(restored.original, features.original)
