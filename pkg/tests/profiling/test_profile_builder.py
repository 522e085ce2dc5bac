"""画像向量构建测试。"""

import numpy as np
import pytest

from src.channel.domain.models import SignalTrace, TagSchedule
from src.channel.services.presets import get_preset
from src.config import Settings
from src.features.services.extractor import extract_features
from src.harness.services.cohort import SessionFactory
from src.pipeline.services.authentication_pipeline import AuthenticationPipeline
from src.profiling.domain.models import PROFILE_LENGTH, ProfileVector, profile_columns
from src.profiling.infrastructure.profile_csv import read_profiles_csv, write_profiles_csv
from src.profiling.services.profile_builder import ProfileBuilder, build_profile
from src.segmentation.domain.models import Segment
from src.shared.errors import ProfileError


@pytest.fixture
def long_features():
    rng = np.random.default_rng(5)
    samples = 1.0 + 0.05 * (rng.standard_normal(6000) + 1j * rng.standard_normal(6000))
    trace = SignalTrace(samples=samples, sample_rate_hz=1e6)
    return extract_features(trace, Segment(start_index=0, end_index=6000))


@pytest.mark.unit
class TestBuildProfile:
    """测试画像布局与基本性质。"""

    def test_identical_features_give_zero_profile(self, long_features):
        """测试相同特征的画像长度为 488 且全为 0。"""
        profile = build_profile(long_features, long_features)

        assert PROFILE_LENGTH == 488
        assert len(profile) == 488
        assert np.all(profile.distances == 0.0)

    def test_entries_finite_and_non_negative(self, long_features):
        """测试不同特征的画像元素有限非负。"""
        rng = np.random.default_rng(6)
        other = extract_features(
            SignalTrace(
                samples=1.2 + 0.05 * rng.standard_normal(5000), sample_rate_hz=1e6
            ),
            Segment(start_index=0, end_index=5000),
        )

        profile = ProfileBuilder().build(long_features, other)

        assert np.all(np.isfinite(profile.distances))
        assert np.all(profile.distances >= 0)
        assert profile.distances.sum() > 0

    def test_custom_chunk_counts(self, long_features):
        """测试自定义分块数时的维度。"""
        builder = ProfileBuilder(original_chunks=10, blockwise_chunks=4)

        assert builder.dimension == 36
        assert len(builder.build(long_features, long_features)) == 36

    def test_too_short_for_chunks(self):
        """测试特征序列短于分块数时报错。"""
        trace = SignalTrace(samples=np.ones(1000, dtype=np.complex128), sample_rate_hz=1e6)
        short = extract_features(trace, Segment(start_index=0, end_index=1000))

        with pytest.raises(ProfileError):
            build_profile(short, short)

    def test_columns_follow_layout(self):
        """测试列名顺序与向量布局一致。"""
        columns = profile_columns()

        assert len(columns) == 488
        assert columns[0] == "original_000"
        assert columns[128] == "smoothed_000"
        assert columns[256] == "envelope_000"
        assert columns[-1] == "minimum_057"

    def test_profile_rejects_negative(self):
        """测试画像向量不接受负值。"""
        with pytest.raises(ValueError):
            ProfileVector(distances=np.array([0.1, -0.2]))


@pytest.mark.unit
class TestProfileCsv:
    """测试画像 CSV。"""

    def test_write_and_read(self, temp_dir):
        """测试表头与数据行。"""
        profiles = [ProfileVector(distances=np.full(488, float(k))) for k in range(3)]
        path = temp_dir / "profiles.csv"

        write_profiles_csv(profiles, path)

        assert path.read_text().splitlines()[0].split(",")[:2] == [
            "original_000",
            "original_001",
        ]
        restored = read_profiles_csv(path)
        assert [p.distances[0] for p in restored] == [0.0, 1.0, 2.0]

    def test_dimension_mismatch(self, temp_dir):
        """测试维度与列数不一致时报错。"""
        with pytest.raises(ProfileError):
            write_profiles_csv([ProfileVector(distances=np.ones(3))], temp_dir / "bad.csv")


@pytest.mark.slow
class TestProfileSeparation:
    """测试合法与攻击消息对的画像分离。"""

    def test_legitimate_closer_than_attacker(self):
        """测试无噪声时合法画像在绝大多数维度上小于攻击者画像。"""
        factory = SessionFactory(get_preset("laboratory"), tag_count=3, noise_sigma=0.0)
        pipeline = AuthenticationPipeline.from_settings(Settings())

        fractions = []
        for seed in range(5):
            link = factory.draw_link(seed)
            legitimate = factory.legitimate_pair(seed, link=link, tag_random=False)
            attack = factory.basic_attack_pair(seed, divergence=0.8, link=link, tag_random=False)
            near = pipeline.profile_pair(legitimate.message1, legitimate.message3).unwrap()
            far = pipeline.profile_pair(attack.message1, attack.message3).unwrap()
            fractions.append(np.mean(near.distances < far.distances))

        assert np.mean(fractions) >= 0.8

    def test_wrong_order_inflates_advanced_profile(self):
        """测试完美估计的高级攻击者在排列不符时画像范数显著增大。"""
        factory = SessionFactory(get_preset("laboratory"), tag_count=3, noise_sigma=0.0)
        pipeline = AuthenticationPipeline.from_settings(Settings())

        for seed in range(5):
            pair = factory.advanced_attack_pair(seed, tag_random=False)
            reference = pair.reference_schedule
            misread = TagSchedule(
                order=[1, 2, 0],
                slot_length_samples=reference.slot_length_samples,
                guard_samples=reference.guard_samples,
                start_sample=reference.start_sample,
            )
            matched = pipeline.profile_pair(pair.message1, pair.message3, reference, reference)
            swapped = pipeline.profile_pair(pair.message1, pair.message3, reference, misread)

            matched_norm = np.linalg.norm(matched.unwrap().distances)
            swapped_norm = np.linalg.norm(swapped.unwrap().distances)
            assert swapped_norm > 1.0
            assert swapped_norm > 10 * matched_norm
