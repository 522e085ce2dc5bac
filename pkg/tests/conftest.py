"""Pytest 配置文件。

提供测试 Fixtures 和配置。
"""

import os
import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest
from returns.result import Success

from src.channel.domain.models import ChannelSpec, PathSpec, SignalTrace, TagConfig, TagSchedule
from src.channel.services.presets import get_preset
from src.channel.services.simulator import default_schedule
from src.config import Settings, clear_settings_cache, get_settings
from src.detection.domain.models import OcSvmModel
from src.detection.services.ocsvm import OneClassSvmTrainer
from src.harness.services.cohort import SessionFactory
from src.pipeline.services.authentication_pipeline import AuthenticationPipeline

# 训练小模型用的合法画像数量
TRAINING_PAIRS = 40
# 校准模型的训练规模与 ν
CALIBRATED_PAIRS = 300
CALIBRATED_NU = 0.02


@pytest.fixture(autouse=True)
def reset_env_before_each_test():
    """在每个测试前后重置环境变量与配置缓存。

    这确保测试不依赖本地 .env 文件中的值。
    """
    original_env = os.environ.copy()
    clear_settings_cache()

    yield

    os.environ.clear()
    os.environ.update(original_env)
    clear_settings_cache()


@pytest.fixture(scope="function")
def test_settings(monkeypatch):
    """测试配置 Fixture。

    提供测试用的配置值。
    """
    monkeypatch.setenv("LOG_LEVEL", "WARNING")  # 测试时减少日志输出
    monkeypatch.setenv("PROMETHEUS_ENABLED", "false")
    clear_settings_cache()

    yield get_settings()

    clear_settings_cache()


@pytest.fixture(scope="function")
def temp_dir():
    """临时目录 Fixture。

    创建一个临时目录，测试后自动删除。
    """
    path = tempfile.mkdtemp()
    try:
        yield Path(path)
    finally:
        shutil.rmtree(path, ignore_errors=True)


# ──── 信道 Fixtures ────


@pytest.fixture
def three_tags() -> TagConfig:
    """三个幅度互不相同的标签。"""
    return TagConfig(reflection_coefficients=[0.3 + 0j, 0.2 + 0.05j, 0.12 - 0.02j])


@pytest.fixture
def direct_channel() -> ChannelSpec:
    """只有直射路径、无噪声的信道。"""
    return ChannelSpec(paths=[PathSpec(gain=1.0 + 0j, delay_samples=0)])


@pytest.fixture
def echo_channel() -> ChannelSpec:
    """直射路径加两条回波。"""
    return ChannelSpec(
        paths=[
            PathSpec(gain=1.0 + 0j, delay_samples=0),
            PathSpec(gain=0.2 + 0.1j, delay_samples=3),
            PathSpec(gain=-0.1 + 0.05j, delay_samples=7),
        ]
    )


@pytest.fixture
def reference_schedule() -> TagSchedule:
    """默认消息长度下的三标签固定顺序调度。"""
    return default_schedule(3, 8100, 1000, 50, 100)


@pytest.fixture
def constant_source() -> SignalTrace:
    """恒包络源信号。"""
    return SignalTrace(samples=np.full(8100, 1.0 + 0j), sample_rate_hz=1e6)


# ──── 会话与模型 Fixtures ────


@pytest.fixture(scope="session")
def session_factory() -> SessionFactory:
    """实验室环境、三标签的消息对生成器。"""
    return SessionFactory(get_preset("laboratory"), tag_count=3)


@pytest.fixture(scope="session")
def pipeline() -> AuthenticationPipeline:
    """默认参数的认证流水线。"""
    return AuthenticationPipeline.from_settings(Settings())


def legitimate_profile_matrix(
    factory: SessionFactory, pipeline: AuthenticationPipeline, seeds: range
) -> np.ndarray:
    """由合法消息对构建画像矩阵，跳过未检测到反射的消息对。"""
    rows = []
    for seed in seeds:
        pair = factory.legitimate_pair(seed)
        result = pipeline.profile_pair(
            pair.message1, pair.message3, pair.reference_schedule, pair.recorded_schedule
        )
        if isinstance(result, Success):
            rows.append(result.unwrap().distances)
    return np.vstack(rows)


@pytest.fixture(scope="session")
def legitimate_profiles(session_factory, pipeline) -> np.ndarray:
    """由合法消息对构建的训练画像矩阵。"""
    return legitimate_profile_matrix(session_factory, pipeline, range(TRAINING_PAIRS))


@pytest.fixture(scope="session")
def trained_model(legitimate_profiles) -> OcSvmModel:
    """在合法画像上训练的小模型。"""
    return OneClassSvmTrainer().train(legitimate_profiles, nu=0.16)


@pytest.fixture(scope="session")
def calibrated_model(session_factory, pipeline) -> OcSvmModel:
    """默认规模附近训练、取小 ν 的三标签模型。"""
    profiles = legitimate_profile_matrix(
        session_factory, pipeline, range(10_000, 10_000 + CALIBRATED_PAIRS)
    )
    return OneClassSvmTrainer().train(profiles, nu=CALIBRATED_NU)


@pytest.fixture(scope="session")
def five_tag_factory() -> SessionFactory:
    """实验室环境、五标签的消息对生成器。"""
    return SessionFactory(get_preset("laboratory"), tag_count=5)


@pytest.fixture(scope="session")
def five_tag_model(five_tag_factory, pipeline) -> OcSvmModel:
    """五标签部署下训练的模型。"""
    profiles = legitimate_profile_matrix(five_tag_factory, pipeline, range(20_000, 20_150))
    return OneClassSvmTrainer().train(profiles, nu=0.05)
