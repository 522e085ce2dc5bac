"""配置管理模块。

使用 Pydantic 加载和验证环境变量。
"""

from typing import Literal

from dotenv import load_dotenv
from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.channel.domain.physics import coherence_time_s, wavelength_m

# 加载 .env 文件
load_dotenv()


class Settings(BaseSettings):
    """应用配置。

    从环境变量加载配置，使用 Pydantic 进行验证。
    """

    # 信号仿真配置
    sample_rate_hz: float = Field(
        default=1e6, gt=0, description="接收机采样率（Hz）"
    )
    tag_bit_rate_bps: float = Field(
        default=1e4, gt=0, description="标签反射比特率（bps）"
    )
    carrier_frequency_hz: float = Field(
        default=900e6, gt=0, description="载波频率（Hz），用于计算波长与相干时间"
    )
    tag_count: int = Field(default=3, ge=1, le=8, description="部署的标签数量")
    message_samples: int = Field(
        default=8100, ge=1, description="单条挑战/应答消息的采样点数"
    )
    lead_samples: int = Field(
        default=1000, ge=0, description="首个标签时隙前的无反射采样点数"
    )
    guard_samples: int = Field(
        default=50, ge=0, description="相邻标签时隙之间的保护间隔"
    )
    noise_sigma: float = Field(
        default=0.05, ge=0, description="接收端复高斯噪声标准差"
    )

    # 分段配置
    smoothing_window: int = Field(default=50, ge=1, description="解码平滑窗口长度")
    envelope_window: int = Field(default=50, ge=1, description="能量包络窗口 N")
    variance_window: int = Field(default=50, ge=1, description="包络方差窗口 N")
    variance_threshold_scale: float = Field(
        default=0.125,
        gt=0,
        description="方差阈值系数，T = (scale * e)^2",
    )

    # 特征与画像配置
    feature_block: int = Field(default=50, ge=1, description="分块特征的块长度")
    original_chunks: int = Field(default=128, ge=1, description="原始/平滑序列分块数")
    blockwise_chunks: int = Field(default=58, ge=1, description="分块序列的 DTW 分块数")

    # 单类 SVM 配置
    svm_nu: float = Field(default=0.16, gt=0, le=1, description="默认 ν 参数")
    svm_gamma: float | None = Field(
        default=None, gt=0, description="高斯核带宽，为空时使用中位数启发式"
    )
    svm_tol: float = Field(default=1e-6, gt=0, description="KKT 收敛容差")
    svm_max_iter: int = Field(default=100_000, ge=1, description="SMO 最大迭代次数")
    training_size: int = Field(default=577, ge=1, description="默认训练画像数量")

    # 防御配置
    coherence_budget_s: float = Field(
        default=0.1, gt=0, description="挑战-应答会话的相干时间预算（秒）"
    )
    environment_speed_mps: float = Field(
        default=0.5, gt=0, description="环境中物体的典型移动速度（m/s），决定信道相干时间"
    )
    auth_attempts: int = Field(default=5, ge=1, description="重复认证投票次数")
    correlation_threshold: float = Field(
        default=0.6789, ge=-1, le=1, description="相关系数基线的判决阈值"
    )

    # 实验配置
    master_seed: int = Field(default=20240601, ge=0, description="实验主随机种子")
    experiment_workers: int = Field(default=1, ge=1, description="并行重复实验的进程数")
    output_dir: str = Field(default="output", description="实验输出目录")

    # 日志配置
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO",
        description="日志级别",
        validate_default=True,  # 确保默认值也经过验证
    )

    # 监控配置
    prometheus_enabled: bool = Field(
        default=False, description="是否启用 Prometheus 指标采集"
    )
    metrics_textfile: str | None = Field(
        default=None, description="Prometheus 指标文本文件输出路径"
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("log_level", mode="before")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """验证并标准化日志级别。"""
        if isinstance(v, str):
            return v.upper()
        return v

    @model_validator(mode="after")
    def validate_bit_rate(self) -> "Settings":
        """标签比特率必须低于奈奎斯特频率。"""
        if self.tag_bit_rate_bps >= self.sample_rate_hz / 2:
            raise ValueError("tag_bit_rate_bps 必须小于 sample_rate_hz / 2")
        return self

    @model_validator(mode="after")
    def validate_coherence_budget(self) -> "Settings":
        """会话预算不得超过由载波波长与环境移动速度给出的相干时间。"""
        limit = coherence_time_s(
            wavelength_m(self.carrier_frequency_hz), self.environment_speed_mps
        )
        if self.coherence_budget_s > limit:
            raise ValueError(
                f"coherence_budget_s={self.coherence_budget_s} 超过信道相干时间 {limit:.4f}s"
            )
        return self


# 全局缓存，用于测试时清除
_settings_cache: Settings | None = None


def get_settings() -> Settings:
    """获取配置单例。

    使用全局缓存确保配置只加载一次。

    Returns:
        Settings: 配置实例
    """
    global _settings_cache
    if _settings_cache is None:
        _settings_cache = Settings()
    return _settings_cache


def clear_settings_cache() -> None:
    """清除配置缓存。

    主要用于测试场景。
    """
    global _settings_cache
    _settings_cache = None
