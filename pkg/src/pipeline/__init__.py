"""认证流水线模块。"""

from src.pipeline.services.authentication_pipeline import (
    MESSAGE1,
    MESSAGE3,
    NO_BACKSCATTER,
    AuthenticationPipeline,
    pearson,
)

__all__ = ["AuthenticationPipeline", "MESSAGE1", "MESSAGE3", "NO_BACKSCATTER", "pearson"]
