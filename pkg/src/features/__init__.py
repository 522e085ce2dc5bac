"""特征模块。

从分段中提取六条幅度特征序列。
"""

from src.features.domain.models import (
    BLOCKWISE_FEATURES,
    FEATURE_NAMES,
    SAMPLEWISE_FEATURES,
    FeatureSet,
)
from src.features.infrastructure.feature_csv import read_feature_csv, write_feature_csv
from src.features.services.extractor import FeatureExtractor, extract_features

__all__ = [
    "BLOCKWISE_FEATURES",
    "FEATURE_NAMES",
    "FeatureExtractor",
    "FeatureSet",
    "SAMPLEWISE_FEATURES",
    "extract_features",
    "read_feature_csv",
    "write_feature_csv",
]
