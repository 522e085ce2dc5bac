"""画像模块。

分块 DTW 距离构成的 488 维画像向量。
"""

from src.profiling.domain.dtw import batched_dtw, dtw_distance
from src.profiling.domain.models import PROFILE_LENGTH, ProfileVector, profile_columns
from src.profiling.infrastructure.profile_csv import read_profiles_csv, write_profiles_csv
from src.profiling.services.profile_builder import ProfileBuilder, build_profile

__all__ = [
    "PROFILE_LENGTH",
    "ProfileBuilder",
    "ProfileVector",
    "batched_dtw",
    "build_profile",
    "dtw_distance",
    "profile_columns",
    "read_profiles_csv",
    "write_profiles_csv",
]
