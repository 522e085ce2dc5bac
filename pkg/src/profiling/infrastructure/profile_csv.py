"""画像向量 CSV 读写。

表头为 profile_columns() 给出的列名，每行一个画像向量。
"""

from pathlib import Path

import numpy as np

from src.profiling.domain.models import ProfileVector, profile_columns
from src.shared.errors import ProfileError


def write_profiles_csv(
    profiles: list[ProfileVector], path: Path, columns: list[str] | None = None
) -> None:
    """写出画像 CSV。"""
    if not profiles:
        raise ProfileError("没有可写出的画像")
    header = columns or profile_columns()
    matrix = np.vstack([p.distances for p in profiles])
    if matrix.shape[1] != len(header):
        raise ProfileError(f"画像维度 {matrix.shape[1]} 与列数 {len(header)} 不一致")
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, matrix, delimiter=",", header=",".join(header), comments="", fmt="%.17g")


def read_profiles_csv(path: Path) -> list[ProfileVector]:
    """读取画像 CSV。"""
    try:
        matrix = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as e:
        raise ProfileError(f"无法读取画像文件 {path}: {e}")
    return [ProfileVector(distances=row) for row in matrix]
