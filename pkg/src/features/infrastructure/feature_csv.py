"""特征集 CSV 导出。

每个特征一列；按块序列在尾部以 NaN 补齐到逐采样序列的长度（仅 CSV 中补齐）。
"""

from pathlib import Path

import numpy as np

from src.features.domain.models import FEATURE_NAMES, FeatureSet


def write_feature_csv(features: FeatureSet, path: Path) -> None:
    """写出特征 CSV。"""
    rows = features.original.size
    columns = []
    for name in FEATURE_NAMES:
        series = features.series(name)
        padded = np.full(rows, np.nan)
        padded[: series.size] = series
        columns.append(padded)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(
        path,
        np.column_stack(columns),
        delimiter=",",
        header=",".join(FEATURE_NAMES),
        comments="",
        fmt="%.17g",
    )


def read_feature_csv(path: Path, block: int = 50) -> FeatureSet:
    """读回特征 CSV，去掉 NaN 补齐。"""
    table = np.genfromtxt(path, delimiter=",", names=True)
    values = {name: np.asarray(table[name], dtype=np.float64) for name in FEATURE_NAMES}
    return FeatureSet(
        **{name: series[~np.isnan(series)] for name, series in values.items()},
        block=block,
    )
