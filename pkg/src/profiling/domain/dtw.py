"""动态时间规整（DTW）距离。

代价 w(i, j) = |X(i) - Y(j)|，步长 {(1,0), (0,1), (1,1)}，路径从 (0,0) 到 (m-1,n-1)。
采用精确动态规划，不加窗口约束。
"""

import numpy as np

from src.shared.errors import ProfileError


def _accumulate(cost: np.ndarray) -> np.ndarray:
    """按反对角线批量计算累积代价。

    Args:
        cost: 形状 (B, M, N) 的局部代价

    Returns:
        np.ndarray: 形状 (B, M+1, N+1) 的累积代价，D[:, i+1, j+1] 对应单元 (i, j)
    """
    batch, rows, cols = cost.shape
    acc = np.full((batch, rows + 1, cols + 1), np.inf)
    acc[:, 0, 0] = 0.0
    for diagonal in range(rows + cols - 1):
        i = np.arange(max(0, diagonal - cols + 1), min(diagonal, rows - 1) + 1)
        j = diagonal - i
        best = np.minimum(
            np.minimum(acc[:, i, j + 1], acc[:, i + 1, j]),
            acc[:, i, j],
        )
        acc[:, i + 1, j + 1] = cost[:, i, j] + best
    return acc


def dtw_distance(x: np.ndarray, y: np.ndarray) -> float:
    """两条实数序列的 DTW 距离。

    Raises:
        ProfileError: 任一序列为空
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size == 0 or y.size == 0:
        raise ProfileError("DTW 输入序列不能为空")
    cost = np.abs(x[:, None] - y[None, :])[None, :, :]
    return float(_accumulate(cost)[0, -1, -1])


def batched_dtw(xs: list[np.ndarray], ys: list[np.ndarray]) -> np.ndarray:
    """逐对计算 DTW 距离，所有对在同一次反对角线扫描中完成。

    不同长度的序列以 NaN 填充到相同形状；填充单元只可能出现在有效单元的右下方，
    不影响有效单元的累积代价。

    Args:
        xs: 第一组序列
        ys: 第二组序列，与 xs 等长

    Returns:
        np.ndarray: 每对的 DTW 距离
    """
    if len(xs) != len(ys):
        raise ProfileError("两组序列数量不一致")
    if not xs:
        return np.zeros(0)
    x_lengths = np.array([len(x) for x in xs])
    y_lengths = np.array([len(y) for y in ys])
    if x_lengths.min() == 0 or y_lengths.min() == 0:
        raise ProfileError("DTW 输入序列不能为空")

    padded_x = np.full((len(xs), x_lengths.max()), np.nan)
    padded_y = np.full((len(ys), y_lengths.max()), np.nan)
    for k, (x, y) in enumerate(zip(xs, ys, strict=True)):
        padded_x[k, : len(x)] = x
        padded_y[k, : len(y)] = y

    cost = np.abs(padded_x[:, :, None] - padded_y[:, None, :])
    cost[np.isnan(cost)] = np.inf
    acc = _accumulate(cost)
    return acc[np.arange(len(xs)), x_lengths, y_lengths]
