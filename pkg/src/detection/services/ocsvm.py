"""高斯核单类 SVM。

对偶问题：

    min  1/2 Σ α_i α_j k(x_i, x_j)
    s.t. 0 <= α_i <= 1/(ν·l),  Σ α_i = 1

用带二阶工作集选择（WSS3）的 SMO 求解，ρ 取自由支持向量（0 < α < 上界）上核和的中位数。
判决函数 f(x) = Σ α_i k(x_i, x) - ρ，f(x) >= 0 判为合法。
"""

import logging
import math
from collections.abc import Sequence

import numpy as np
from sklearn.metrics.pairwise import euclidean_distances, rbf_kernel

from src.detection.domain.models import Decision, DecisionLabel, NuSelection, OcSvmModel
from src.profiling.domain.models import ProfileVector
from src.shared.errors import ProfileError, TrainingError

logger = logging.getLogger(__name__)

# 二阶步长分母的下限，避免核矩阵退化时除零
_TAU = 1e-12
# 判断 α 是否处于盒约束边界的相对容差
_BOUND_EPS = 1e-9

ProfileInput = Sequence[ProfileVector] | np.ndarray


def as_matrix(profiles: ProfileInput) -> np.ndarray:
    """把画像列表或矩阵统一为 (n, d) float64 矩阵。

    Raises:
        ProfileError: 维度不一致
    """
    if isinstance(profiles, np.ndarray):
        matrix = np.asarray(profiles, dtype=np.float64)
        if matrix.ndim == 1:
            matrix = matrix[None, :]
        return matrix
    if not profiles:
        return np.empty((0, 0))
    dims = {len(p) for p in profiles}
    if len(dims) != 1:
        raise ProfileError(f"画像维度不一致: {sorted(dims)}")
    return np.vstack([p.distances for p in profiles])


def gaussian_kernel(
    x: ProfileVector | np.ndarray, y: ProfileVector | np.ndarray, gamma: float
) -> float:
    """k(x, y) = exp(-γ‖x - y‖²)。

    Raises:
        ProfileError: 维度不一致
    """
    a = x.distances if isinstance(x, ProfileVector) else np.asarray(x, dtype=np.float64)
    b = y.distances if isinstance(y, ProfileVector) else np.asarray(y, dtype=np.float64)
    if a.shape != b.shape:
        raise ProfileError(f"核函数输入维度不一致: {a.shape} vs {b.shape}")
    if gamma <= 0:
        raise ValueError(f"gamma 必须为正: {gamma}")
    diff = a - b
    return float(np.exp(-gamma * float(diff @ diff)))


def median_gamma(profiles: ProfileInput) -> float:
    """中位数启发式：γ = 1 / 训练画像两两平方距离的中位数。

    所有画像完全相同时返回 1.0。
    """
    matrix = as_matrix(profiles)
    if matrix.shape[0] < 2:
        return 1.0
    squared = euclidean_distances(matrix, squared=True)
    upper = squared[np.triu_indices(matrix.shape[0], k=1)]
    median = float(np.median(upper))
    if median <= 0 or not math.isfinite(median):
        return 1.0
    return 1.0 / median


def kernel_sums(model: OcSvmModel, profiles: ProfileInput) -> np.ndarray:
    """Σ α_i k(x_i, x)，对每个输入画像。"""
    matrix = as_matrix(profiles)
    if matrix.shape[1] != model.dimension:
        raise ProfileError(f"画像维度 {matrix.shape[1]} 与模型维度 {model.dimension} 不一致")
    return rbf_kernel(matrix, model.support_vectors, gamma=model.gamma) @ model.alphas


def decide_batch(model: OcSvmModel, profiles: ProfileInput) -> list[Decision]:
    """批量判决。"""
    scores = kernel_sums(model, profiles) - model.rho
    return [
        Decision(
            label=DecisionLabel.LEGITIMATE if s >= 0 else DecisionLabel.ATTACKER,
            score=float(s),
        )
        for s in scores
    ]


def decide(model: OcSvmModel, x: ProfileVector | np.ndarray) -> Decision:
    """单个画像判决。

    Raises:
        ProfileError: 维度与模型不一致
    """
    vector = x.distances if isinstance(x, ProfileVector) else np.asarray(x, dtype=np.float64)
    if vector.ndim != 1:
        raise ProfileError("判决输入必须是一维画像")
    return decide_batch(model, vector[None, :])[0]


def dual_objective(kernel: np.ndarray, alphas: np.ndarray) -> float:
    """1/2 αᵀKα。"""
    return 0.5 * float(alphas @ kernel @ alphas)


class OneClassSvmTrainer:
    """单类 SVM 训练器（SMO + WSS3）。

    Attributes:
        tol: KKT 违反量容差
        max_iter: 最大迭代次数
    """

    def __init__(self, tol: float = 1e-6, max_iter: int = 100_000):
        if tol <= 0:
            raise ValueError(f"tol 必须为正: {tol}")
        self.tol = tol
        self.max_iter = max_iter

    @classmethod
    def from_settings(cls, settings) -> "OneClassSvmTrainer":
        return cls(tol=settings.svm_tol, max_iter=settings.svm_max_iter)

    def solve(self, kernel: np.ndarray, upper: float) -> tuple[np.ndarray, float]:
        """在给定核矩阵上求解对偶问题。

        Args:
            kernel: (l, l) 核矩阵
            upper: 盒约束上界 1/(ν·l)

        Returns:
            (alphas, residual): 对偶解与最终 KKT 违反量
        """
        size = kernel.shape[0]
        # ν <= 1 时 1/l <= 1/(ν·l)，均匀初值总是可行
        alphas = np.full(size, 1.0 / size)
        grad = kernel @ alphas
        diag = np.diag(kernel).copy()
        eps = upper * _BOUND_EPS
        residual = math.inf

        for iteration in range(self.max_iter):
            can_up = alphas < upper - eps
            can_down = alphas > eps
            up_scores = np.where(can_up, -grad, -np.inf)
            i = int(np.argmax(up_scores))
            g_max = up_scores[i]
            g_min = float(np.min(np.where(can_down, -grad, np.inf)))
            residual = g_max - g_min
            if residual < self.tol:
                break

            gains = grad - grad[i]
            curvature = diag[i] + diag - 2.0 * kernel[i]
            curvature = np.where(curvature > 0, curvature, _TAU)
            candidates = can_down & (gains > 0)
            j = int(np.argmin(np.where(candidates, -(gains * gains) / curvature, np.inf)))

            step = min(gains[j] / curvature[j], upper - alphas[i], alphas[j])
            alphas[i] += step
            alphas[j] -= step
            grad += step * (kernel[:, i] - kernel[:, j])
        else:
            logger.warning(f"SMO 达到最大迭代次数 {self.max_iter}，KKT 违反量 {residual:.3e}")

        return alphas, max(float(residual), 0.0)

    def train(
        self,
        profiles: ProfileInput,
        nu: float,
        gamma: float | None = None,
    ) -> OcSvmModel:
        """只用合法画像训练模型。

        Args:
            profiles: 训练画像
            nu: ν ∈ (0, 1]
            gamma: 核带宽，None 时用中位数启发式

        Returns:
            OcSvmModel: 训练好的模型

        Raises:
            TrainingError: ν·l < 1、画像含非有限值或参数非法
        """
        matrix = as_matrix(profiles)
        size = matrix.shape[0]
        if size == 0:
            raise TrainingError("训练集为空")
        if not 0 < nu <= 1:
            raise TrainingError(f"ν 必须位于 (0, 1]: {nu}")
        if nu * size < 1:
            raise TrainingError(
                f"ν·l = {nu * size:.3f} < 1，盒约束不可满足"
                f"（至少需要 {math.ceil(1 / nu)} 个画像）"
            )
        if not np.all(np.isfinite(matrix)):
            raise TrainingError("训练画像含非有限值")
        if gamma is None:
            gamma = median_gamma(matrix)
        if gamma <= 0:
            raise TrainingError(f"gamma 必须为正: {gamma}")

        kernel = rbf_kernel(matrix, gamma=gamma)
        upper = 1.0 / (nu * size)
        alphas, residual = self.solve(kernel, upper)

        eps = upper * _BOUND_EPS
        scores = kernel @ alphas
        free = (alphas > eps) & (alphas < upper - eps)
        if np.any(free):
            # 自由支持向量的核和在 KKT 容差内相等，取最小者使其全部落在接受侧
            rho = float(scores[free].min())
        else:
            at_upper = alphas >= upper - eps
            at_zero = alphas <= eps
            lower_bound = float(scores[at_upper].max()) if np.any(at_upper) else None
            upper_bound = float(scores[at_zero].min()) if np.any(at_zero) else None
            if lower_bound is not None and upper_bound is not None:
                rho = 0.5 * (lower_bound + upper_bound)
            else:
                rho = lower_bound if lower_bound is not None else float(upper_bound)

        keep = alphas > self.tol
        kept = alphas[keep]
        kept = kept / kept.sum()
        logger.info(
            f"单类 SVM 训练完成: l={size}, ν={nu}, γ={gamma:.4g}, "
            f"支持向量 {int(keep.sum())} 个, ρ={rho:.6f}, KKT 违反量 {residual:.2e}"
        )
        return OcSvmModel(
            support_vectors=matrix[keep],
            alphas=kept,
            rho=rho,
            gamma=gamma,
            nu=nu,
            training_size=size,
        )


def select_nu(
    train_pos: ProfileInput,
    val_pos: ProfileInput,
    val_neg: ProfileInput,
    grid: Sequence[float],
    trainer: OneClassSvmTrainer | None = None,
    gamma: float | None = None,
    target_tp: float | None = None,
) -> NuSelection:
    """在网格上选择 ν。

    有攻击者验证样本时取 TP 率与攻击检测率最接近的交点；
    val_neg 为空且给出 target_tp 时取 TP 率最接近目标的 ν。平局取较小 ν。

    Raises:
        TrainingError: 输入为空或模式不明确
    """
    train_matrix = as_matrix(train_pos)
    pos_matrix = as_matrix(val_pos)
    neg_matrix = as_matrix(val_neg)
    if train_matrix.shape[0] == 0 or pos_matrix.shape[0] == 0 or not grid:
        raise TrainingError("ν 选择需要非空训练集、合法验证集与网格")
    if neg_matrix.shape[0] == 0 and target_tp is None:
        raise TrainingError("攻击者验证集为空时必须给出目标 TP 率")

    trainer = trainer or OneClassSvmTrainer()
    if gamma is None:
        gamma = median_gamma(train_matrix)

    best: NuSelection | None = None
    best_gap = math.inf
    for nu in sorted(grid):
        model = trainer.train(train_matrix, nu=nu, gamma=gamma)
        tp_rate = float(np.mean(kernel_sums(model, pos_matrix) - model.rho >= 0))
        if neg_matrix.shape[0]:
            fp_rate = float(np.mean(kernel_sums(model, neg_matrix) - model.rho >= 0))
        else:
            fp_rate = 0.0
        if target_tp is not None and neg_matrix.shape[0] == 0:
            gap = abs(tp_rate - target_tp)
        else:
            gap = abs(tp_rate - (1.0 - fp_rate))
        logger.debug(f"ν={nu}: TP={tp_rate:.3f}, FP={fp_rate:.3f}, 差距={gap:.3f}")
        if gap < best_gap:
            best_gap = gap
            best = NuSelection(nu=nu, tp_rate=tp_rate, fp_rate=fp_rate)

    assert best is not None
    logger.info(f"选定 ν={best.nu}（TP={best.tp_rate:.3f}, FP={best.fp_rate:.3f}）")
    return best
