"""检测领域模型。"""

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.shared.schemas import ArrayModel, FloatArray, FloatMatrix

# 对偶可行性校验的数值容差
_FEASIBILITY_TOL = 1e-6


class DecisionLabel(str, Enum):
    """判决结果。"""

    LEGITIMATE = "legitimate"
    ATTACKER = "attacker"


class Decision(BaseModel):
    """单个画像的判决：score = Σ α_i k(x_i, x) - ρ，score >= 0 判为合法。"""

    model_config = ConfigDict(frozen=True)

    label: DecisionLabel
    score: float


class OcSvmModel(ArrayModel):
    """训练完成的单类 SVM。

    Attributes:
        support_vectors: 支持向量矩阵（每行一个画像）
        alphas: 对偶系数，和为 1
        rho: 判决偏置 ρ
        gamma: 高斯核带宽
        nu: ν 参数
        training_size: 训练集大小 l
    """

    support_vectors: FloatMatrix = Field(..., description="支持向量")
    alphas: FloatArray = Field(..., description="对偶系数 α")
    rho: float = Field(..., description="偏置 ρ")
    gamma: float = Field(..., gt=0, description="高斯核带宽")
    nu: float = Field(..., gt=0, le=1, description="ν")
    training_size: int = Field(..., ge=1, description="训练集大小 l")

    @model_validator(mode="after")
    def validate_dual(self) -> "OcSvmModel":
        if self.support_vectors.shape[0] != self.alphas.size or self.alphas.size == 0:
            raise ValueError("支持向量数量与对偶系数数量不一致")
        if np.any(self.alphas < 0):
            raise ValueError("对偶系数不能为负")
        if abs(float(self.alphas.sum()) - 1.0) > _FEASIBILITY_TOL:
            raise ValueError("对偶系数之和必须为 1")
        upper = 1.0 / (self.nu * self.training_size)
        if np.any(self.alphas > upper + _FEASIBILITY_TOL):
            raise ValueError("对偶系数超出盒约束 1/(ν·l)")
        return self

    @property
    def dimension(self) -> int:
        return int(self.support_vectors.shape[1])


class NuSelection(BaseModel):
    """ν 选择结果。"""

    model_config = ConfigDict(frozen=True)

    nu: float
    tp_rate: float = Field(..., ge=0, le=1)
    fp_rate: float = Field(..., ge=0, le=1, description="攻击者被误接受的比例")

    @property
    def detection_rate(self) -> float:
        return 1.0 - self.fp_rate
