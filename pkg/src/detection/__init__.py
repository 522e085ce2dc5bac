"""检测模块。

高斯核单类 SVM 的训练、判决、ν 选择与模型持久化。
"""

from src.detection.domain.models import Decision, DecisionLabel, NuSelection, OcSvmModel
from src.detection.infrastructure.model_repository import (
    MODEL_FORMAT_VERSION,
    ModelRepository,
    OcSvmModelRecord,
)
from src.detection.services.ocsvm import (
    OneClassSvmTrainer,
    as_matrix,
    decide,
    decide_batch,
    dual_objective,
    gaussian_kernel,
    kernel_sums,
    median_gamma,
    select_nu,
)

__all__ = [
    "Decision",
    "DecisionLabel",
    "NuSelection",
    "OcSvmModel",
    "MODEL_FORMAT_VERSION",
    "ModelRepository",
    "OcSvmModelRecord",
    "OneClassSvmTrainer",
    "as_matrix",
    "decide",
    "decide_batch",
    "dual_objective",
    "gaussian_kernel",
    "kernel_sums",
    "median_gamma",
    "select_nu",
]
