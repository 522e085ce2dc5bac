"""单类 SVM 模型仓库。

模型以带版本号的 JSON 文档保存，浮点数按最短精确表示写出，读回后逐位一致。
"""

import logging
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, ValidationError

from src.detection.domain.models import OcSvmModel
from src.shared.errors import ModelFormatError

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1


class OcSvmModelRecord(BaseModel):
    """模型的持久化记录。"""

    format_version: Literal[1] = Field(default=MODEL_FORMAT_VERSION, description="格式版本")
    gamma: float
    nu: float
    rho: float
    training_size: int
    alphas: list[float]
    support_vectors: list[list[float]]

    @classmethod
    def from_domain(cls, model: OcSvmModel) -> "OcSvmModelRecord":
        return cls(
            gamma=model.gamma,
            nu=model.nu,
            rho=model.rho,
            training_size=model.training_size,
            alphas=model.alphas.tolist(),
            support_vectors=model.support_vectors.tolist(),
        )

    def to_domain(self) -> OcSvmModel:
        return OcSvmModel(
            support_vectors=self.support_vectors,
            alphas=self.alphas,
            rho=self.rho,
            gamma=self.gamma,
            nu=self.nu,
            training_size=self.training_size,
        )


class ModelRepository:
    """基于文件系统的模型仓库。"""

    def save(self, model: OcSvmModel, path: Path) -> None:
        """保存模型。

        Args:
            model: 训练好的模型
            path: 目标 JSON 文件
        """
        record = OcSvmModelRecord.from_domain(model)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(record.model_dump_json(indent=2), encoding="utf-8")
        logger.info(f"模型已保存: {path}（{len(record.alphas)} 个支持向量）")

    def load(self, path: Path) -> OcSvmModel:
        """读取模型。

        Raises:
            ModelFormatError: 文件不可读、版本不符或内容非法
        """
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ModelFormatError(f"无法读取模型文件 {path}: {e}") from e
        try:
            record = OcSvmModelRecord.model_validate_json(text)
            return record.to_domain()
        except ValidationError as e:
            raise ModelFormatError(f"模型文件 {path} 内容非法: {e}") from e
