"""公共 Pydantic 基类。

提供 numpy 数组字段支持，领域模型统一继承此基类。
"""

from typing import Annotated, Any

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, PlainSerializer


def _as_float_array(value: Any) -> np.ndarray:
    array = np.array(value, dtype=np.float64)
    if array.ndim != 1:
        raise ValueError("期望一维实数数组")
    return array


def _as_complex_array(value: Any) -> np.ndarray:
    array = np.array(value, dtype=np.complex128)
    # JSON 中的 [re, im] 对
    if array.ndim == 2 and array.shape[1] == 2 and not np.iscomplexobj(np.asarray(value)):
        array = array[:, 0].real + 1j * array[:, 1].real
    if array.ndim != 1:
        raise ValueError("期望一维复数数组")
    return array


# JSON 序列化时实数数组转为列表，复数数组转为 [re, im] 对
FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_float_array),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]
ComplexArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_complex_array),
    PlainSerializer(
        lambda a: [[float(z.real), float(z.imag)] for z in a], return_type=list
    ),
]


class ArrayModel(BaseModel):
    """带 numpy 数组字段的不可变 Pydantic 基类。

    数组字段在校验时被转换为 float64 / complex128，模型冻结后不可重新赋值。
    数组本身以只读标志保护，防止在流水线中被就地修改。
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    def model_post_init(self, __context: Any) -> None:
        for name in type(self).model_fields:
            value = getattr(self, name)
            if isinstance(value, np.ndarray):
                value.setflags(write=False)


def _as_float_matrix(value: Any) -> np.ndarray:
    array = np.array(value, dtype=np.float64)
    if array.ndim != 2:
        raise ValueError("期望二维实数矩阵")
    return array


FloatMatrix = Annotated[
    np.ndarray,
    BeforeValidator(_as_float_matrix),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]
