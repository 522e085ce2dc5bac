"""领域错误定义。

所有错误都携带 ``message`` 属性，便于 CLI 统一输出。
"""


class ShieldScatterError(Exception):
    """所有领域错误的基类。"""

    def __init__(self, message: str) -> None:
        """初始化错误。

        Args:
            message: 错误消息
        """
        self.message = message
        super().__init__(message)


class TraceFormatError(ShieldScatterError):
    """信号轨迹文件格式或内容非法。"""


class ScheduleError(ShieldScatterError):
    """标签时隙调度非法（越界、排列错误）。"""


class SegmentationError(ShieldScatterError):
    """分段参数或分段边界非法。"""


class NoBackscatterError(SegmentationError):
    """未在轨迹中检测到反向散射信号。

    这是预期内的结果而非程序缺陷，由 Result 显式传递。
    """

    def __init__(self, message: str, trace_role: str = "") -> None:
        """初始化错误。

        Args:
            message: 错误消息
            trace_role: 发生检测失败的消息角色（message1 / message3）
        """
        self.trace_role = trace_role
        super().__init__(message)


class FeatureError(ShieldScatterError):
    """特征提取前置条件不满足。"""


class ProfileError(ShieldScatterError):
    """画像向量构建失败（序列过短、维度不符）。"""


class TrainingError(ShieldScatterError):
    """单类 SVM 训练输入非法。"""


class ModelFormatError(ShieldScatterError):
    """模型文件无法解析或版本不兼容。"""


class DefenseError(ShieldScatterError):
    """防御机制（重排、投票）输入非法。"""


class CoherenceBudgetExceeded(DefenseError):
    """会话时长超出相干时间预算，拒绝进入分类。"""


class CorrelationUndefinedError(ShieldScatterError):
    """序列方差为零，相关系数无定义。"""


class ScenarioError(ShieldScatterError):
    """攻击场景脚本非法。"""


class ExperimentConfigError(ShieldScatterError):
    """实验配置与扫描轴不匹配。"""
