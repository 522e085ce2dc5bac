"""投票合并。

多 AP 与重复认证共用严格多数规则，平票判为攻击者。
"""

import logging
from collections import Counter
from collections.abc import Callable, Sequence

from scipy.stats import binom

from src.detection.domain.models import DecisionLabel
from src.shared.errors import DefenseError

logger = logging.getLogger(__name__)


def vote(labels: Sequence[DecisionLabel]) -> DecisionLabel:
    """严格多数投票。

    Raises:
        DefenseError: 标签列表为空
    """
    if not labels:
        raise DefenseError("投票需要至少一个判决")
    counts = Counter(DecisionLabel(label) for label in labels)
    if counts[DecisionLabel.LEGITIMATE] > counts[DecisionLabel.ATTACKER]:
        return DecisionLabel.LEGITIMATE
    return DecisionLabel.ATTACKER


def predicted_vote_tp(per_voter_tp: float, voters: int) -> float:
    """独立投票者单体 TP 为 p 时，严格多数投票后的 TP。

    即 P[K > n/2]，K ~ Binomial(n, p)。
    """
    if voters < 1:
        raise DefenseError("投票者数量必须 >= 1")
    if not 0 <= per_voter_tp <= 1:
        raise DefenseError(f"单体 TP 必须位于 [0, 1]: {per_voter_tp}")
    return float(binom.sf(voters // 2, voters, per_voter_tp))


def repeated_authentication(
    attempt: Callable[[int], DecisionLabel],
    attempts: int = 5,
) -> tuple[DecisionLabel, list[DecisionLabel]]:
    """重复认证并投票。

    Args:
        attempt: 第 i 次尝试的判决函数，每次应使用新的随机标签顺序
        attempts: 尝试次数

    Returns:
        (最终判决, 各次判决)
    """
    if attempts < 1:
        raise DefenseError("重复认证次数必须 >= 1")
    labels = [attempt(i) for i in range(attempts)]
    final = vote(labels)
    logger.debug(f"重复认证 {attempts} 次: {[label.value for label in labels]} -> {final.value}")
    return final, labels
