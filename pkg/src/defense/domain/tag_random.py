"""标签随机化方案。

消息 3 按随机顺序反射，AP 记录该顺序；比较前把消息 3 的各标签分段
重排回消息 1 的顺序。
"""

from collections.abc import Sequence
from typing import TypeVar

import numpy as np

from src.channel.domain.models import TagSchedule
from src.shared.errors import DefenseError

T = TypeVar("T")


def rearrange_by_schedule(
    segments: Sequence[T], recorded: TagSchedule, reference: TagSchedule
) -> list[T]:
    """把按 recorded 顺序排列的各标签分段重排为 reference 顺序。

    输出第 k 个元素对应 reference.order[k] 号标签。

    Raises:
        DefenseError: 分段数量与标签数不符，或两种顺序不是同一集合的排列
    """
    if len(segments) != recorded.tag_count:
        raise DefenseError(f"分段数量 {len(segments)} 与标签数 {recorded.tag_count} 不一致")
    if sorted(recorded.order) != sorted(reference.order):
        raise DefenseError(f"标签顺序不匹配: {recorded.order} vs {reference.order}")
    position_of = {tag: position for position, tag in enumerate(recorded.order)}
    return [segments[position_of[tag]] for tag in reference.order]


def draw_random_schedule(reference: TagSchedule, rng: np.random.Generator) -> TagSchedule:
    """从全部标签排列中均匀抽取一个顺序，时隙几何与 reference 相同。"""
    order = [reference.order[i] for i in rng.permutation(reference.tag_count)]
    return reference.with_order(order)
