"""防御模块。

标签随机化、多 AP / 重复认证投票以及认证会话模型。
"""

from src.defense.domain.models import AuthSession, SessionVerdict
from src.defense.domain.tag_random import draw_random_schedule, rearrange_by_schedule
from src.defense.domain.voting import predicted_vote_tp, repeated_authentication, vote

__all__ = [
    "AuthSession",
    "SessionVerdict",
    "draw_random_schedule",
    "rearrange_by_schedule",
    "predicted_vote_tp",
    "repeated_authentication",
    "vote",
]
