"""攻击场景模块。

去认证死锁、干扰重放与认证死锁三种上层协议攻击的时间线仿真。
"""

from src.scenarios.domain.models import (
    Action,
    Actor,
    AttackerParameters,
    ScenarioKind,
    ScenarioOutcome,
    ScenarioResult,
    ScenarioScript,
    StepRecord,
    TimelineEvent,
)
from src.scenarios.infrastructure.script_loader import load_script, summary_record
from src.scenarios.services.scenario_runner import ScenarioRunner, judge

__all__ = [
    "Action",
    "Actor",
    "AttackerParameters",
    "ScenarioKind",
    "ScenarioOutcome",
    "ScenarioResult",
    "ScenarioScript",
    "StepRecord",
    "TimelineEvent",
    "ScenarioRunner",
    "judge",
    "load_script",
    "summary_record",
]
