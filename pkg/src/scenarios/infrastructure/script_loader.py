"""场景脚本加载。

脚本为 JSON 文档，键：

    scenario          deauth_deadlock | jam_replay | auth_deadlock
    timeline          [{"time_s": 0.0, "actor": "device", "action": "send_message1"}, ...]
    expected_outcome  attack_blocked | attack_succeeds | legitimate | false_alarm
    attacker          {"kind": "basic", "divergence": 0.5, "estimation_error": 0.0}
    seed, auth_attempts, environment, tag_count, noise_sigma, model_path, training_size, nu
"""

import logging
from pathlib import Path

from pydantic import ValidationError

from src.scenarios.domain.models import ScenarioResult, ScenarioScript
from src.shared.errors import ScenarioError

logger = logging.getLogger(__name__)


def load_script(path: Path) -> ScenarioScript:
    """读取并校验场景脚本。

    Raises:
        ScenarioError: 文件不可读或内容非法（包括时间线未严格递增）
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"无法读取场景脚本 {path}: {e}") from e
    try:
        script = ScenarioScript.model_validate_json(text)
    except ValidationError as e:
        raise ScenarioError(f"场景脚本 {path} 非法: {e}") from e
    logger.debug(f"加载场景脚本 {path}: {script.scenario.value}, {len(script.timeline)} 个事件")
    return script


def summary_record(result: ScenarioResult) -> dict:
    """一次运行的汇总记录。"""
    return {
        "scenario": result.scenario.value,
        "outcome": result.outcome.value,
        "expected_outcome": result.expected_outcome.value,
        "matches_expectation": result.matches_expectation,
        "seed": result.seed,
        "per_step_scores": result.per_step_scores,
        "steps": [step.model_dump(mode="json") for step in result.steps],
    }
