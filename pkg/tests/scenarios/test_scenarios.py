"""攻击场景测试。"""

from pathlib import Path

import pytest
from pydantic import ValidationError

from src.config import Settings
from src.scenarios.domain.models import (
    Action,
    Actor,
    AttackerParameters,
    ScenarioKind,
    ScenarioOutcome,
    ScenarioScript,
    StepRecord,
    TimelineEvent,
)
from src.scenarios.infrastructure.script_loader import load_script, summary_record
from src.scenarios.services.scenario_runner import ScenarioRunner, judge
from src.shared.errors import ScenarioError

SCRIPTS = Path(__file__).resolve().parents[2] / "configs" / "scenarios"


def _step(actor: Actor, action: Action, accepted: bool | None = None) -> StepRecord:
    return StepRecord(time_s=0.0, actor=actor, action=action, accepted=accepted)


def _script(*events: tuple[float, Actor, Action]) -> ScenarioScript:
    return ScenarioScript(
        scenario=ScenarioKind.DEAUTH_DEADLOCK,
        timeline=[TimelineEvent(time_s=t, actor=a, action=act) for t, a, act in events],
        expected_outcome=ScenarioOutcome.ATTACK_BLOCKED,
    )


@pytest.mark.unit
class TestJudge:
    """测试场景结果判定。"""

    def test_accepted_attacker_frame_succeeds(self):
        """测试攻击者的帧被接受即攻击成功。"""
        steps = [
            _step(Actor.DEVICE, Action.SEND_MESSAGE1),
            _step(Actor.ATTACKER, Action.INJECT_DEAUTH, accepted=True),
        ]

        assert judge(steps) == ScenarioOutcome.ATTACK_SUCCEEDS

    def test_rejected_attacker_frame_is_blocked(self):
        """测试攻击者的帧全部被丢弃即攻击被阻止。"""
        steps = [
            _step(Actor.DEVICE, Action.SEND_MESSAGE1),
            _step(Actor.ATTACKER, Action.SEND_AUTH_REQUEST, accepted=False),
        ]

        assert judge(steps) == ScenarioOutcome.ATTACK_BLOCKED

    def test_jamming_alone_is_blocked(self):
        """测试只有干扰没有被接受的攻击帧时判为阻止。"""
        steps = [
            _step(Actor.DEVICE, Action.SEND_MESSAGE1),
            _step(Actor.ATTACKER, Action.JAM_AND_RECORD),
        ]

        assert judge(steps) == ScenarioOutcome.ATTACK_BLOCKED

    def test_rejected_device_frame_is_false_alarm(self):
        """测试无攻击者时设备帧被拒绝为误报。"""
        steps = [
            _step(Actor.DEVICE, Action.SEND_MESSAGE1),
            _step(Actor.DEVICE, Action.SEND_MESSAGE3, accepted=False),
        ]

        assert judge(steps) == ScenarioOutcome.FALSE_ALARM

    def test_accepted_device_frame_is_legitimate(self):
        """测试设备帧全部被接受。"""
        steps = [
            _step(Actor.DEVICE, Action.SEND_MESSAGE1),
            _step(Actor.AP, Action.SEND_ACK),
            _step(Actor.DEVICE, Action.SEND_MESSAGE3, accepted=True),
        ]

        assert judge(steps) == ScenarioOutcome.LEGITIMATE


@pytest.mark.unit
class TestScript:
    """测试脚本加载与对照变换。"""

    @pytest.mark.parametrize("name", ["deauth_deadlock", "jam_replay", "auth_deadlock"])
    def test_bundled_scripts_load(self, name):
        """测试自带的三个脚本均可加载且预期攻击被阻止。"""
        script = load_script(SCRIPTS / f"{name}.json")

        assert script.scenario.value == name
        assert script.has_attacker
        assert script.expected_outcome == ScenarioOutcome.ATTACK_BLOCKED

    def test_missing_file(self, temp_dir):
        """测试文件不存在。"""
        with pytest.raises(ScenarioError):
            load_script(temp_dir / "absent.json")

    def test_invalid_json(self, temp_dir):
        """测试内容非法。"""
        path = temp_dir / "bad.json"
        path.write_text('{"scenario": "jam_replay"}', encoding="utf-8")

        with pytest.raises(ScenarioError):
            load_script(path)

    def test_timeline_must_increase(self):
        """测试时间线必须严格递增。"""
        with pytest.raises(ValidationError):
            _script(
                (0.0, Actor.DEVICE, Action.SEND_MESSAGE1),
                (0.0, Actor.ATTACKER, Action.INJECT_DEAUTH),
            )

    def test_without_attacker(self):
        """测试对照脚本删除干扰、把重放改为设备的消息 3。"""
        script = load_script(SCRIPTS / "jam_replay.json")

        control = script.without_attacker()

        assert not control.has_attacker
        assert [e.action for e in control.timeline] == [
            Action.SEND_MESSAGE1,
            Action.SEND_MESSAGE3,
        ]
        assert control.expected_outcome == ScenarioOutcome.LEGITIMATE


@pytest.mark.integration
class TestRunnerErrors:
    """测试时间线顺序错误。"""

    def test_message1_from_attacker(self, trained_model):
        """测试消息 1 只能由设备发出。"""
        script = _script((0.0, Actor.ATTACKER, Action.SEND_MESSAGE1))

        with pytest.raises(ScenarioError):
            ScenarioRunner(Settings()).run(script, model=trained_model)

    def test_suspect_frame_before_reference(self, trained_model):
        """测试没有参考消息时不能比对。"""
        script = _script((0.0, Actor.ATTACKER, Action.INJECT_DEAUTH))

        with pytest.raises(ScenarioError):
            ScenarioRunner(Settings()).run(script, model=trained_model)

    def test_jam_before_reference(self, trained_model):
        """测试干扰必须在消息 1 之后。"""
        script = _script((0.0, Actor.ATTACKER, Action.JAM_AND_RECORD))

        with pytest.raises(ScenarioError):
            ScenarioRunner(Settings()).run(script, model=trained_model)


@pytest.mark.slow
class TestScenarioRuns:
    """测试三个攻击场景的端到端执行。"""

    @pytest.mark.parametrize("name", ["deauth_deadlock", "jam_replay", "auth_deadlock"])
    def test_attack_blocked(self, name, trained_model):
        """测试信道差异明显时多次认证投票后攻击者的帧被丢弃。"""
        script = load_script(SCRIPTS / f"{name}.json").model_copy(
            update={"auth_attempts": 5, "attacker": AttackerParameters(divergence=1.0)}
        )

        result = ScenarioRunner(Settings()).run(script, model=trained_model)

        assert result.outcome == ScenarioOutcome.ATTACK_BLOCKED
        assert result.matches_expectation
        attacker_steps = [s for s in result.steps if s.actor == Actor.ATTACKER and s.label]
        assert attacker_steps and not any(s.accepted for s in attacker_steps)

    @pytest.mark.parametrize("name", ["deauth_deadlock", "jam_replay", "auth_deadlock"])
    def test_without_attacker_never_reports_attack(self, name, trained_model):
        """测试对照运行中没有攻击者步骤。"""
        script = load_script(SCRIPTS / f"{name}.json").without_attacker()

        result = ScenarioRunner(Settings()).run(script, model=trained_model)

        assert result.outcome in (ScenarioOutcome.LEGITIMATE, ScenarioOutcome.FALSE_ALARM)
        assert all(step.actor != Actor.ATTACKER for step in result.steps)

    def test_summary_record(self, trained_model):
        """测试汇总记录包含每个可疑帧的分数与能量变化。"""
        script = load_script(SCRIPTS / "deauth_deadlock.json")

        record = summary_record(ScenarioRunner(Settings()).run(script, model=trained_model))

        assert record["scenario"] == "deauth_deadlock"
        assert len(record["per_step_scores"]) == 1
        assert len(record["steps"]) == 3
        verified = record["steps"][-1]
        if verified["score"] is not None:
            assert len(verified["per_tag_energy_delta"]) == 3

    def test_training_on_the_fly(self):
        """测试未给模型时用合法会话现场训练。"""
        script = load_script(SCRIPTS / "auth_deadlock.json").model_copy(
            update={"training_size": 20}
        )

        result = ScenarioRunner(Settings()).run(script)

        assert len(result.steps) == 3
