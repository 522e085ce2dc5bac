"""攻击场景执行。

按时间线驱动设备、AP 与攻击者：参考消息（消息 1）以固定标签顺序反射，
每个可疑帧以新的随机标签顺序反射，并经完整流水线与参考消息比对。
被判为攻击者的帧在上层被丢弃。
"""

import logging

import numpy as np
from returns.result import Failure

from src.channel.domain.models import (
    ChannelEstimate,
    LinkProfile,
    OriginLabel,
    SignalTrace,
    TagSchedule,
)
from src.channel.services.simulator import (
    craft_advanced_attack,
    drift_link,
    perturb_link,
    superpose,
)
from src.config import Settings
from src.defense.domain.models import AuthSession
from src.defense.domain.tag_random import draw_random_schedule, rearrange_by_schedule
from src.defense.domain.voting import vote
from src.detection.domain.models import DecisionLabel, OcSvmModel
from src.detection.infrastructure.model_repository import ModelRepository
from src.detection.services.ocsvm import OneClassSvmTrainer
from src.harness.domain.models import AttackerKind
from src.harness.services.cohort import SessionFactory
from src.monitoring.logging_utils import get_experiment_logger
from src.pipeline.services.authentication_pipeline import (
    MESSAGE1,
    MESSAGE3,
    NO_BACKSCATTER,
    AuthenticationPipeline,
)
from src.scenarios.domain.models import (
    VERIFIED_ACTIONS,
    Action,
    Actor,
    ScenarioOutcome,
    ScenarioResult,
    ScenarioScript,
    StepRecord,
    TimelineEvent,
)
from src.segmentation.services.segmenter import slot_segments
from src.shared.errors import CoherenceBudgetExceeded, ScenarioError, TrainingError
from src.shared.seeding import derive_rng, derive_seed

logger = logging.getLogger(__name__)

# 种子用途键
_TRAINING = 31
_LINKS = 32
_EVENTS = 33


class _SessionState:
    """单次场景运行的可变状态，不在场景之间共享。"""

    def __init__(self, device_link: LinkProfile, attacker_link: LinkProfile) -> None:
        self.device_link = device_link
        self.attacker_link = attacker_link
        self.reference: SignalTrace | None = None
        self.clean_reference: SignalTrace | None = None
        self.reference_time_s = 0.0
        self.recorded_source: SignalTrace | None = None


def _plain_step(event: TimelineEvent) -> StepRecord:
    """不需要验证的事件。"""
    return StepRecord(time_s=event.time_s, actor=event.actor, action=event.action)


class ScenarioRunner:
    """攻击场景运行器。"""

    def __init__(
        self,
        settings: Settings,
        pipeline: AuthenticationPipeline | None = None,
        repository: ModelRepository | None = None,
    ) -> None:
        self.settings = settings
        self.pipeline = pipeline or AuthenticationPipeline.from_settings(settings)
        self.repository = repository or ModelRepository()
        self._events = get_experiment_logger()

    def factory(self, script: ScenarioScript) -> SessionFactory:
        return SessionFactory.from_settings(
            self.settings,
            environment=script.environment,
            tag_count=script.tag_count,
            noise_sigma=script.noise_sigma,
        )

    def prepare_model(self, script: ScenarioScript, factory: SessionFactory) -> OcSvmModel:
        """读取脚本指定的模型，或用合法会话现场训练。

        Raises:
            TrainingError: 现场训练没有可用画像
        """
        if script.model_path is not None:
            return self.repository.load(script.model_path)
        rows = []
        for index in range(script.training_size):
            pair = factory.legitimate_pair(derive_seed(script.seed, _TRAINING, index))
            result = self.pipeline.profile_pair(
                pair.message1, pair.message3, pair.reference_schedule, pair.recorded_schedule
            )
            if not isinstance(result, Failure):
                rows.append(result.unwrap().distances)
        if not rows:
            raise TrainingError("场景训练没有可用画像")
        profiles = np.vstack(rows)
        trainer = OneClassSvmTrainer.from_settings(self.settings)
        nu = max(script.nu, 1.0 / profiles.shape[0])
        return trainer.train(profiles, nu=nu, gamma=self.settings.svm_gamma)

    # ──── 1. 帧的生成 ────

    def _emit(
        self,
        script: ScenarioScript,
        factory: SessionFactory,
        state: _SessionState,
        event: TimelineEvent,
        recorded: TagSchedule,
        seed: int,
    ) -> SignalTrace:
        """生成一个可疑帧在 AP 处的接收轨迹。"""
        if event.actor == Actor.DEVICE:
            link = drift_link(state.device_link, factory.preset.drift_sigma, derive_rng(seed))
            return factory.transmit(link, recorded, seed, OriginLabel.LEGITIMATE)

        if event.action == Action.REPLAY:
            if state.recorded_source is None:
                raise ScenarioError("重放之前攻击者没有录下任何消息")
            return factory.transmit(
                state.attacker_link,
                recorded,
                seed,
                OriginLabel.BASIC_ATTACKER,
                source=state.recorded_source,
            )

        if script.attacker.kind == AttackerKind.ADVANCED:
            assert state.clean_reference is not None
            assumed = draw_random_schedule(factory.reference_schedule, derive_rng(seed, 1))
            estimate = ChannelEstimate(source=factory.source(seed), link=state.device_link)
            return craft_advanced_attack(
                state.clean_reference,
                estimate,
                assumed,
                script.attacker.estimation_error,
                derive_seed(seed, 2),
                receiver_noise_sigma=factory.noise_sigma,
            )
        return factory.transmit(state.attacker_link, recorded, seed, OriginLabel.BASIC_ATTACKER)

    def per_tag_energy(
        self,
        trace: SignalTrace,
        role: str,
        recorded: TagSchedule | None,
        reference: TagSchedule,
    ) -> list[float] | None:
        """各标签分段（按参考顺序）的平均功率；未检测到反向散射时为 None。"""
        segmented = self.pipeline.segment(trace, role)
        if isinstance(segmented, Failure):
            return None
        recorded = recorded or reference
        parts = rearrange_by_schedule(
            slot_segments(segmented.unwrap(), recorded, len(trace)), recorded, reference
        )
        power = np.abs(trace.samples) ** 2
        return [float(power[p.start_index : p.end_index].mean()) for p in parts]

    # ──── 2. 比对 ────

    def _verify(
        self,
        script: ScenarioScript,
        factory: SessionFactory,
        model: OcSvmModel,
        state: _SessionState,
        event: TimelineEvent,
        event_index: int,
    ) -> StepRecord:
        if state.reference is None:
            raise ScenarioError(f"{event.time_s}s 的 {event.action.value} 之前没有参考消息")
        reference_schedule = factory.reference_schedule
        labels: list[DecisionLabel] = []
        scores: list[float] = []
        notes: list[str] = []
        deltas: list[float] = []
        attempts = script.auth_attempts or self.settings.auth_attempts
        for attempt in range(attempts):
            seed = derive_seed(script.seed, _EVENTS, event_index, attempt)
            recorded = draw_random_schedule(reference_schedule, derive_rng(seed, 0))
            trace = self._emit(script, factory, state, event, recorded, seed)
            session = AuthSession(
                message1_trace=state.reference,
                message3_trace=trace,
                schedule1=reference_schedule,
                schedule3=recorded,
                message1_time_s=state.reference_time_s,
                message3_time_s=event.time_s,
                coherence_budget_s=self.settings.coherence_budget_s,
            )
            try:
                result = self.pipeline.authenticate_session(model, session)
            except CoherenceBudgetExceeded as e:
                labels.append(DecisionLabel.ATTACKER)
                notes.append(e.message)
                continue
            if isinstance(result, Failure):
                labels.append(DecisionLabel.ATTACKER)
                notes.append(NO_BACKSCATTER)
                continue
            decision = result.unwrap()
            labels.append(decision.label)
            scores.append(decision.score)
            if attempt == 0:
                before = self.per_tag_energy(state.reference, MESSAGE1, None, reference_schedule)
                after = self.per_tag_energy(trace, MESSAGE3, recorded, reference_schedule)
                if before is not None and after is not None:
                    deltas = [b - a for a, b in zip(before, after, strict=True)]

        final = vote(labels)
        label = final.value
        if not scores and NO_BACKSCATTER in notes:
            label = NO_BACKSCATTER
        return StepRecord(
            time_s=event.time_s,
            actor=event.actor,
            action=event.action,
            label=label,
            score=float(np.mean(scores)) if scores else None,
            accepted=final == DecisionLabel.LEGITIMATE,
            per_tag_energy_delta=deltas,
            note="; ".join(notes),
        )

    # ──── 3. 时间线 ────

    def run(self, script: ScenarioScript, model: OcSvmModel | None = None) -> ScenarioResult:
        """执行脚本。

        Raises:
            ScenarioError: 时间线动作与参与者不匹配或顺序不合法
        """
        factory = self.factory(script)
        model = model or self.prepare_model(script, factory)
        device_link = factory.draw_link(derive_seed(script.seed, _LINKS))
        attacker_link = perturb_link(
            device_link, script.attacker.divergence, derive_rng(script.seed, _LINKS, 1)
        )
        state = _SessionState(device_link, attacker_link)
        steps: list[StepRecord] = []

        for index, event in enumerate(script.timeline):
            seed = derive_seed(script.seed, _EVENTS, index)
            if event.action == Action.SEND_MESSAGE1:
                if event.actor != Actor.DEVICE:
                    raise ScenarioError("消息 1 只能由合法设备发出")
                source = factory.source(seed)
                state.reference = factory.transmit(
                    device_link, factory.reference_schedule, seed, OriginLabel.LEGITIMATE, source
                )
                state.clean_reference = state.reference
                state.reference_time_s = event.time_s
                state.recorded_source = source
                steps.append(_plain_step(event))
            elif event.action == Action.JAM_AND_RECORD:
                if event.actor != Actor.ATTACKER or state.reference is None:
                    raise ScenarioError("干扰必须由攻击者在消息 1 之后发起")
                jam = factory.transmit(
                    attacker_link, factory.reference_schedule, seed, OriginLabel.BASIC_ATTACKER
                )
                state.reference = superpose(state.reference, jam, OriginLabel.UNKNOWN)
                steps.append(
                    StepRecord(
                        time_s=event.time_s,
                        actor=event.actor,
                        action=event.action,
                        note="参考消息被攻击者信号叠加",
                    )
                )
            elif event.action in VERIFIED_ACTIONS:
                steps.append(self._verify(script, factory, model, state, event, index))
            else:
                steps.append(_plain_step(event))

        outcome = judge(steps)
        self._events.log_scenario_outcome(
            script.scenario.value, outcome.value, script.expected_outcome.value, len(steps)
        )
        return ScenarioResult(
            scenario=script.scenario,
            outcome=outcome,
            expected_outcome=script.expected_outcome,
            seed=script.seed,
            steps=steps,
        )


def judge(steps: list[StepRecord]) -> ScenarioOutcome:
    """由各步骤的接受情况得出场景结果。"""
    attacker_steps = [s for s in steps if s.actor == Actor.ATTACKER and s.accepted is not None]
    device_steps = [s for s in steps if s.actor == Actor.DEVICE and s.accepted is not None]
    jammed = any(s.action == Action.JAM_AND_RECORD for s in steps)
    if any(s.accepted for s in attacker_steps):
        return ScenarioOutcome.ATTACK_SUCCEEDS
    if attacker_steps or jammed:
        return ScenarioOutcome.ATTACK_BLOCKED
    if any(not s.accepted for s in device_steps):
        return ScenarioOutcome.FALSE_ALARM
    return ScenarioOutcome.LEGITIMATE
