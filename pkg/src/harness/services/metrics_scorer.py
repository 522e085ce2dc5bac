"""TP / FP 评分。

TP 率 = 被接受的合法试验 / 合法试验总数；FP 率 = 被接受的攻击试验 / 攻击试验总数。
未检测到反向散射（None）的试验计入总数但不被接受，并单独计数。
"""

from collections.abc import Sequence

from pydantic import BaseModel, ConfigDict

from src.detection.domain.models import DecisionLabel
from src.harness.domain.models import DetectionMethod, MetricsRecord, SweepAxis

TrialOutcome = DecisionLabel | None


class TrialCounts(BaseModel):
    """一组试验的接受计数。"""

    model_config = ConfigDict(frozen=True)

    trials: int
    accepted: int
    no_backscatter: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.trials if self.trials else 0.0


def count_outcomes(outcomes: Sequence[TrialOutcome]) -> TrialCounts:
    """统计判决序列中被接受与未检测到反向散射的数量。"""
    return TrialCounts(
        trials=len(outcomes),
        accepted=sum(1 for o in outcomes if o == DecisionLabel.LEGITIMATE),
        no_backscatter=sum(1 for o in outcomes if o is None),
    )


def score(
    axis: SweepAxis,
    value: str,
    repetition: int,
    method: DetectionMethod,
    legit: Sequence[TrialOutcome],
    attackers: Sequence[TrialOutcome],
    seed: int,
    nu: float | None = None,
) -> MetricsRecord:
    """由合法与攻击试验的判决生成一条指标记录。"""
    legit_counts = count_outcomes(legit)
    attacker_counts = count_outcomes(attackers)
    return MetricsRecord(
        axis=axis,
        value=value,
        repetition=repetition,
        method=method,
        nu=nu,
        tp_rate=legit_counts.acceptance_rate,
        fp_rate=attacker_counts.acceptance_rate,
        legit_trials=legit_counts.trials,
        attacker_trials=attacker_counts.trials,
        legit_no_backscatter=legit_counts.no_backscatter,
        attacker_no_backscatter=attacker_counts.no_backscatter,
        seed=seed,
    )
