"""指标汇总与绘图。"""

import logging
from collections import defaultdict
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.stats import sem

from src.harness.domain.models import DetectionMethod, MetricsRecord, SweepAxis

logger = logging.getLogger(__name__)


class AggregateRow(BaseModel):
    """某个 (网格点, 方法) 在全部重复上的均值与标准误。"""

    model_config = ConfigDict(frozen=True)

    axis: SweepAxis
    value: str
    method: DetectionMethod
    repetitions: int
    tp_mean: float
    tp_sem: float
    fp_mean: float
    fp_sem: float

    @property
    def detection_mean(self) -> float:
        """攻击检测率 = 1 - FP。"""
        return 1.0 - self.fp_mean


def _sem(values: list[float]) -> float:
    if len(values) < 2:
        return 0.0
    return float(sem(values))


def aggregate(records: Sequence[MetricsRecord]) -> list[AggregateRow]:
    """按 (轴, 取值, 方法) 聚合，保持取值的首次出现顺序。"""
    groups: dict[tuple[SweepAxis, str, DetectionMethod], list[MetricsRecord]] = defaultdict(list)
    for record in records:
        groups[(record.axis, record.value, record.method)].append(record)
    rows = []
    for (axis, value, method), members in groups.items():
        tp = [m.tp_rate for m in members]
        fp = [m.fp_rate for m in members]
        rows.append(
            AggregateRow(
                axis=axis,
                value=value,
                method=method,
                repetitions=len(members),
                tp_mean=float(np.mean(tp)),
                tp_sem=_sem(tp),
                fp_mean=float(np.mean(fp)),
                fp_sem=_sem(fp),
            )
        )
    return rows


def format_table(rows: Sequence[AggregateRow]) -> str:
    """纯文本汇总表。"""
    lines = [f"{'axis':<20}{'value':<14}{'method':<13}{'n':>3}  {'TP':>16}  {'FP':>16}"]
    for row in rows:
        lines.append(
            f"{row.axis.value:<20}{row.value:<14}{row.method.value:<13}{row.repetitions:>3}  "
            f"{row.tp_mean:>7.4f} ± {row.tp_sem:<6.4f}  {row.fp_mean:>7.4f} ± {row.fp_sem:<6.4f}"
        )
    return "\n".join(lines)


def render_plot(rows: Sequence[AggregateRow], path: Path) -> None:
    """绘制 TP 率与攻击检测率随扫描取值的变化。"""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for method in DetectionMethod:
        members = [r for r in rows if r.method == method]
        if not members:
            continue
        labels = [r.value for r in members]
        x = np.arange(len(members))
        ax.errorbar(
            x,
            [r.tp_mean for r in members],
            yerr=[r.tp_sem for r in members],
            marker="o",
            capsize=3,
            label=f"TP ({method.value})",
        )
        ax.errorbar(
            x,
            [r.detection_mean for r in members],
            yerr=[r.fp_sem for r in members],
            marker="s",
            capsize=3,
            linestyle="--",
            label=f"detection ({method.value})",
        )
        ax.set_xticks(x, labels)
    if rows:
        ax.set_xlabel(rows[0].axis.value)
    ax.set_ylabel("rate")
    ax.set_ylim(0.0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    logger.info(f"图表已保存: {path}")
