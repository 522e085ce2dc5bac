"""实验配置、评分、结果文件与汇总测试。"""

import numpy as np
import pytest
from pydantic import ValidationError

from src.config import Settings
from src.detection.domain.models import DecisionLabel
from src.harness.domain.models import (
    DetectionMethod,
    ExperimentConfig,
    MetricsRecord,
    RunManifest,
    SweepAxis,
    format_value,
)
from src.harness.infrastructure.result_writer import (
    METRICS_COLUMNS,
    append_manifest,
    read_jsonl,
    read_metrics_csv,
    write_metrics_csv,
)
from src.harness.services.experiment_runner import ExperimentRunner, _merge
from src.harness.services.metrics_scorer import count_outcomes, score
from src.harness.services.report import aggregate, format_table, render_plot
from src.shared.errors import ExperimentConfigError
from src.shared.seeding import derive_seed

LEGIT = DecisionLabel.LEGITIMATE
ATTACK = DecisionLabel.ATTACKER


def _record(value: str, repetition: int, tp: float, fp: float, **kwargs) -> MetricsRecord:
    return MetricsRecord(
        axis=SweepAxis.NU,
        value=value,
        repetition=repetition,
        method=kwargs.pop("method", DetectionMethod.SVM),
        nu=kwargs.pop("nu", 0.2),
        tp_rate=tp,
        fp_rate=fp,
        legit_trials=10,
        attacker_trials=10,
        seed=7,
        **kwargs,
    )


@pytest.mark.unit
class TestExperimentConfig:
    """测试实验配置校验与网格点展开。"""

    def test_defaults(self):
        """测试默认值与验证集负样本数。"""
        config = ExperimentConfig(axis=SweepAxis.NU, grid=[0.2])

        assert config.training_size == 577
        assert config.validation_negatives == 77
        assert config.evaluation_environment == "laboratory"

    def test_negatives_round_half_up(self):
        """测试负样本数半数向上取整。"""
        config = ExperimentConfig(
            axis=SweepAxis.NU, grid=[0.2], pos_neg_ratio=0.25, validation_positives=10
        )

        assert config.validation_negatives == 3

    @pytest.mark.parametrize(
        ("axis", "grid"),
        [
            (SweepAxis.TAG_COUNT, [2.5]),
            (SweepAxis.AP_COUNT, [0]),
            (SweepAxis.NU, [1.5]),
            (SweepAxis.ATTACKER_DIVERGENCE, [-0.1]),
            (SweepAxis.NU, ["office"]),
            (SweepAxis.ENVIRONMENT, ["basement"]),
        ],
    )
    def test_invalid_grid(self, axis, grid):
        """测试网格取值与扫描轴不匹配时报错。"""
        with pytest.raises(ValidationError):
            ExperimentConfig(axis=axis, grid=grid)

    def test_unknown_environment(self):
        """测试未知环境预设。"""
        with pytest.raises(ValidationError):
            ExperimentConfig(axis=SweepAxis.NU, grid=[0.2], environment="basement")

    def test_at_integer_axis(self):
        """测试整数轴取值转换为 int。"""
        point = ExperimentConfig(axis=SweepAxis.TAG_COUNT, grid=[2, 4]).at(4.0)

        assert point.tag_count == 4
        assert isinstance(point.tag_count, int)

    def test_at_float_axis(self):
        """测试浮点轴只覆盖对应字段。"""
        config = ExperimentConfig(axis=SweepAxis.ATTACKER_DIVERGENCE, grid=[0.1, 0.9])

        point = config.at(0.9)

        assert point.attacker_divergence == 0.9
        assert point.tag_count == config.tag_count

    def test_at_environment_axis_sets_test_environment(self):
        """测试环境轴只改变测试环境，训练环境不变。"""
        config = ExperimentConfig(axis=SweepAxis.ENVIRONMENT, grid=["corridor"])

        point = config.at("corridor")

        assert point.environment == "laboratory"
        assert point.evaluation_environment == "corridor"

    def test_format_value(self):
        """测试网格取值的文本形式。"""
        assert format_value(3.0) == "3"
        assert format_value(0.2) == "0.2"
        assert format_value("corridor") == "corridor"


@pytest.mark.unit
class TestScoring:
    """测试 TP / FP 计算与多 AP 合并。"""

    def test_no_backscatter_counts_as_not_accepted(self):
        """测试未检测到反向散射计入总数但不被接受。"""
        record = score(
            SweepAxis.NU,
            "0.2",
            0,
            DetectionMethod.SVM,
            [LEGIT, LEGIT, None, ATTACK],
            [ATTACK, LEGIT],
            seed=1,
            nu=0.2,
        )

        assert record.tp_rate == 0.5
        assert record.fp_rate == 0.5
        assert record.legit_no_backscatter == 1
        assert record.trial_count == 6

    def test_count_outcomes(self):
        """测试计数。"""
        counts = count_outcomes([None, None, LEGIT])

        assert (counts.trials, counts.accepted, counts.no_backscatter) == (3, 1, 2)

    def test_merge_votes_missing_ap_as_attacker(self):
        """测试未检测到反向散射的 AP 投攻击者票。"""
        assert _merge([LEGIT, LEGIT, None]) == LEGIT
        assert _merge([LEGIT, None, None]) == ATTACK

    def test_merge_all_missing(self):
        """测试全部 AP 未检测到反向散射时结果为 None。"""
        assert _merge([None, None]) is None


@pytest.mark.unit
class TestResultWriter:
    """测试指标 CSV 与运行清单。"""

    def test_header_and_rows(self, temp_dir):
        """测试列顺序固定且可读回。"""
        records = [
            _record("0.2", 0, 0.9, 0.1),
            _record("0.2", 0, 0.7, 0.3, method=DetectionMethod.CORRELATION, nu=None),
        ]
        path = temp_dir / "out" / "metrics.csv"

        assert write_metrics_csv(records, path) == 2

        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(METRICS_COLUMNS)
        assert lines[2].split(",")[4] == ""
        assert read_metrics_csv(path) == records

    def test_identical_records_give_identical_bytes(self, temp_dir):
        """测试相同记录写出逐字节一致的文件。"""
        records = [_record("0.05", r, 0.1 * r, 1 / 3) for r in range(3)]

        write_metrics_csv(records, temp_dir / "a.csv")
        write_metrics_csv(records, temp_dir / "b.csv")

        assert (temp_dir / "a.csv").read_bytes() == (temp_dir / "b.csv").read_bytes()

    def test_missing_columns(self, temp_dir):
        """测试缺列的文件被拒绝。"""
        path = temp_dir / "bad.csv"
        path.write_text("axis,value\nnu,0.2\n", encoding="utf-8")

        with pytest.raises(ExperimentConfigError):
            read_metrics_csv(path)

    def test_missing_file(self, temp_dir):
        """测试文件不存在。"""
        with pytest.raises(ExperimentConfigError):
            read_metrics_csv(temp_dir / "absent.csv")

    def test_manifest_appends(self, temp_dir):
        """测试运行清单逐行追加。"""
        config = ExperimentConfig(axis=SweepAxis.NU, grid=[0.2])
        path = temp_dir / "metrics.manifest.jsonl"

        append_manifest(RunManifest(run_id="a", config=config, task_seeds={"0.2/0": 5}), path)
        append_manifest(RunManifest(run_id="b", config=config), path)

        rows = read_jsonl(path)
        assert [row["run_id"] for row in rows] == ["a", "b"]
        assert rows[0]["task_seeds"] == {"0.2/0": 5}


@pytest.mark.unit
class TestReport:
    """测试汇总与绘图。"""

    def test_aggregate_mean_and_sem(self):
        """测试跨重复的均值与标准误。"""
        rows = aggregate([_record("0.2", 0, 0.8, 0.1), _record("0.2", 1, 1.0, 0.3)])

        assert len(rows) == 1
        assert rows[0].repetitions == 2
        assert rows[0].tp_mean == pytest.approx(0.9)
        assert rows[0].tp_sem == pytest.approx(0.1)
        assert rows[0].detection_mean == pytest.approx(0.8)

    def test_single_repetition_has_zero_sem(self):
        """测试单次重复的标准误为 0。"""
        rows = aggregate([_record("0.2", 0, 0.8, 0.1)])

        assert rows[0].tp_sem == 0.0

    def test_keeps_first_seen_order(self):
        """测试保持取值首次出现的顺序。"""
        records = [_record("0.5", 0, 0.5, 0.5), _record("0.05", 0, 0.9, 0.2)]

        assert [row.value for row in aggregate(records)] == ["0.5", "0.05"]

    def test_table_and_plot(self, temp_dir):
        """测试文本表格与 PNG 输出。"""
        rows = aggregate(
            [
                _record("0.2", 0, 0.8, 0.1),
                _record("0.2", 0, 0.6, 0.4, method=DetectionMethod.CORRELATION, nu=None),
            ]
        )
        path = temp_dir / "plots" / "nu.png"

        table = format_table(rows)
        render_plot(rows, path)

        assert table.splitlines()[0].startswith("axis")
        assert "correlation" in table
        assert path.read_bytes()[:4] == b"\x89PNG"


@pytest.mark.slow
class TestExperimentRunner:
    """测试小规模扫描。"""

    @pytest.fixture
    def config(self, temp_dir):
        return ExperimentConfig(
            axis=SweepAxis.TAG_COUNT,
            grid=[2],
            repetitions=1,
            training_size=20,
            nu=0.2,
            test_legitimate=6,
            test_attackers=6,
            seed=11,
            output_path=temp_dir / "metrics.csv",
        )

    def test_run_produces_both_methods(self, test_settings, config):
        """测试每个任务输出 SVM 与基线两条记录，清单包含任务种子。"""
        records, manifest = ExperimentRunner(test_settings).run(config)

        assert [r.method for r in records] == [
            DetectionMethod.SVM,
            DetectionMethod.CORRELATION,
        ]
        assert all(r.value == "2" and r.legit_trials == 6 for r in records)
        assert manifest.record_count == 2
        assert manifest.task_seeds == {"2/0": derive_seed(11, 0, 0)}
        assert manifest.finished_at is not None

    def test_same_seed_same_records(self, config):
        """测试同一主种子的两次运行结果一致。"""
        runner = ExperimentRunner(Settings())

        first = runner.run_point(config, 0, 0)
        second = runner.run_point(config, 0, 0)

        assert [r.model_dump() for r in first] == [r.model_dump() for r in second]

    def test_multiple_aps(self):
        """测试多 AP 投票时试验数不变。"""
        config = ExperimentConfig(
            axis=SweepAxis.AP_COUNT,
            grid=[3],
            training_size=20,
            nu=0.2,
            test_legitimate=4,
            test_attackers=4,
            include_baseline=False,
        )

        records = ExperimentRunner(Settings()).run_point(config, 0, 0)

        assert len(records) == 1
        assert records[0].legit_trials == 4
        assert 0.0 <= records[0].tp_rate <= 1.0
        assert np.isfinite(records[0].fp_rate)


def _by_method(records: list[MetricsRecord]) -> dict[DetectionMethod, MetricsRecord]:
    return {record.method: record for record in records}


@pytest.mark.slow
class TestDetectionQuality:
    """测试仿真队列上的检测效果。"""

    def test_default_cohort_operating_point(self):
        """测试默认规模队列在高信道差异下 TP >= 90% 且 FP <= 10%。"""
        config = ExperimentConfig(
            axis=SweepAxis.ATTACKER_DIVERGENCE, grid=[0.8], include_baseline=False
        )

        svm = ExperimentRunner(Settings()).run_point(config, 0, 0)[0]

        assert svm.legit_trials == 500 and svm.attacker_trials == 500
        assert svm.tp_rate >= 0.9
        assert svm.fp_rate <= 0.1

    def test_svm_beats_correlation_baseline(self):
        """测试相关系数基线的 TP - FP 低于单类 SVM。"""
        config = ExperimentConfig(
            axis=SweepAxis.ATTACKER_DIVERGENCE,
            grid=[0.8],
            training_size=150,
            nu=0.05,
            test_legitimate=40,
            test_attackers=40,
        )

        records = _by_method(ExperimentRunner(Settings()).run_point(config, 0, 0))

        svm = records[DetectionMethod.SVM]
        baseline = records[DetectionMethod.CORRELATION]
        assert svm.tp_rate - svm.fp_rate > baseline.tp_rate - baseline.fp_rate

    def test_more_tags_admit_fewer_attackers(self):
        """测试默认信道差异下单标签的攻击者接受率高于三标签。"""
        config = ExperimentConfig(
            axis=SweepAxis.TAG_COUNT,
            grid=[1, 3],
            training_size=200,
            nu=0.05,
            test_legitimate=20,
            test_attackers=150,
            include_baseline=False,
        )
        runner = ExperimentRunner(Settings())

        single = runner.run_point(config, 0, 0)[0]
        triple = runner.run_point(config, 1, 0)[0]

        assert single.fp_rate >= triple.fp_rate + 0.03

    def test_nu_trades_acceptance(self):
        """测试 ν 从 0.02 增大到 0.4 时合法接受率明显下降。"""
        config = ExperimentConfig(
            axis=SweepAxis.NU,
            grid=[0.02, 0.4],
            training_size=150,
            test_legitimate=60,
            test_attackers=10,
            include_baseline=False,
        )
        runner = ExperimentRunner(Settings())

        loose = runner.run_point(config, 0, 0)[0]
        strict = runner.run_point(config, 1, 0)[0]

        assert loose.nu == 0.02 and strict.nu == 0.4
        assert loose.tp_rate >= strict.tp_rate + 0.15
