"""命令行子命令实现。

每个 cmd_* 函数接收解析后的参数与配置，返回进程退出码。
检测路径（segment、profile、detect、baseline）读取轨迹时丢弃来源标签。
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

from pydantic import ValidationError
from returns.result import Failure, Success

from src.channel.domain.models import OriginLabel, SignalTrace, TagSchedule
from src.channel.infrastructure.trace_codec import TraceCodec
from src.config import Settings
from src.detection.infrastructure.model_repository import ModelRepository
from src.detection.services.ocsvm import (
    OneClassSvmTrainer,
    as_matrix,
    decide,
    median_gamma,
    select_nu,
)
from src.harness.domain.models import (
    DEFAULT_NU_GRID,
    AttackerKind,
    ExperimentConfig,
    SweepAxis,
)
from src.harness.infrastructure.result_writer import (
    append_manifest,
    read_jsonl,
    read_metrics_csv,
    write_jsonl,
    write_metrics_csv,
)
from src.harness.services.cohort import PairSample, SessionFactory
from src.harness.services.experiment_runner import ExperimentRunner
from src.harness.services.report import aggregate, format_table, render_plot
from src.pipeline.services.authentication_pipeline import NO_BACKSCATTER, AuthenticationPipeline
from src.profiling.infrastructure.profile_csv import read_profiles_csv, write_profiles_csv
from src.scenarios.infrastructure.script_loader import load_script, summary_record
from src.scenarios.services.scenario_runner import ScenarioRunner
from src.shared.errors import ExperimentConfigError, ShieldScatterError
from src.shared.seeding import derive_seed

logger = logging.getLogger(__name__)

GENERATION_LOG = "generation.jsonl"

_KIND_LEGITIMATE = "legitimate"
_KIND_MIXED = "mixed"


def _emit(record: dict[str, Any]) -> None:
    print(json.dumps(record, ensure_ascii=False))


# ──────────────────────────────────────────────
# 1. 消息对文件
# ──────────────────────────────────────────────


def pair_paths(directory: Path, index: int) -> tuple[Path, Path, Path]:
    """第 index 对消息的 (m1, m3, sidecar) 路径。"""
    stem = f"pair_{index:04d}"
    return (
        directory / f"{stem}_m1.ssct",
        directory / f"{stem}_m3.ssct",
        directory / f"{stem}.json",
    )


def write_pair(pair: PairSample, directory: Path, index: int, codec: TraceCodec) -> dict[str, Any]:
    """写出一对消息与 AP 侧调度记录，返回生成日志行。"""
    m1, m3, sidecar = pair_paths(directory, index)
    codec.write(pair.message1, m1)
    codec.write(pair.message3, m3)
    sidecar.write_text(
        json.dumps(
            {
                "pair": index,
                "reference_schedule": pair.reference_schedule.model_dump(),
                "recorded_schedule": pair.recorded_schedule.model_dump(),
            },
            indent=2,
        ),
        encoding="utf-8",
    )
    return {
        "pair": index,
        "actor": pair.actor.name.lower(),
        "label": int(pair.actor),
        "message1": m1.name,
        "message3": m3.name,
    }


def read_schedules(sidecar: Path | None) -> tuple[TagSchedule | None, TagSchedule | None]:
    """读取调度记录；文件缺失时两条消息按同一顺序处理。"""
    if sidecar is None or not sidecar.exists():
        return None, None
    try:
        data = json.loads(sidecar.read_text(encoding="utf-8"))
        return (
            TagSchedule.model_validate(data["reference_schedule"]),
            TagSchedule.model_validate(data["recorded_schedule"]),
        )
    except (OSError, KeyError, ValueError, ValidationError) as e:
        raise ExperimentConfigError(f"调度记录 {sidecar} 非法: {e}") from e


def _sidecar_for(message1: Path) -> Path:
    return message1.with_name(message1.name.replace("_m1.ssct", ".json"))


def _load_pair(
    args: argparse.Namespace, codec: TraceCodec
) -> tuple[SignalTrace, SignalTrace, TagSchedule | None, TagSchedule | None]:
    message1 = codec.read(Path(args.message1), with_label=False)
    message3 = codec.read(Path(args.message3), with_label=False)
    sidecar = Path(args.schedule) if args.schedule else _sidecar_for(Path(args.message1))
    reference, recorded = read_schedules(sidecar)
    return message1, message3, reference, recorded


# ──────────────────────────────────────────────
# 2. simulate / segment / profile
# ──────────────────────────────────────────────


def cmd_simulate(args: argparse.Namespace, settings: Settings) -> int:
    """生成 trials 对消息文件。"""
    factory = SessionFactory.from_settings(
        settings,
        environment=args.environment,
        tag_count=args.tag_count,
        noise_sigma=args.noise_sigma,
    )
    directory = Path(args.out)
    directory.mkdir(parents=True, exist_ok=True)
    codec = TraceCodec()
    tag_random = not args.fixed_order
    rows = []
    for index in range(args.trials):
        seed = derive_seed(args.seed, index)
        attacker = args.kind != _KIND_LEGITIMATE and (args.kind != _KIND_MIXED or index % 2 == 1)
        if not attacker:
            pair = factory.legitimate_pair(seed, movement=args.movement, tag_random=tag_random)
        elif args.kind == AttackerKind.ADVANCED.value or (
            args.kind == _KIND_MIXED and args.attacker == AttackerKind.ADVANCED.value
        ):
            pair = factory.advanced_attack_pair(
                seed, estimation_error=args.estimation_error, tag_random=tag_random
            )
        else:
            pair = factory.basic_attack_pair(seed, args.divergence, tag_random=tag_random)
        rows.append(write_pair(pair, directory, index, codec))
    write_jsonl(rows, directory / GENERATION_LOG)
    logger.info(f"已生成 {args.trials} 对消息到 {directory}")
    _emit({"pairs": args.trials, "directory": str(directory)})
    return 0


def cmd_segment(args: argparse.Namespace, settings: Settings) -> int:
    """对一条轨迹分段。"""
    trace = TraceCodec().read(Path(args.trace), with_label=False)
    pipeline = AuthenticationPipeline.from_settings(settings)
    match pipeline.segmenter.segment(trace):
        case Success(result):
            _emit(
                {
                    "trace": args.trace,
                    "start_index": result.segment.start_index,
                    "end_index": result.segment.end_index,
                    "eta1": result.decode.detect_start,
                    "eta2": result.decode.detect_end,
                    "eta3": result.variance_start,
                    "eta4": result.variance_end,
                    "bits": len(result.decode.bits),
                    "threshold": result.threshold,
                }
            )
            return 0
        case Failure(error):
            _emit({"trace": args.trace, "verdict": NO_BACKSCATTER, "reason": error.message})
            return 2
    return 1


def _pair_indices(directory: Path) -> list[int]:
    return sorted(
        int(path.name[len("pair_") : len("pair_") + 4]) for path in directory.glob("pair_*_m1.ssct")
    )


def cmd_profile(args: argparse.Namespace, settings: Settings) -> int:
    """把目录中的全部消息对转换为画像 CSV。"""
    directory = Path(args.pairs)
    pipeline = AuthenticationPipeline.from_settings(settings)
    codec = TraceCodec()
    profiles = []
    skipped = 0
    for index in _pair_indices(directory):
        m1, m3, sidecar = pair_paths(directory, index)
        reference, recorded = read_schedules(sidecar)
        result = pipeline.profile_pair(
            codec.read(m1, with_label=False),
            codec.read(m3, with_label=False),
            reference,
            recorded,
        )
        match result:
            case Success(profile):
                profiles.append(profile)
            case Failure(error):
                skipped += 1
                logger.warning(f"消息对 {index} 无法生成画像: {error.message}")
    if not profiles:
        _emit({"profiles": 0, "skipped": skipped})
        return 2
    write_profiles_csv(profiles, Path(args.out))
    _emit({"profiles": len(profiles), "skipped": skipped, "out": args.out})
    return 0


# ──────────────────────────────────────────────
# 3. train / detect / baseline
# ──────────────────────────────────────────────


def cmd_train(args: argparse.Namespace, settings: Settings) -> int:
    """用合法画像训练模型，可选在验证集上选择 ν。"""
    train = as_matrix(read_profiles_csv(Path(args.profiles)))
    gamma = args.gamma or settings.svm_gamma or median_gamma(train)
    trainer = OneClassSvmTrainer.from_settings(settings)
    nu = args.nu if args.nu is not None else settings.svm_nu
    selection = None
    if args.val_pos:
        val_neg = read_profiles_csv(Path(args.val_neg)) if args.val_neg else []
        selection = select_nu(
            train,
            read_profiles_csv(Path(args.val_pos)),
            val_neg,
            args.nu_grid,
            trainer=trainer,
            gamma=gamma,
            target_tp=args.target_tp,
        )
        nu = selection.nu
    model = trainer.train(train, nu=nu, gamma=gamma)
    ModelRepository().save(model, Path(args.out))
    record: dict[str, Any] = {
        "out": args.out,
        "nu": model.nu,
        "gamma": model.gamma,
        "rho": model.rho,
        "support_vectors": int(model.alphas.size),
        "training_size": model.training_size,
    }
    if selection is not None:
        record.update({"tp_rate": selection.tp_rate, "fp_rate": selection.fp_rate})
    _emit(record)
    return 0


def cmd_detect(args: argparse.Namespace, settings: Settings) -> int:
    """对一对消息判决；未检测到反向散射时给出显式的 no_backscatter 判决。"""
    codec = TraceCodec()
    message1, message3, reference, recorded = _load_pair(args, codec)
    model = ModelRepository().load(Path(args.model))
    pipeline = AuthenticationPipeline.from_settings(settings)
    match pipeline.authenticate(model, message1, message3, reference, recorded):
        case Success(decision):
            _emit({"verdict": decision.label.value, "score": decision.score})
            return 0
        case Failure(error):
            _emit(
                {
                    "verdict": NO_BACKSCATTER,
                    "role": getattr(error, "trace_role", ""),
                    "reason": error.message,
                }
            )
            return 2
    return 1


def cmd_baseline(args: argparse.Namespace, settings: Settings) -> int:
    """相关系数基线判决。"""
    codec = TraceCodec()
    message1, message3, reference, recorded = _load_pair(args, codec)
    pipeline = AuthenticationPipeline.from_settings(settings)
    if args.threshold is not None:
        pipeline.correlation_threshold = args.threshold
    match pipeline.correlate(message1, message3, reference, recorded):
        case Success(correlation):
            label = pipeline.baseline_label(correlation)
            _emit(
                {
                    "verdict": label.value,
                    "correlation": correlation,
                    "threshold": pipeline.correlation_threshold,
                }
            )
            return 0
        case Failure(error):
            _emit({"verdict": "undefined", "reason": error.message})
            return 2
    return 1


# ──────────────────────────────────────────────
# 4. experiment / report / scenario
# ──────────────────────────────────────────────


def _grid_value(text: str) -> float | str:
    try:
        return float(text)
    except ValueError:
        return text


def load_experiment_config(args: argparse.Namespace, settings: Settings) -> ExperimentConfig:
    """读取实验配置文件并用命令行参数覆盖。

    Raises:
        ExperimentConfigError: 配置非法或扫描轴与网格不匹配
    """
    data: dict[str, Any] = {"seed": settings.master_seed, "workers": settings.experiment_workers}
    if args.config:
        try:
            data.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
        except (OSError, ValueError) as e:
            raise ExperimentConfigError(f"无法读取实验配置 {args.config}: {e}") from e
    overrides = {
        "axis": args.axis,
        "grid": [_grid_value(v) for v in args.grid] if args.grid else None,
        "repetitions": args.repetitions,
        "seed": args.seed,
        "workers": args.workers,
        "output_path": args.output,
        "attacker_kind": args.attacker,
        "test_legitimate": args.test_legitimate,
        "test_attackers": args.test_attackers,
        "training_size": args.training_size,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ExperimentConfigError(f"实验配置非法: {e}") from e


def cmd_experiment(args: argparse.Namespace, settings: Settings) -> int:
    """运行参数扫描并写出指标 CSV 与运行清单。"""
    config = load_experiment_config(args, settings)
    records, manifest = ExperimentRunner(settings).run(config)
    path = Path(config.output_path)
    write_metrics_csv(records, path)
    append_manifest(manifest, path.with_suffix(".manifest.jsonl"))
    _emit({"run_id": manifest.run_id, "records": len(records), "out": str(path)})
    return 0


def cmd_report(args: argparse.Namespace, settings: Settings) -> int:
    """汇总指标 CSV，可选绘图。"""
    rows = aggregate(read_metrics_csv(Path(args.metrics)))
    print(format_table(rows))
    if args.plot:
        render_plot(rows, Path(args.plot))
    return 0


def cmd_scenario(args: argparse.Namespace, settings: Settings) -> int:
    """执行攻击场景脚本并输出汇总记录。"""
    script = load_script(Path(args.script))
    if args.without_attacker:
        script = script.without_attacker()
    if args.model:
        script = script.model_copy(update={"model_path": Path(args.model)})
    result = ScenarioRunner(settings).run(script)
    _emit(summary_record(result))
    return 0 if result.matches_expectation else 3


# ──────────────────────────────────────────────
# 5. 参数解析
# ──────────────────────────────────────────────


def _add_pair_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("message1", help="消息 1 的 SSCT 文件")
    parser.add_argument("message3", help="消息 3 的 SSCT 文件")
    parser.add_argument("--schedule", help="调度记录 JSON（默认与消息 1 同名的 pair_NNNN.json）")


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shield-scatter",
        description="基于环境反向散射多径签名的物理层认证仿真与评估",
    )
    parser.add_argument("--log-level", help="覆盖配置中的日志级别")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="生成消息对 SSCT 文件")
    simulate.add_argument("--trials", type=int, default=10, help="消息对数量（默认 10）")
    simulate.add_argument("--out", default=str(Path(settings.output_dir) / "pairs"))
    simulate.add_argument(
        "--kind",
        choices=[
            _KIND_LEGITIMATE,
            _KIND_MIXED,
            AttackerKind.BASIC.value,
            AttackerKind.ADVANCED.value,
        ],
        default=_KIND_MIXED,
        help="消息 3 的发送者；mixed 为合法/攻击交替",
    )
    simulate.add_argument(
        "--attacker", choices=[k.value for k in AttackerKind], default=AttackerKind.BASIC.value
    )
    simulate.add_argument("--divergence", type=float, default=0.25)
    simulate.add_argument("--estimation-error", type=float, default=0.0)
    simulate.add_argument("--movement", type=float, default=0.0)
    simulate.add_argument("--environment", default="laboratory")
    simulate.add_argument("--tag-count", type=int, default=settings.tag_count)
    simulate.add_argument("--noise-sigma", type=float, default=settings.noise_sigma)
    simulate.add_argument("--fixed-order", action="store_true", help="关闭标签随机化")
    simulate.add_argument("--seed", type=int, default=settings.master_seed)
    simulate.set_defaults(handler=cmd_simulate)

    segment = sub.add_parser("segment", help="对单条轨迹分段")
    segment.add_argument("trace")
    segment.set_defaults(handler=cmd_segment)

    profile = sub.add_parser("profile", help="把消息对目录转换为画像 CSV")
    profile.add_argument("pairs", help="simulate 生成的目录")
    profile.add_argument("--out", required=True)
    profile.set_defaults(handler=cmd_profile)

    train = sub.add_parser("train", help="训练单类 SVM")
    train.add_argument("profiles", help="合法画像 CSV")
    train.add_argument("--out", required=True, help="模型 JSON")
    train.add_argument("--nu", type=float)
    train.add_argument("--gamma", type=float)
    train.add_argument("--val-pos", help="合法验证画像 CSV（启用 ν 选择）")
    train.add_argument("--val-neg", help="攻击验证画像 CSV")
    train.add_argument("--target-tp", type=float, help="无攻击验证样本时的目标 TP 率")
    train.add_argument("--nu-grid", type=float, nargs="+", default=list(DEFAULT_NU_GRID))
    train.set_defaults(handler=cmd_train)

    detect = sub.add_parser("detect", help="对一对消息判决")
    _add_pair_arguments(detect)
    detect.add_argument("--model", required=True)
    detect.set_defaults(handler=cmd_detect)

    baseline = sub.add_parser("baseline", help="相关系数基线判决")
    _add_pair_arguments(baseline)
    baseline.add_argument("--threshold", type=float)
    baseline.set_defaults(handler=cmd_baseline)

    experiment = sub.add_parser("experiment", help="运行参数扫描")
    experiment.add_argument("--config", help="实验配置 JSON")
    experiment.add_argument("--axis", choices=[a.value for a in SweepAxis])
    experiment.add_argument("--grid", nargs="+")
    experiment.add_argument("--repetitions", type=int)
    experiment.add_argument("--seed", type=int)
    experiment.add_argument("--workers", type=int)
    experiment.add_argument("--output")
    experiment.add_argument("--attacker", choices=[k.value for k in AttackerKind])
    experiment.add_argument("--test-legitimate", type=int)
    experiment.add_argument("--test-attackers", type=int)
    experiment.add_argument("--training-size", type=int)
    experiment.set_defaults(handler=cmd_experiment)

    report = sub.add_parser("report", help="汇总指标 CSV")
    report.add_argument("metrics")
    report.add_argument("--plot", help="输出 PNG 路径")
    report.set_defaults(handler=cmd_report)

    scenario = sub.add_parser("scenario", help="执行攻击场景脚本")
    scenario.add_argument("script")
    scenario.add_argument("--without-attacker", action="store_true", help="去掉攻击者作对照")
    scenario.add_argument("--model", help="预训练模型 JSON")
    scenario.set_defaults(handler=cmd_scenario)

    return parser


def dispatch(args: argparse.Namespace, settings: Settings) -> int:
    """分派到子命令；领域错误转换为退出码 1。"""
    try:
        return args.handler(args, settings)
    except ShieldScatterError as e:
        logger.error(f"{args.command} 失败: {e.message}")
        print(
            json.dumps({"error": type(e).__name__, "message": e.message}, ensure_ascii=False),
            file=sys.stderr,
        )
        return 1


def generation_actors(directory: Path) -> dict[int, OriginLabel]:
    """从生成日志读取每对消息的实际发送者（只供评分与核对使用）。"""
    return {
        int(row["pair"]): OriginLabel(int(row["label"]))
        for row in read_jsonl(directory / GENERATION_LOG)
    }
