"""实验结果读写。

指标 CSV 每行一个 (网格点, 重复, 方法)，列顺序固定，浮点数以最短精确表示写出，
同一主种子的两次运行产生逐字节一致的文件。运行清单与生成日志为 JSON Lines。
"""

import csv
import json
import logging
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from src.harness.domain.models import MetricsRecord, RunManifest
from src.shared.errors import ExperimentConfigError

logger = logging.getLogger(__name__)

METRICS_COLUMNS = [
    "axis",
    "value",
    "repetition",
    "method",
    "nu",
    "tp_rate",
    "fp_rate",
    "legit_trials",
    "attacker_trials",
    "legit_no_backscatter",
    "attacker_no_backscatter",
    "seed",
]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def write_metrics_csv(records: Iterable[MetricsRecord], path: Path) -> int:
    """写出指标 CSV，返回写入的行数。"""
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(METRICS_COLUMNS)
        for record in records:
            writer.writerow([_cell(getattr(record, column)) for column in METRICS_COLUMNS])
            count += 1
    logger.info(f"写入指标 {path}（{count} 行）")
    return count


def read_metrics_csv(path: Path) -> list[MetricsRecord]:
    """读取指标 CSV。

    Raises:
        ExperimentConfigError: 文件缺列或内容非法
    """
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            missing = set(METRICS_COLUMNS) - set(reader.fieldnames or [])
            if missing:
                raise ExperimentConfigError(f"指标文件 {path} 缺少列: {sorted(missing)}")
            return [
                MetricsRecord.model_validate({k: (v if v != "" else None) for k, v in row.items()})
                for row in reader
            ]
    except OSError as e:
        raise ExperimentConfigError(f"无法读取指标文件 {path}: {e}") from e
    except ValidationError as e:
        raise ExperimentConfigError(f"指标文件 {path} 内容非法: {e}") from e


def append_manifest(manifest: RunManifest, path: Path) -> None:
    """把运行清单追加为 JSON Lines 中的一行。"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as handle:
        handle.write(manifest.model_dump_json() + "\n")


def write_jsonl(rows: Iterable[dict[str, Any]], path: Path) -> None:
    """写出 JSON Lines（键按插入顺序，保证输出稳定）。"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_jsonl(path: Path) -> list[dict[str, Any]]:
    with path.open(encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]
