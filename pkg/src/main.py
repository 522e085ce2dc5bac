"""命令行入口。"""

import logging
from pathlib import Path

from src.config import get_settings
from src.harness.commands import build_parser, dispatch
from src.monitoring.metrics import write_metrics_textfile

logger = logging.getLogger(__name__)


def main(argv: list[str] | None = None) -> int:
    """主函数。

    Args:
        argv: 命令行参数，默认取 sys.argv

    Returns:
        int: 进程退出码
    """
    settings = get_settings()
    args = build_parser(settings).parse_args(argv)

    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    code = dispatch(args, settings)

    if settings.metrics_textfile:
        write_metrics_textfile(Path(settings.metrics_textfile))
        logger.info(f"指标已写入 {settings.metrics_textfile}")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
