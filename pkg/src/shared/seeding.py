"""随机数种子派生。"""

import numpy as np


def derive_rng(*keys: int) -> np.random.Generator:
    """由整数键序列派生独立的随机数生成器。

    相同的键序列在任何平台上都产生相同的随机流。

    Args:
        keys: 非负整数键，例如 (主种子, 重复序号, 试验序号, 用途)

    Returns:
        np.random.Generator: 新的生成器
    """
    return np.random.default_rng([int(k) for k in keys])


def derive_seed(*keys: int) -> int:
    """由整数键序列派生 64 位种子。"""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1, np.uint64)[0])
