"""近似等分。"""


def chunk_bounds(length: int, chunks: int) -> list[tuple[int, int]]:
    """把长度 length 近似等分为 chunks 段。

    前 (length mod chunks) 段多一个元素，各段长度相差不超过 1。

    Returns:
        list[tuple[int, int]]: 每段的 [start, stop)
    """
    if chunks < 1 or length < chunks:
        raise ValueError(f"无法把长度 {length} 分成 {chunks} 段")
    base, extra = divmod(length, chunks)
    bounds = []
    start = 0
    for k in range(chunks):
        stop = start + base + (1 if k < extra else 0)
        bounds.append((start, stop))
        start = stop
    return bounds
