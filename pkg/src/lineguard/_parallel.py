"""Order-preserving map that honours LINEGUARD_THREADS (0 = auto)."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def workers() -> int:
    try:
        n = int(os.environ.get("LINEGUARD_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def pmap(fn, items, chunksize: int = 1):
    items = list(items)
    n = min(workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items, chunksize=chunksize))
