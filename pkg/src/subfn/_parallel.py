import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    """Number of worker threads, capped by ``SUBFN_THREADS`` (0 or unset = auto)."""
    try:
        requested = int(os.environ.get("SUBFN_THREADS", "0"))
    except ValueError:
        requested = 0
    if requested > 0:
        return requested
    return min(8, os.cpu_count() or 1)


def ordered_map(fn, items):
    """Map ``fn`` over ``items``; results come back in input order."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
