from concurrent.futures import ProcessPoolExecutor

from srm_benchmark.config import worker_count


def ordered_map(fn, items, workers=None):
    """map over items, in a process pool when more than one worker is asked for; order is kept."""
    workers = worker_count() if workers is None else workers
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
