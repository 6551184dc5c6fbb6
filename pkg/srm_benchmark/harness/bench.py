"""
Per-instance solve time of every method, single worker, after one warm-up pass.
Timing covers featurisation, the forward pass and the projection; loading does not count.
"""
import logging

import numpy as np
import pandas as pd

from srm_benchmark.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

COLUMNS = ("method", "instances", "repeats", "mean_time_us", "std_time_us")


def bench(dataset, methods, repeats=3, seed=0):
    """
    Returns:
        list[dict]: one row per method with the mean per-instance time over the repeats
    """
    if repeats < 1:
        raise InvalidArgumentError("repeats has to be at least 1")
    if len(dataset) == 0:
        raise InvalidArgumentError("the test set is empty")
    rows = []
    for method in methods:
        method.run(dataset, seed=seed, workers=1)
        means = [method.run(dataset, seed=seed, workers=1).times_us.mean() for _ in range(repeats)]
        rows.append({"method": method.name, "instances": len(dataset), "repeats": repeats,
                     "mean_time_us": float(np.mean(means)), "std_time_us": float(np.std(means))})
        logger.info("%s: %.1f us per instance", method.name, rows[-1]["mean_time_us"])
    return rows


def write_bench(rows, fh):
    pd.DataFrame(rows, columns=list(COLUMNS)).to_csv(fh, index=False)
