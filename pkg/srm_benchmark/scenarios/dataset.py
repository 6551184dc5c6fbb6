"""
Feasibility-filtered datasets and their CSV persistence.

File layout::

    K,rho_min,rho_max,rate_spec,seed,count,sigma2_dBm,pmax_dBm
    3,0,3,0.1,7,1000,-92,46
    <K*K normalised gains row-major>,<K gamma_min>       (one line per sample)

Every draw uses its own random stream derived from (seed, draw index), so a dataset does not
depend on how the draws are spread over worker processes.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from srm_benchmark.errors import (DatasetParseError, DatasetSchemaError, DegenerateGeometryError,
                                  InvalidArgumentError, SingularGeometryError, YieldTooLowError)
from srm_benchmark.geometry.batch import ConstraintBatch
from srm_benchmark.geometry.constraints import build_constraints
from srm_benchmark.scenarios.channel import ChannelRealization, dbm_to_watts, sample_channel
from srm_benchmark.scenarios.layout import NetworkLayout
from srm_benchmark.spaces import ChoiceSpace

logger = logging.getLogger(__name__)

HEADER = ("K", "rho_min", "rho_max", "rate_spec", "seed", "count", "sigma2_dBm", "pmax_dBm")
DRAWS_PER_TASK = 512
# 17 significant digits make the text round trip exact
FLOAT_FORMAT = "%.17g"
# yield is only judged once this many feasible draws would have been expected
YIELD_EVIDENCE = 10


@dataclass(frozen=True)
class DatasetMeta:
    K: int
    rho_min: float
    rho_max: float
    rate_spec: str
    seed: int
    count: int
    sigma2_dbm: float
    pmax_dbm: float
    attempts: int = 0
    infeasible: int = 0
    degenerate: int = 0
    distance_unit: str = "m"

    @property
    def rejection_rate(self):
        if self.attempts == 0:
            return 0.0
        return (self.attempts - self.count) / self.attempts

    @property
    def p_max(self):
        return dbm_to_watts(self.pmax_dbm)


@dataclass(eq=False)
class Dataset:
    samples: list
    meta: DatasetMeta
    constraints: list = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.samples) != self.meta.count:
            raise InvalidArgumentError(f"meta says {self.meta.count} samples, got {len(self.samples)}")
        if self.constraints is None:
            self.constraints = [build_constraints(ch) for ch in self.samples]
        self._batch = None

    def __len__(self):
        return len(self.samples)

    @property
    def size(self):
        return self.meta.K

    def constraint_batch(self):
        if self._batch is None:
            self._batch = ConstraintBatch.from_sets(self.constraints)
        return self._batch

    def take(self, indices):
        indices = [int(i) for i in indices]
        return Dataset(samples=[self.samples[i] for i in indices],
                       meta=replace(self.meta, count=len(indices)),
                       constraints=[self.constraints[i] for i in indices])

    def split(self, fraction, rng):
        """Random (train, validation) split with round(fraction * n) validation samples."""
        order = rng.permutation(len(self))
        cut = int(round(fraction * len(self)))
        return self.take(order[cut:]), self.take(order[:cut])

    def gains(self):
        return np.stack([ch.gains for ch in self.samples])

    def gamma_min(self):
        return np.stack([ch.gamma_min for ch in self.samples])

    def noise(self):
        return np.array([ch.noise_power for ch in self.samples])


def draw_stream(seed, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def rate_spec_of(config):
    if str(config.rate) == "random":
        return ChoiceSpace(config.rate_grid)
    return float(config.rate)


def _draw(config, seed, index):
    """One draw: returns (status, channel, constraints)."""
    layout = NetworkLayout(config.cell_count, config.cell_radius)
    ch = sample_channel(layout, (config.rho_min, config.rho_max), rate_spec_of(config), draw_stream(seed, index),
                        pmax_dbm=config.pmax_dbm, sigma2_dbm=config.sigma2_dbm,
                        shadowing_std_db=config.shadowing_std_db, attempt_cap=config.attempt_cap)
    try:
        cs = build_constraints(ch)
    except (DegenerateGeometryError, SingularGeometryError):
        return "degenerate", None, None
    if not cs.feasible:
        return "infeasible", None, None
    return "feasible", ch, cs


def _draw_range(args):
    config, seed, start, stop = args
    return [_draw(config, seed, index) for index in range(start, stop)]


def _tasks(config, seed, start):
    while True:
        yield config, seed, start, start + DRAWS_PER_TASK
        start += DRAWS_PER_TASK


def generate_dataset(config, count=None, seed=None, workers=1):
    """
    Draw samples until `count` feasible ones are collected.

    Parameters:
        config(ScenarioConfig): region, rate spec and radio constants
        count(int): number of feasible samples, defaults to config.count
        seed(int|np.random.Generator): base seed, defaults to config.seed; a generator is
        turned into a base seed by drawing from it
        workers(int): processes used to draw, the result does not depend on it

    Returns:
        Dataset: the feasible samples, in draw order
    """
    count = config.count if count is None else int(count)
    seed = config.seed if seed is None else seed
    if isinstance(seed, np.random.Generator):
        seed = int(seed.integers(0, 2**63 - 1))
    if count < 0:
        raise InvalidArgumentError("count can't be negative")
    samples, constraints = [], []
    attempts = infeasible = degenerate = 0
    evidence = math.ceil(YIELD_EVIDENCE / config.yield_floor)

    def consume(results):
        nonlocal attempts, infeasible, degenerate
        for status, ch, cs in results:
            if len(samples) == count:
                return True
            attempts += 1
            if status == "feasible":
                samples.append(ch)
                constraints.append(cs)
            elif status == "infeasible":
                infeasible += 1
            else:
                degenerate += 1
        if len(samples) == count:
            return True
        if attempts >= evidence and len(samples) < config.yield_floor * attempts:
            raise YieldTooLowError(len(samples), attempts, config.yield_floor)
        return False

    if count > 0:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                tasks = _tasks(config, seed, 0)
                pending = [pool.submit(_draw_range, next(tasks)) for _ in range(workers * 2)]
                while True:
                    results = pending.pop(0).result()
                    if consume(results):
                        for future in pending:
                            future.cancel()
                        break
                    pending.append(pool.submit(_draw_range, next(tasks)))
        else:
            for task in _tasks(config, seed, 0):
                if consume(_draw_range(task)):
                    break

    meta = DatasetMeta(K=config.cell_count, rho_min=float(config.rho_min), rho_max=float(config.rho_max),
                       rate_spec=str(config.rate), seed=int(seed), count=count,
                       sigma2_dbm=float(config.sigma2_dbm), pmax_dbm=float(config.pmax_dbm),
                       attempts=attempts, infeasible=infeasible, degenerate=degenerate)
    logger.info("generated %d samples from %d draws (rejection rate %.4f, %d degenerate)",
                count, attempts, meta.rejection_rate, degenerate)
    return Dataset(samples=samples, meta=meta, constraints=constraints)


def save_dataset(dataset, path):
    meta = dataset.meta
    header = pd.DataFrame([[meta.K, meta.rho_min, meta.rho_max, meta.rate_spec, meta.seed, meta.count,
                            meta.sigma2_dbm, meta.pmax_dbm]], columns=list(HEADER))
    with open(path, "w", newline="") as fh:
        header.to_csv(fh, index=False, float_format=FLOAT_FORMAT)
        if dataset.samples:
            body = pd.DataFrame([np.concatenate([ch.gains.ravel(), ch.gamma_min]) for ch in dataset.samples])
            body.to_csv(fh, index=False, header=False, float_format=FLOAT_FORMAT)


def _parse_meta(head):
    if len(head) == 0:
        raise DatasetParseError("missing header values", line=2)
    if head.iloc[0].isna().any():
        raise DatasetSchemaError(f"expected {len(HEADER)} header values", line=2)
    row = head.iloc[0]
    try:
        return DatasetMeta(K=int(row["K"]), rho_min=float(row["rho_min"]), rho_max=float(row["rho_max"]),
                           rate_spec=row["rate_spec"], seed=int(row["seed"]), count=int(row["count"]),
                           sigma2_dbm=float(row["sigma2_dBm"]), pmax_dbm=float(row["pmax_dBm"]))
    except ValueError as e:
        raise DatasetParseError(f"bad header value: {e}", line=2) from e


def _read_records(path, width):
    """The sample lines as an (n, width) float array; fields are read as text first so a bad one keeps its line."""
    try:
        body = pd.read_csv(path, skiprows=2, header=None, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        return np.zeros((0, width))
    except pd.errors.ParserError as e:
        raise DatasetSchemaError(f"ragged sample lines: {e}") from e
    if body.shape[1] != width:
        raise DatasetSchemaError(f"expected {width} values per sample, got {body.shape[1]}", line=3)
    short = np.flatnonzero(body.isna().any(axis=1).to_numpy())
    if short.size:
        raise DatasetSchemaError(f"expected {width} values per sample", line=int(short[0]) + 3)
    try:
        return body.to_numpy(dtype=float)
    except ValueError as e:
        bad = np.flatnonzero(body.apply(pd.to_numeric, errors="coerce").isna().any(axis=1).to_numpy())
        raise DatasetParseError(f"bad number: {e}", line=int(bad[0]) + 3 if bad.size else None) from e


def load_dataset(path):
    try:
        head = pd.read_csv(path, nrows=1, dtype=str, keep_default_na=False, index_col=False)
    except pd.errors.EmptyDataError as e:
        raise DatasetSchemaError(f"expected header {','.join(HEADER)}", line=1) from e
    if tuple(head.columns) != HEADER:
        raise DatasetSchemaError(f"expected header {','.join(HEADER)}", line=1)
    meta = _parse_meta(head)
    size = meta.K
    if size < 1:
        raise DatasetSchemaError("K has to be positive", line=2)
    values = _read_records(path, size * size + size)
    if len(values) != meta.count:
        raise DatasetParseError(f"expected {meta.count} records, found {len(values)}", line=len(values) + 3)
    nonfinite = np.flatnonzero(~np.isfinite(values).all(axis=1))
    if nonfinite.size:
        raise DatasetParseError("non-finite value", line=int(nonfinite[0]) + 3)
    p_max = meta.p_max
    samples = []
    for offset, record in enumerate(values):
        try:
            ch = ChannelRealization(gains=record[:size * size].reshape(size, size),
                                    gamma_min=record[size * size:], noise_power=1.0, p_max=p_max)
        except InvalidArgumentError as e:
            raise DatasetParseError(str(e), line=offset + 3) from e
        samples.append(ch)
    dataset = Dataset(samples=samples, meta=meta)
    for offset, cs in enumerate(dataset.constraints):
        if not cs.feasible:
            raise DatasetParseError("stored sample is infeasible", line=offset + 3)
    return dataset
