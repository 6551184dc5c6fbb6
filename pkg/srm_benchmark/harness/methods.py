"""
Methods the harness can run on a test set. Every method turns a Dataset into raw powers (before
any fallback), final powers and per-instance solve times in microseconds.

Method specs on the command line:
    p0                       the base power B^-1 q
    local-opt                multi-start projected gradient
    ensemble:a.ckpt,b.ckpt   best-of penalty nets
    <path>                   a checkpoint, its variant decides how it is run
"""
import time
from dataclasses import dataclass

import numpy as np

from srm_benchmark.baselines.ensemble import ensemble_select
from srm_benchmark.baselines.local_opt import multistart_local_opt
from srm_benchmark.baselines.penalty import infer_penalty_net
from srm_benchmark.config import LocalOptConfig
from srm_benchmark.harness.workers import ordered_map
from srm_benchmark.srnet.checkpoint import load_model
from srm_benchmark.srnet.train import infer


@dataclass(frozen=True, eq=False)
class MethodOutput:
    raw: np.ndarray
    powers: np.ndarray
    times_us: np.ndarray


def _timed(fn, count):
    start = time.perf_counter()
    result = fn()
    elapsed = (time.perf_counter() - start) * 1e6
    return result, np.full(count, elapsed / max(count, 1))


class Method:
    name = None

    def run(self, dataset, seed=0, workers=None):
        raise NotImplementedError("run function is not implemented")


class BasePowerMethod(Method):
    name = "p0"

    def run(self, dataset, seed=0, workers=None):
        powers, times = _timed(lambda: np.stack([cs.p0 for cs in dataset.constraints]), len(dataset))
        return MethodOutput(raw=powers, powers=powers, times_us=times)


def _local_opt_one(args):
    cs, ch, config, seed, index = args
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    start = time.perf_counter()
    result = multistart_local_opt(cs, ch, rng=rng, config=config)
    return result.p, (time.perf_counter() - start) * 1e6


class LocalOptMethod(Method):
    name = "local-opt"

    def __init__(self, config=None):
        self._config = LocalOptConfig() if config is None else config

    def run(self, dataset, seed=0, workers=None):
        tasks = [(cs, ch, self._config, seed, i) for i, (cs, ch) in enumerate(zip(dataset.constraints, dataset.samples))]
        results = ordered_map(_local_opt_one, tasks, workers)
        powers = np.stack([p for p, _ in results])
        return MethodOutput(raw=powers, powers=powers, times_us=np.array([t for _, t in results]))


class CheckpointMethod(Method):
    def __init__(self, path, model=None):
        self.name = path
        self._model = load_model(path) if model is None else model

    @property
    def model(self):
        return self._model

    def run(self, dataset, seed=0, workers=None):
        if self._model.variant.startswith("penalty"):
            out, times = _timed(lambda: infer_penalty_net(self._model, dataset, fallback=True), len(dataset))
            return MethodOutput(raw=out.raw, powers=out.powers, times_us=times)
        (powers, _), times = _timed(lambda: infer(self._model, dataset), len(dataset))
        return MethodOutput(raw=powers, powers=powers, times_us=times)


class EnsembleMethod(Method):
    def __init__(self, paths, models=None):
        self.name = "ensemble:" + ",".join(paths)
        self._models = [load_model(p) for p in paths] if models is None else models

    def run(self, dataset, seed=0, workers=None):
        (powers, _, chosen), times = _timed(lambda: ensemble_select(self._models, dataset), len(dataset))
        raws = np.stack([infer_penalty_net(m, dataset, fallback=False).raw for m in self._models])
        raw = raws[chosen, np.arange(len(dataset))]
        return MethodOutput(raw=raw, powers=powers, times_us=times)


def resolve_method(name, local_config=None):
    if name == "p0":
        return BasePowerMethod()
    if name == "local-opt":
        return LocalOptMethod(local_config)
    if name.startswith("ensemble:"):
        return EnsembleMethod([p for p in name[len("ensemble:"):].split(",") if p])
    return CheckpointMethod(name)
