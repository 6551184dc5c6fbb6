import logging
from dataclasses import dataclass

import numpy as np

from srm_benchmark.errors import DivergedError, InvalidArgumentError
from srm_benchmark.geometry.batch import ConstraintBatch
from srm_benchmark.geometry.constraints import build_constraints
from srm_benchmark.geometry.rates import rates_arrays
from srm_benchmark.scenarios.dataset import Dataset
from srm_benchmark.srnet.features import compute_stats, featurize_arrays
from srm_benchmark.srnet.network import forward, srnet_step
from srm_benchmark.srnet.optim import AdamState, adam_step

logger = logging.getLogger(__name__)

INFER_CHUNK = 4096


@dataclass(eq=False)
class TrainingData:
    """Stacked arrays of a dataset, ready for mini-batching."""
    x: np.ndarray
    gains: np.ndarray
    noise: np.ndarray
    gamma_min: np.ndarray
    batch: ConstraintBatch

    def __len__(self):
        return self.x.shape[0]

    def take(self, indices):
        return TrainingData(x=self.x[indices], gains=self.gains[indices], noise=self.noise[indices],
                            gamma_min=self.gamma_min[indices], batch=self.batch.take(indices))


def prepare(model, channels):
    """
    Stack channels (a Dataset or a list of ChannelRealization) with the model's feature stats.
    Infeasible channels are rejected with InfeasibleInstanceError.
    """
    if isinstance(channels, Dataset):
        samples, sets = channels.samples, channels.constraints
    else:
        samples = list(channels)
        sets = [build_constraints(ch) for ch in samples]
    if not samples:
        raise InvalidArgumentError("no channels to stack")
    gains = np.stack([ch.gains for ch in samples])
    gamma_min = np.stack([ch.gamma_min for ch in samples])
    return TrainingData(x=featurize_arrays(gains, gamma_min, model.feature_stats), gains=gains,
                        noise=np.array([ch.noise_power for ch in samples]), gamma_min=gamma_min,
                        batch=ConstraintBatch.from_sets(sets))


def projection_step(model, data):
    return srnet_step(model, data.x, data.batch, data.gains, data.noise)


def train(model, dataset, config, rng=None, step=projection_step):
    """
    Mini-batch Adam training, batches drawn with replacement.

    Parameters:
        model(MlpModel): the model to train in place
        dataset(Dataset): feasible training samples
        config(TrainConfig): iterations, batch size and Adam constants
        rng(np.random.Generator): batch sampler, defaults to one seeded with config.seed
        step(callable): (model, TrainingData) -> (loss, grads), the projection loss by default

    Returns:
        MlpModel: the trained model in eval mode
        float[]: the loss of every step
    """
    if len(dataset) == 0:
        raise InvalidArgumentError("can't train on an empty dataset")
    rng = np.random.default_rng(config.seed) if rng is None else rng
    if model.feature_stats is None:
        model.feature_stats = compute_stats(dataset.gains())
    data = prepare(model, dataset)
    model.train()
    state = AdamState()
    trace = np.zeros(config.iterations)
    for iteration in range(config.iterations):
        indices = rng.integers(0, len(data), config.batch_size)
        value, grads = step(model, data.take(indices))
        if not np.isfinite(value) or not all(np.all(np.isfinite(g)) for g in grads.values()):
            raise DivergedError(iteration, value)
        adam_step(model.params, grads, state, config)
        trace[iteration] = value
        if config.log_every and (iteration + 1) % config.log_every == 0:
            window = trace[iteration + 1 - config.log_every:iteration + 1]
            logger.info("step %d/%d: mean loss %.6f", iteration + 1, config.iterations, window.mean())
    model.eval()
    return model, trace


def infer(model, channels):
    """
    Feasible powers for every channel, whatever the state of the model.

    Parameters:
        model(MlpModel): an srnet or srnet-heu model
        channels(Dataset|ChannelRealization[]): feasible instances

    Returns:
        float[][]: (M, K) projected powers
        float[]: sum rate of every sample
    """
    model.eval()
    data = prepare(model, channels)
    powers = []
    for start in range(0, len(data), INFER_CHUNK):
        chunk = data.take(np.arange(start, min(start + INFER_CHUNK, len(data))))
        powers.append(forward(model, chunk.x, chunk.batch, update_stats=False).p_E)
    powers = np.concatenate(powers)
    return powers, rates_arrays(data.gains, data.noise, powers).sum(axis=1)
