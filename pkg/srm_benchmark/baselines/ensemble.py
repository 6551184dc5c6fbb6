import numpy as np

from srm_benchmark.baselines.penalty import infer_penalty_net, train_penalty_net
from srm_benchmark.errors import InvalidArgumentError


def train_ensemble(dataset, config, penalty_config, rng=None):
    """Train penalty_config.ensemble_size penalty nets from independent streams of rng."""
    rng = np.random.default_rng(config.seed) if rng is None else rng
    streams = rng.spawn(penalty_config.ensemble_size)
    return [train_penalty_net(dataset, config, penalty_config, stream)[0] for stream in streams]


def ensemble_select(models, channels):
    """
    Per sample, the highest sum-rate candidate among the members' post-fallback outputs.
    Ties keep the earliest member.

    Returns:
        float[][]: (M, K) selected powers
        float[]: their sum rates
        int[]: the member chosen for every sample
    """
    if len(models) == 0:
        raise InvalidArgumentError("the ensemble needs at least one model")
    outputs = [infer_penalty_net(model, channels, fallback=True) for model in models]
    rates = np.stack([out.sum_rates for out in outputs])
    chosen = np.argmax(rates, axis=0)
    samples = np.arange(rates.shape[1])
    powers = np.stack([out.powers for out in outputs])[chosen, samples]
    return powers, rates[chosen, samples], chosen
