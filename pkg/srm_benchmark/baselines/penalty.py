"""
Projection-free networks trained with a constraint-violation penalty, with a fallback to the
base power B^-1 q whenever an output misses a rate requirement.

The violation of one sample is V = sum_i max(0, gamma_i,min - SINR_i) in the SINR domain or
sum_i max(0, r_i,min - r_i) in the rate domain. With R the sample's sum rate the per-sample
loss is -R + w V (additive) or -R / (1 + w V) (multiplicative).
"""
import logging
from dataclasses import dataclass, replace

import numpy as np

from srm_benchmark.errors import InvalidArgumentError
from srm_benchmark.geometry.rates import LN2, rates_arrays, sinr_arrays, sinr_vjp
from srm_benchmark.srnet.model import init_model
from srm_benchmark.srnet.network import scaled_sigmoid
from srm_benchmark.srnet.train import prepare, train

logger = logging.getLogger(__name__)

MODES = {"additive": "penalty-add", "multiplicative": "penalty-mul"}


def violation(gamma, gamma_min, domain="sinr"):
    """Per-sample violation and its derivative with respect to the SINRs."""
    if domain == "sinr":
        shortfall = gamma_min - gamma
        return np.maximum(shortfall, 0.0).sum(axis=-1), -(shortfall > 0).astype(float)
    rate = np.log2(1.0 + gamma)
    shortfall = np.log2(1.0 + gamma_min) - rate
    return np.maximum(shortfall, 0.0).sum(axis=-1), -(shortfall > 0).astype(float) / (LN2 * (1.0 + gamma))


def penalty_loss(gains, noise, gamma_min, p, weight, mode="additive", domain="sinr"):
    """
    Mean penalised loss over the batch and its gradient with respect to the powers.

    Returns:
        float: the loss
        float[][]: (M, K) dLoss/dp
    """
    gamma = sinr_arrays(gains, noise, p)
    rate_sum = np.log2(1.0 + gamma).sum(axis=-1)
    shortfall, d_shortfall = violation(gamma, gamma_min, domain)
    d_rate = 1.0 / (LN2 * (1.0 + gamma))
    if mode == "additive":
        values = -rate_sum + weight * shortfall
        v = -d_rate + weight * d_shortfall
    elif mode == "multiplicative":
        factor = 1.0 + weight * shortfall
        values = -rate_sum / factor
        v = -d_rate / factor[:, None] + (rate_sum * weight / factor**2)[:, None] * d_shortfall
    else:
        raise InvalidArgumentError(f"unknown penalty mode {mode!r}")
    count = p.shape[0]
    return float(values.mean()), sinr_vjp(gains, noise, p, v) / count


def penalty_powers(model, x, p_max, update_stats=True):
    out, cache = model.forward(x, update_stats)
    p, s = scaled_sigmoid(out, p_max)
    return p, s, cache


def penalty_step(penalty_config):
    def step(model, data):
        p, s, cache = penalty_powers(model, data.x, data.batch.p_max)
        value, grad_p = penalty_loss(data.gains, data.noise, data.gamma_min, p, penalty_config.weight,
                                     penalty_config.mode, penalty_config.domain)
        d_out = grad_p * data.batch.p_max[:, None] * s * (1 - s)
        return value, model.backward(cache, d_out)
    return step


def train_penalty_net(dataset, config, penalty_config, rng=None):
    """
    Train the MLP body with a power-only head on the penalised sum-rate loss.

    Parameters:
        dataset(Dataset): feasible training samples
        config(TrainConfig): network and optimiser settings
        penalty_config(PenaltyConfig): mode, weight and violation domain
        rng(np.random.Generator): drives initialisation and batching, seeded from config.seed otherwise

    Returns:
        MlpModel: the trained model
        float[]: the loss trace
    """
    rng = np.random.default_rng(config.seed) if rng is None else rng
    model = init_model(config, dataset.size, MODES[penalty_config.mode], rng)
    return train(model, dataset, config, rng, step=penalty_step(penalty_config))


@dataclass(frozen=True, eq=False)
class PenaltyOutput:
    powers: np.ndarray
    raw: np.ndarray
    satisfied: np.ndarray
    sum_rates: np.ndarray

    @property
    def fallback_count(self):
        return int((~self.satisfied).sum())

    @property
    def fallback_rate(self):
        return self.fallback_count / len(self.satisfied) if len(self.satisfied) else 0.0


def infer_penalty_net(model, channels, fallback=True):
    """
    Parameters:
        model(MlpModel): a penalty-add or penalty-mul model
        channels(Dataset|ChannelRealization[]): feasible instances
        fallback(bool): replace outputs that miss a rate requirement by the base power

    Returns:
        PenaltyOutput: final and raw powers, which raw outputs met every requirement exactly,
        and the sum rates of the final powers
    """
    model.eval()
    data = prepare(model, channels)
    raw, _, _ = penalty_powers(model, data.x, data.batch.p_max, update_stats=False)
    slack = np.einsum("mij,mj->mi", data.batch.B, raw) - data.batch.q
    satisfied = np.all(slack >= 0, axis=1)
    powers = np.where(satisfied[:, None], raw, data.batch.p0) if fallback else raw
    return PenaltyOutput(powers=powers, raw=raw, satisfied=satisfied,
                         sum_rates=rates_arrays(data.gains, data.noise, powers).sum(axis=1))


def search_penalty_weight(dataset, config, penalty_config, rng=None):
    """
    Train one net per weight of penalty_config.weight_grid on a training split and keep the one
    with the highest post-fallback mean sum rate on the validation split.

    Returns:
        float: the selected weight
        MlpModel: the net trained with it
        dict[float,float]: validation mean sum rate per weight
    """
    rng = np.random.default_rng(config.seed) if rng is None else rng
    train_set, validation = dataset.split(penalty_config.validation_fraction, rng)
    if len(validation) == 0 or len(train_set) == 0:
        raise InvalidArgumentError("the weight search needs non-empty training and validation splits")
    scores, models = {}, {}
    for weight in penalty_config.weight_grid:
        candidate = replace(penalty_config, weight=float(weight))
        model, _ = train_penalty_net(train_set, config, candidate, np.random.default_rng(rng.integers(2**63)))
        scores[float(weight)] = float(infer_penalty_net(model, validation).sum_rates.mean())
        models[float(weight)] = model
        logger.info("penalty weight %g: validation sum rate %.4f", weight, scores[float(weight)])
    best = max(scores, key=lambda w: scores[w])
    return best, models[best], scores
