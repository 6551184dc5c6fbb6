"""
The sum-rate network: MLP head -> scaled sigmoids -> projection block -> negative sum rate.

The first K outputs become p_hat = p_max * sigmoid(.), the next K the distances
d = d_max_star * sigmoid(.) with d_max_star held constant per sample. The heuristic variant has
no distance head and projects towards the point at d = d_max_star * 1.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from srm_benchmark.geometry.batch import backward_batch, project_batch
from srm_benchmark.geometry.rates import grad_neg_sum_rate_arrays, rates_arrays

# keeps the sigmoid strictly inside (0, 1) in double precision
LOGIT_CLIP = 30.0


def scaled_sigmoid(out, scale):
    s = expit(np.clip(out, -LOGIT_CLIP, LOGIT_CLIP))
    return np.asarray(scale, dtype=float)[:, None] * s, s


@dataclass(eq=False)
class NetworkPass:
    cache: list
    p_hat: np.ndarray
    d: np.ndarray
    s_p: np.ndarray
    s_d: np.ndarray
    tape: object

    @property
    def p_E(self):
        return self.tape.p_E


def forward(model, x, batch, update_stats=True):
    """
    Parameters:
        model(MlpModel): an srnet or srnet-heu model
        x(float[][]): (M, K^2+K) features
        batch(ConstraintBatch): the constraint sets of the same M samples

    Returns:
        NetworkPass: raw outputs, projected powers and everything backward needs
    """
    out, cache = model.forward(x, update_stats)
    size = model.cell_count
    p_hat, s_p = scaled_sigmoid(out[:, :size], batch.p_max)
    if model.heuristic:
        d, s_d = None, None
        tape = project_batch(batch, p_hat, heuristic=True)
    else:
        d, s_d = scaled_sigmoid(out[:, size:], batch.d_max_star)
        tape = project_batch(batch, p_hat, d)
    return NetworkPass(cache=cache, p_hat=p_hat, d=tape.d, s_p=s_p, s_d=s_d, tape=tape)


def loss(network_pass, gains, noise):
    """Negative sum rate averaged over the batch."""
    return -float(np.mean(rates_arrays(gains, noise, network_pass.p_E).sum(axis=1)))


def backward(model, network_pass, batch, gains, noise):
    """Gradients of loss with respect to every model parameter."""
    count = network_pass.p_hat.shape[0]
    upstream = grad_neg_sum_rate_arrays(gains, noise, network_pass.p_E) / count
    grad_hat, grad_d = backward_batch(batch, network_pass.tape, upstream)
    s_p = network_pass.s_p
    d_out = [grad_hat * batch.p_max[:, None] * s_p * (1 - s_p)]
    if not model.heuristic:
        s_d = network_pass.s_d
        d_out.append(grad_d * batch.d_max_star[:, None] * s_d * (1 - s_d))
    return model.backward(network_pass.cache, np.concatenate(d_out, axis=1))


def srnet_step(model, x, batch, gains, noise):
    """One forward/backward pass, returns (loss, grads)."""
    network_pass = forward(model, x, batch)
    value = loss(network_pass, gains, noise)
    return value, backward(model, network_pass, batch, gains, noise)
