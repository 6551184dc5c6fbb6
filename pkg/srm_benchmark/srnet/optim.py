from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(params, grads, state, config):
    """
    One bias-corrected Adam update applied in place to params.

    Parameters:
        params(dict[str,float[]]): the model parameters
        grads(dict[str,float[]]): matching gradients
        state(AdamState): moments from the previous steps
        config(TrainConfig): learning_rate, beta1, beta2 and adam_epsilon

    Returns:
        AdamState: the advanced state
    """
    state.step += 1
    b1, b2 = config.beta1, config.beta2
    for name, grad in grads.items():
        m = state.m.get(name)
        if m is None:
            m = state.m[name] = np.zeros_like(grad)
            state.v[name] = np.zeros_like(grad)
        v = state.v[name]
        m *= b1
        m += (1 - b1) * grad
        v *= b2
        v += (1 - b2) * grad * grad
        m_hat = m / (1 - b1**state.step)
        v_hat = v / (1 - b2**state.step)
        params[name] = params[name] - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_epsilon)
    return state
