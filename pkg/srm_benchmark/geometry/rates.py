"""
SINR and sum rate of the multicell downlink, with the analytic gradients used for training.

Gains follow g[i, j] = channel gain from BS j to UE i. Every function accepts stacked
inputs: gains (..., K, K), noise (...) and powers (..., K).
"""
import numpy as np

LN2 = np.log(2.0)


def _parts(gains, noise, p):
    gains = np.asarray(gains, dtype=float)
    p = np.asarray(p, dtype=float)
    noise = np.asarray(noise, dtype=float)
    direct = np.diagonal(gains, axis1=-2, axis2=-1)
    signal = direct * p
    total = np.einsum("...ij,...j->...i", gains, p) + noise[..., None]
    return direct, signal, total - signal, total


def sinr_arrays(gains, noise, p):
    _, signal, interference, _ = _parts(gains, noise, p)
    return signal / interference


def sinr(ch, p):
    """SINR of every UE under powers p."""
    return sinr_arrays(ch.gains, ch.noise_power, p)


def sum_rate(ch, p):
    """Sum of log2(1 + SINR_i) in bit/s/Hz."""
    return float(np.sum(np.log2(1.0 + sinr(ch, p))))


def rates_arrays(gains, noise, p):
    return np.log2(1.0 + sinr_arrays(gains, noise, p))


def sinr_vjp(gains, noise, p, v):
    """
    Vector-Jacobian product of the SINR map: returns sum_i v_i dSINR_i/dp_k for every k.

    dSINR_i/dp_i = g_ii / I_i and dSINR_i/dp_k = -g_ii p_i g_ik / I_i^2 for k != i, with I_i
    the interference plus noise seen by UE i.
    """
    gains = np.asarray(gains, dtype=float)
    v = np.asarray(v, dtype=float)
    direct, signal, interference, _ = _parts(gains, noise, p)
    u = v * signal / interference**2
    cross = np.einsum("...ik,...i->...k", gains, u) - direct * u
    return v * direct / interference - cross


def grad_neg_sum_rate_arrays(gains, noise, p):
    _, signal, interference, _ = _parts(gains, noise, p)
    gamma = signal / interference
    return sinr_vjp(gains, noise, p, -1.0 / (LN2 * (1.0 + gamma)))


def grad_neg_sum_rate(ch, p):
    """Gradient of J = -sum_i log2(1 + SINR_i) with respect to the powers."""
    return grad_neg_sum_rate_arrays(ch.gains, ch.noise_power, p)
