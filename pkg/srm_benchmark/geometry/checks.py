"""
Central finite-difference oracles for the analytic gradients. Results use the same gradient
layout as the projection block, [J]_ij = d f_j / d x_i.
"""
import numpy as np

from srm_benchmark.geometry.projection import (backward_C_wrt_d, backward_D_wrt_C, backward_D_wrt_phat,
                                               backward_E_wrt_D, project_forward, projection_backward)
from srm_benchmark.geometry.rates import grad_neg_sum_rate, sum_rate

DEFAULT_STEP = 1e-6


def numerical_jacobian(fn, x, step=DEFAULT_STEP):
    x = np.asarray(x, dtype=float)
    rows = []
    for i in range(x.size):
        h = step * max(abs(x[i]), 1.0)
        up, down = x.copy(), x.copy()
        up[i] += h
        down[i] -= h
        rows.append((np.atleast_1d(fn(up)) - np.atleast_1d(fn(down))) / (2.0 * h))
    return np.array(rows)


def numerical_gradient(fn, x, step=DEFAULT_STEP):
    return numerical_jacobian(fn, x, step)[:, 0]


def relative_error(analytic, numeric, floor=1e-8):
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    scale = max(float(np.max(np.abs(numeric), initial=0.0)), float(np.max(np.abs(analytic), initial=0.0)), floor)
    return float(np.max(np.abs(analytic - numeric), initial=0.0) / scale)


def _scale_map(tape):
    k = tape.k_max
    return lambda p_D: (tape.p_max / p_D[k]) * p_D


def _segment_map(cs, tape, vary):
    k = tape.k_eps

    def point_D(p_hat, p_C):
        eps = (cs.q[k] - cs.B[k] @ p_hat) / (cs.B[k] @ (p_C - p_hat))
        return p_hat + eps * (p_C - p_hat)

    if vary == "p_hat":
        return lambda p_hat: point_D(p_hat, tape.p_C)
    return lambda p_C: point_D(tape.p_hat, p_C)


def factor_residuals(ch, cs, tape, step=DEFAULT_STEP):
    """
    Compare every Jacobian factor of the block, and the composed chain, against central
    differences with the selected indices held fixed. Without a channel only the factors of
    the projection block itself are checked.

    Returns:
        dict[str,float]: relative error per factor
    """
    residuals = {
        "dp_E/dp_D": relative_error(backward_E_wrt_D(tape),
                                    numerical_jacobian(_scale_map(tape), tape.p_D, step)),
        "dp_C/dd": relative_error(backward_C_wrt_d(cs),
                                  numerical_jacobian(lambda d: cs.p0 + cs.c_map @ d, tape.d, step)),
    }
    if tape.feasible_input:
        residuals["dp_D/dp_hat"] = relative_error(backward_D_wrt_phat(tape, cs), np.eye(tape.p_hat.size))
        residuals["dp_D/dp_C"] = relative_error(backward_D_wrt_C(tape, cs), np.zeros((tape.p_hat.size,) * 2))
    else:
        residuals["dp_D/dp_hat"] = relative_error(backward_D_wrt_phat(tape, cs),
                                                  numerical_jacobian(_segment_map(cs, tape, "p_hat"), tape.p_hat, step))
        residuals["dp_D/dp_C"] = relative_error(backward_D_wrt_C(tape, cs),
                                                numerical_jacobian(_segment_map(cs, tape, "p_C"), tape.p_C, step))
    if ch is None:
        return residuals
    residuals["dJ/dp_E"] = relative_error(grad_neg_sum_rate(ch, tape.p_E),
                                          numerical_gradient(lambda p: -sum_rate(ch, p), tape.p_E, step))
    chain_hat, chain_d = chain_residuals(ch, cs, tape, step)
    residuals["dJ/dp_hat"] = chain_hat
    if not tape.heuristic:
        residuals["dJ/dd"] = chain_d
    return residuals


def loss_through_block(ch, cs, p_hat, d, heuristic=False):
    return -sum_rate(ch, project_forward(cs, p_hat, d, heuristic=heuristic).p_E)


def chain_residuals(ch, cs, tape, step=DEFAULT_STEP):
    """End-to-end check of (p_hat, d) -> J against central differences."""
    grad_hat, grad_d = projection_backward(tape, cs, grad_neg_sum_rate(ch, tape.p_E))
    numeric_hat = numerical_gradient(lambda p: loss_through_block(ch, cs, p, tape.d, tape.heuristic),
                                     tape.p_hat, step)
    error_hat = relative_error(grad_hat, numeric_hat)
    if tape.heuristic:
        return error_hat, 0.0
    numeric_d = numerical_gradient(lambda d: loss_through_block(ch, cs, tape.p_hat, d), tape.d, step)
    return error_hat, relative_error(grad_d, numeric_d)


def indices_stable(cs, tape, step=DEFAULT_STEP):
    """
    True when perturbing p_hat and d by the finite-difference step keeps the feasibility
    branch, k_eps and k_max unchanged, so the fixed-index Jacobians are the true ones.
    """
    size = tape.p_hat.size
    vectors = ("p_hat",) if tape.heuristic else ("p_hat", "d")
    for vector in vectors:
        for i in range(size):
            for sign in (-1.0, 1.0):
                p_hat = tape.p_hat.copy()
                d = tape.d.copy()
                target = p_hat if vector == "p_hat" else d
                target[i] += sign * step * max(abs(target[i]), 1.0)
                if np.any(p_hat < 0) or np.any(p_hat > cs.p_max) or np.any(d < 0) or np.any(d > cs.d_max_star):
                    return False
                other = project_forward(cs, p_hat, d, heuristic=tape.heuristic)
                if (other.feasible_input != tape.feasible_input or other.k_eps != tape.k_eps
                        or other.k_max != tape.k_max):
                    return False
    return True
