"""
The projection block. A network output p_hat (point A) that violates the rate constraints
is pulled along the segment towards an interior point p_C (point C) until it meets the
constraint boundary (point D), and the result is scaled up until one BS transmits at full
power (point E). Every step is differentiable almost everywhere and the Jacobians below are
the closed-form factors of that chain.

Jacobians are returned in gradient layout, [J]_ij = d out_j / d in_i, so that a
vector-Jacobian product is ``J @ upstream``. In this layout the printed factor
diag(BB^T)^(1/2) (B^T)^-1 and the transposed Jacobian of p_C(d) coincide.
"""
from dataclasses import dataclass

import numpy as np

from srm_benchmark.errors import (DegenerateGradientError, DegenerateScaleError,
                                  GeometryViolatedError, InvalidArgumentError)
from srm_benchmark.geometry.constraints import FLOOR, heuristic_interior_point, interior_point


@dataclass(frozen=True, eq=False)
class ProjectionTape:
    p_hat: np.ndarray
    d: np.ndarray
    p_C: np.ndarray
    feasible_input: bool
    active_set: tuple
    eps_star: float
    k_eps: int
    p_D: np.ndarray
    k_max: int
    p_E: np.ndarray
    p_max: float
    heuristic: bool = False


def epsilon_star(cs, p_hat, p_C):
    """
    Smallest step along A -> C that satisfies every rate constraint.

    Returns:
        (float, int, tuple, bool): eps_star, the index attaining it (smallest on ties), the
        index set of positive entries of B(p_C - p_hat), and whether p_hat was feasible
    """
    p_hat = np.asarray(p_hat, dtype=float)
    slack = cs.B @ p_hat - cs.q
    if np.all(slack >= 0):
        return 0.0, None, (), True
    direction = cs.B @ (np.asarray(p_C, dtype=float) - p_hat)
    active = np.flatnonzero(direction > FLOOR)
    if active.size == 0:
        raise GeometryViolatedError("no rate constraint moves towards the interior point")
    ratios = -slack[active] / direction[active]
    position = int(np.argmax(ratios))
    return float(ratios[position]), int(active[position]), tuple(int(i) for i in active), False


def _check_box(name, value, upper, size):
    value = np.asarray(value, dtype=float)
    if value.shape != (size,):
        raise InvalidArgumentError(f"{name} has to be of length {size}")
    if np.any(value < 0) or np.any(value > upper):
        raise InvalidArgumentError(f"{name} has to lie in [0, {upper}]")
    return value


def project_forward(cs, p_hat, d=None, heuristic=False):
    """
    Run the projection block on one instance and keep every intermediate for backprop.

    Parameters:
        cs(ConstraintSet): a feasible instance
        p_hat(float[]): the raw power in [0, p_max]^K
        d(float[]): distances in [0, d_max_star]^K, ignored when heuristic is set
        heuristic(bool): use the fixed interior point at d = d_max_star * 1

    Returns:
        ProjectionTape: all the intermediates, p_E being the projected power
    """
    if not cs.feasible:
        raise InvalidArgumentError("the projection needs a feasible instance")
    p_hat = _check_box("p_hat", p_hat, cs.p_max, cs.size)
    if heuristic:
        d = np.full(cs.size, cs.d_max_star)
        p_C = heuristic_interior_point(cs)
    else:
        d = _check_box("d", d, cs.d_max_star, cs.size)
        p_C = interior_point(cs, d)
    eps, k_eps, active, feasible_input = epsilon_star(cs, p_hat, p_C)
    p_D = p_hat.copy() if feasible_input else p_hat + eps * (p_C - p_hat)
    k_max = int(np.argmax(p_D))
    if p_D[k_max] <= FLOOR:
        raise DegenerateScaleError("point D is the origin, it can't be scaled to the power cap")
    p_E = (cs.p_max / p_D[k_max]) * p_D
    return ProjectionTape(p_hat=p_hat, d=d, p_C=p_C, feasible_input=feasible_input,
                          active_set=active, eps_star=eps, k_eps=k_eps, p_D=p_D, k_max=k_max,
                          p_E=p_E, p_max=cs.p_max, heuristic=heuristic)


def backward_E_wrt_D(tape):
    """d p_E / d p_D with the argmax index k_max held fixed."""
    p_D = tape.p_D
    k = tape.k_max
    M = np.diag(np.full(p_D.size, p_D[k]))
    M[k, :] = -p_D
    M[k, k] = 0.0
    return (tape.p_max / p_D[k] ** 2) * M


def _segment_terms(tape, cs):
    k = tape.k_eps
    denominator = float(cs.B[k] @ (tape.p_C - tape.p_hat))
    if abs(denominator) < FLOOR:
        raise DegenerateGradientError(f"segment denominator {denominator} at row {k}")
    return k, denominator


def backward_D_wrt_phat(tape, cs):
    """d p_D / d p_hat with the active row k_eps held fixed, identity for feasible inputs."""
    size = tape.p_hat.size
    if tape.feasible_input:
        return np.eye(size)
    k, denominator = _segment_terms(tape, cs)
    numerator = float(cs.B[k] @ tape.p_C - cs.q[k])
    M_hat = np.outer(cs.B[k], tape.p_hat - tape.p_C)
    return (numerator / denominator) * np.eye(size) + (numerator / denominator**2) * M_hat


def backward_D_wrt_C(tape, cs):
    """d p_D / d p_C with the active row k_eps held fixed, zero for feasible inputs."""
    size = tape.p_hat.size
    if tape.feasible_input:
        return np.zeros((size, size))
    k, denominator = _segment_terms(tape, cs)
    numerator = float(cs.q[k] - cs.B[k] @ tape.p_hat)
    M_bar = np.outer(cs.B[k], tape.p_C - tape.p_hat)
    return (numerator / denominator) * np.eye(size) - (numerator / denominator**2) * M_bar


def backward_C_wrt_d(cs):
    """d p_C / d d, constant per instance."""
    return np.array(cs.c_map.T)


def projection_backward(tape, cs, upstream):
    """
    Pull dJ/dp_E back to the block inputs.

    Returns:
        (float[], float[]): dJ/dp_hat and dJ/dd, the latter zero in heuristic mode since the
        interior point no longer depends on the network
    """
    grad_D = backward_E_wrt_D(tape) @ np.asarray(upstream, dtype=float)
    grad_hat = backward_D_wrt_phat(tape, cs) @ grad_D
    if tape.heuristic:
        return grad_hat, np.zeros_like(grad_hat)
    grad_d = backward_C_wrt_d(cs) @ (backward_D_wrt_C(tape, cs) @ grad_D)
    return grad_hat, grad_d
