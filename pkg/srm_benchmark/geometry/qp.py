"""
Euclidean projection onto {p : B p >= q, p <= p_max} by a primal active-set method.

This is the reference the projection block is compared against; it is never on the training
path. Problems are tiny (K <= 8, 2K inequalities) so every equality-constrained subproblem is
solved densely.
"""
import logging
from dataclasses import dataclass

import numpy as np

from srm_benchmark.errors import InvalidArgumentError, NoConvergenceError

logger = logging.getLogger(__name__)

MAX_SIZE = 8
STEP_TOLERANCE = 1e-13


@dataclass(frozen=True, eq=False)
class QPResult:
    p: np.ndarray
    multipliers: np.ndarray
    working_set: tuple
    iterations: int
    kkt_residual: float


def _inequalities(cs, p_max):
    size = cs.size
    A = np.vstack([cs.B, -np.eye(size)])
    b = np.concatenate([cs.q, -np.full(size, p_max)])
    return A, b


def _multipliers(A_w, gradient):
    if A_w.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.solve(A_w @ A_w.T, A_w @ gradient)


def kkt_residual(A, b, x, target, working, multipliers):
    gradient = x - target
    stationarity = gradient - A[list(working)].T @ multipliers if working else gradient
    primal = np.maximum(b - A @ x, 0.0)
    dual = np.maximum(-multipliers, 0.0) if multipliers.size else np.zeros(1)
    complementarity = np.abs(multipliers * (A[list(working)] @ x - b[list(working)])) if working else np.zeros(1)
    return float(max(np.max(np.abs(stationarity)), np.max(primal), np.max(dual), np.max(complementarity)))


def solve_l2_projection(cs, p_hat, p_max=None, max_iterations=1000):
    """
    Parameters:
        cs(ConstraintSet): a feasible instance, p0 is the starting vertex
        p_hat(float[]): the point to project
        p_max(float): the power cap, defaults to the one of the instance
        max_iterations(int): active-set steps allowed

    Returns:
        QPResult: the projection with its multipliers and KKT residual
    """
    p_max = cs.p_max if p_max is None else p_max
    if not cs.feasible or np.any(cs.p0 > p_max):
        raise InvalidArgumentError("the l2 projection needs a feasible instance")
    if cs.size > MAX_SIZE:
        raise InvalidArgumentError(f"the active-set projection supports K <= {MAX_SIZE}")
    target = np.asarray(p_hat, dtype=float)
    A, b = _inequalities(cs, p_max)
    x = np.array(cs.p0, dtype=float)
    working = []
    scale = max(1.0, float(np.max(np.abs(target))), p_max)

    for iteration in range(1, max_iterations + 1):
        gradient = x - target
        A_w = A[working]
        multipliers = _multipliers(A_w, gradient)
        step = (A_w.T @ multipliers if working else 0.0) - gradient
        if np.max(np.abs(step)) <= STEP_TOLERANCE * scale:
            if multipliers.size == 0 or multipliers.min() >= -STEP_TOLERANCE * scale:
                residual = kkt_residual(A, b, x, target, working, multipliers)
                return QPResult(p=x, multipliers=multipliers, working_set=tuple(working),
                                iterations=iteration, kkt_residual=residual)
            working.pop(int(np.argmin(multipliers)))
            continue
        alpha, blocking = 1.0, None
        rates = A @ step
        for index in np.flatnonzero(rates < 0):
            if index in working:
                continue
            ratio = (b[index] - A[index] @ x) / rates[index]
            if ratio < alpha:
                alpha, blocking = max(ratio, 0.0), int(index)
        x = x + alpha * step
        if blocking is not None:
            working.append(blocking)
    raise NoConvergenceError(f"active-set projection did not converge in {max_iterations} steps")


def l2_projection(cs, p_hat, p_max=None):
    """The point of the feasible set closest to p_hat."""
    return solve_l2_projection(cs, p_hat, p_max).p
