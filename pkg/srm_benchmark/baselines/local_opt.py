"""
A multi-start projected-gradient reference optimizer for the sum rate. Every iteration takes
a gradient step, projects it back onto the feasible set with the exact l2 projection and
backtracks until the Armijo condition holds, so the objective never decreases.
"""
import logging
from dataclasses import dataclass

import numpy as np

from srm_benchmark.config import LocalOptConfig
from srm_benchmark.errors import InfeasibleInstanceError
from srm_benchmark.geometry.qp import l2_projection
from srm_benchmark.geometry.rates import grad_neg_sum_rate, sum_rate
from srm_benchmark.spaces import BoxSpace

logger = logging.getLogger(__name__)

SHRINK = 0.5
GROW = 2.0
MIN_STEP = 1e-30


@dataclass(frozen=True, eq=False)
class LocalOptResult:
    p: np.ndarray
    objective: float
    converged: bool
    iterations: int
    starts: int


def random_feasible_starts(cs, count, rng, attempts=100):
    """
    p0 followed by up to count-1 points p0 + u * (p_max - p0), u ~ U(0,1)^K, kept only when
    they meet every rate requirement.
    """
    starts = [np.array(cs.p0)]
    box = BoxSpace(cs.p_max, lower=cs.p0)
    for _ in range(attempts):
        if len(starts) >= count:
            break
        candidate = box.sample(rng)
        if cs.satisfies(candidate) and np.all(candidate <= cs.p_max):
            starts.append(candidate)
    return starts


def projected_gradient_ascent(cs, ch, start, config, history=None):
    """
    Parameters:
        history(list): when given, receives the sum rate of the start and of every iterate

    Returns:
        float[]: the final point
        float: its sum rate
        bool: whether the projected displacement fell below the tolerance
        int: iterations used
    """
    p = np.array(start, dtype=float)
    value = sum_rate(ch, p)
    if history is not None:
        history.append(value)
    step = None
    for iteration in range(1, config.max_iterations + 1):
        ascent = -grad_neg_sum_rate(ch, p)
        norm = float(np.max(np.abs(ascent)))
        if norm == 0.0:
            return p, value, True, iteration
        if step is None:
            step = cs.p_max / norm
        while True:
            candidate = l2_projection(cs, p + step * ascent)
            candidate_value = sum_rate(ch, candidate)
            if candidate_value >= value + config.armijo * ascent @ (candidate - p):
                break
            step *= SHRINK
            if step < MIN_STEP:
                return p, value, True, iteration
        displacement = float(np.linalg.norm(candidate - p))
        if candidate_value >= value:
            p, value = candidate, candidate_value
        if history is not None:
            history.append(value)
        if displacement < config.tolerance:
            return p, value, True, iteration
        step *= GROW
    return p, value, False, config.max_iterations


def multistart_local_opt(cs, ch, starts=None, rng=None, config=None):
    """
    Best projected-gradient result over several feasible starts.

    Parameters:
        cs(ConstraintSet): the instance's constraint set, it has to be feasible
        ch(ChannelRealization): the instance
        starts(int): number of starts, config.starts by default
        rng(np.random.Generator): source of the random starts
        config(LocalOptConfig): iteration cap, tolerance and Armijo constant

    Returns:
        LocalOptResult: the best point, its sum rate and whether its run converged
    """
    config = LocalOptConfig() if config is None else config
    if not cs.feasible:
        raise InfeasibleInstanceError("the instance has no feasible power allocation", p0=cs.p0)
    rng = np.random.default_rng() if rng is None else rng
    count = config.starts if starts is None else int(starts)
    points = random_feasible_starts(cs, count, rng, config.start_attempts)
    best = None
    for start in points:
        p, value, converged, iterations = projected_gradient_ascent(cs, ch, start, config)
        if not converged:
            logger.warning("local optimizer hit its cap of %d iterations", config.max_iterations)
        if best is None or value > best.objective:
            best = LocalOptResult(p=p, objective=value, converged=converged, iterations=iterations,
                                  starts=len(points))
    return best
