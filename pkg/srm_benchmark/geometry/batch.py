"""
Vectorised projection block over a stack of instances. It runs the same arithmetic as
project_forward / projection_backward sample by sample and is what training and inference
use; the per-instance functions stay the reference.
"""
from dataclasses import dataclass

import numpy as np

from srm_benchmark.errors import (DegenerateGradientError, DegenerateScaleError,
                                  GeometryViolatedError, InfeasibleInstanceError)
from srm_benchmark.geometry.constraints import FLOOR


@dataclass(frozen=True, eq=False)
class ConstraintBatch:
    B: np.ndarray
    q: np.ndarray
    p0: np.ndarray
    c_map: np.ndarray
    d_max_star: np.ndarray
    p_max: np.ndarray

    @classmethod
    def from_sets(cls, sets):
        sets = list(sets)
        for index, cs in enumerate(sets):
            if not cs.feasible:
                raise InfeasibleInstanceError(f"instance {index} is infeasible", p0=cs.p0, index=index)
        return cls(B=np.stack([cs.B for cs in sets]),
                   q=np.stack([cs.q for cs in sets]),
                   p0=np.stack([cs.p0 for cs in sets]),
                   c_map=np.stack([cs.c_map for cs in sets]),
                   d_max_star=np.array([cs.d_max_star for cs in sets]),
                   p_max=np.array([cs.p_max for cs in sets]))

    def __len__(self):
        return self.q.shape[0]

    def take(self, indices):
        return ConstraintBatch(B=self.B[indices], q=self.q[indices], p0=self.p0[indices],
                               c_map=self.c_map[indices], d_max_star=self.d_max_star[indices],
                               p_max=self.p_max[indices])

    def heuristic_points(self):
        return self.p0 + self.d_max_star[:, None] * self.c_map.sum(axis=2)


@dataclass(frozen=True, eq=False)
class BatchTape:
    p_hat: np.ndarray
    d: np.ndarray
    p_C: np.ndarray
    feasible_input: np.ndarray
    eps_star: np.ndarray
    k_eps: np.ndarray
    p_D: np.ndarray
    k_max: np.ndarray
    p_E: np.ndarray
    heuristic: bool


def _rows(matrix, index):
    return matrix[np.arange(matrix.shape[0]), index]


def project_batch(batch, p_hat, d=None, heuristic=False):
    """Project a (M, K) stack of raw powers; d is (M, K) unless heuristic is set."""
    p_hat = np.asarray(p_hat, dtype=float)
    if heuristic:
        d = np.repeat(batch.d_max_star[:, None], p_hat.shape[1], axis=1)
        p_C = batch.heuristic_points()
    else:
        d = np.asarray(d, dtype=float)
        p_C = batch.p0 + np.einsum("mij,mj->mi", batch.c_map, d)
    slack = np.einsum("mij,mj->mi", batch.B, p_hat) - batch.q
    feasible_input = np.all(slack >= 0, axis=1)
    direction = np.einsum("mij,mj->mi", batch.B, p_C - p_hat)
    positive = direction > FLOOR
    if np.any(~feasible_input & ~positive.any(axis=1)):
        raise GeometryViolatedError("no rate constraint moves towards the interior point")
    ratios = np.full(slack.shape, -np.inf)
    np.divide(-slack, direction, out=ratios, where=positive)
    k_eps = np.argmax(ratios, axis=1)
    eps = np.where(feasible_input, 0.0, _rows(ratios, k_eps))
    k_eps = np.where(feasible_input, -1, k_eps)
    p_D = p_hat + eps[:, None] * (p_C - p_hat)
    k_max = np.argmax(p_D, axis=1)
    peak = _rows(p_D, k_max)
    if np.any(peak <= FLOOR):
        raise DegenerateScaleError("point D is the origin, it can't be scaled to the power cap")
    p_E = (batch.p_max / peak)[:, None] * p_D
    return BatchTape(p_hat=p_hat, d=d, p_C=p_C, feasible_input=feasible_input, eps_star=eps,
                     k_eps=k_eps, p_D=p_D, k_max=k_max, p_E=p_E, heuristic=heuristic)


def backward_batch(batch, tape, upstream):
    """Vector-Jacobian products of the block, returns (dJ/dp_hat, dJ/dd) stacks."""
    upstream = np.asarray(upstream, dtype=float)
    rows = np.arange(upstream.shape[0])
    peak = _rows(tape.p_D, tape.k_max)
    scale = batch.p_max / peak
    grad_D = scale[:, None] * upstream
    grad_D[rows, tape.k_max] -= scale / peak * np.einsum("mi,mi->m", upstream, tape.p_D)

    grad_hat = grad_D.copy()
    grad_C = np.zeros_like(grad_D)
    moved = ~tape.feasible_input
    if np.any(moved):
        k = tape.k_eps[moved]
        B_k = batch.B[moved, k]
        p_hat = tape.p_hat[moved]
        p_C = tape.p_C[moved]
        g = grad_D[moved]
        denominator = np.einsum("mi,mi->m", B_k, p_C - p_hat)
        if np.any(np.abs(denominator) < FLOOR):
            raise DegenerateGradientError("segment denominator vanished")
        toward = np.einsum("mi,mi->m", B_k, p_C) - batch.q[moved, k]
        away = batch.q[moved, k] - np.einsum("mi,mi->m", B_k, p_hat)
        along = np.einsum("mi,mi->m", p_C - p_hat, g)
        grad_hat[moved] = (toward / denominator)[:, None] * g \
            - (toward * along / denominator**2)[:, None] * B_k
        grad_C[moved] = (away / denominator)[:, None] * g \
            - (away * along / denominator**2)[:, None] * B_k
    if tape.heuristic:
        return grad_hat, np.zeros_like(grad_hat)
    grad_d = np.einsum("mji,mj->mi", batch.c_map, grad_C)
    return grad_hat, grad_d
