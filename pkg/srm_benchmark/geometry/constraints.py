"""
The polyhedral constraint set of the sum-rate problem.

Per-user rate constraints log2(1+SINR_i) >= r_i are linear in the powers:

    B p >= q,   [B]_ii = g_ii,  [B]_ij = -gamma_i * g_ij,  q_i = gamma_i * sigma^2

and together with 0 <= p <= p_max they describe the feasible set. The instance is feasible
iff the base power p0 = B^-1 q lies in the power box.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from srm_benchmark.errors import DegenerateGeometryError, InvalidArgumentError, SingularGeometryError

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
FLOOR = 1e-30


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ConstraintSet:
    B: np.ndarray
    q: np.ndarray
    p0: np.ndarray
    row_norms: np.ndarray
    d_max_star: float
    feasible: bool
    p_max: float
    # B^-1 diag(BB^T)^(1/2): the linear map from distances to the interior point
    c_map: np.ndarray
    lu: tuple = None

    @property
    def size(self):
        return self.q.shape[0]

    """
    Build the constraint set straight from B and q, used by build_constraints and by anyone
    who wants to study the geometry without a channel.

    Parameters:
        B(float[][]): the K x K constraint matrix
        q(float[]): the right hand side
        p_max(float): the per-BS power cap

    Returns:
        ConstraintSet: the factorised constraint set, d_max_star is nan when infeasible
    """
    @classmethod
    def from_matrices(cls, B, q, p_max):
        B = np.array(B, dtype=float)
        q = np.array(q, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1] or q.shape != (B.shape[0],):
            raise InvalidArgumentError(f"B has to be K x K and q of length K, got {B.shape} and {q.shape}")
        if p_max <= 0:
            raise InvalidArgumentError("p_max has to be positive")
        if np.any(np.diag(B) <= 0):
            raise InvalidArgumentError("the diagonal of B has to be positive")
        condition = np.linalg.cond(B)
        if not np.isfinite(condition) or condition > CONDITION_LIMIT:
            raise SingularGeometryError(f"B is numerically singular (condition {condition:.3g})")
        lu = lu_factor(B)
        p0 = lu_solve(lu, q)
        row_norms = np.sqrt(np.einsum("ij,ij->i", B, B))
        c_map = lu_solve(lu, np.diag(row_norms))
        feasible = bool(np.all(p0 >= 0) and np.all(p0 <= p_max))
        d_star = _d_max_star(p0, c_map, p_max) if feasible else float("nan")
        return cls(B=_frozen(B), q=_frozen(q), p0=_frozen(p0), row_norms=_frozen(row_norms),
                   d_max_star=d_star, feasible=feasible, p_max=float(p_max),
                   c_map=_frozen(c_map), lu=lu)

    def solve(self, rhs):
        return lu_solve(self.lu, rhs)

    """
    Check the rate constraints B p >= q, with an optional absolute slack
    """
    def satisfies(self, p, slack=0.0):
        return bool(np.all(self.B @ np.asarray(p, dtype=float) >= self.q - slack))


def _d_max_star(p0, c_map, p_max):
    denominator = c_map.sum(axis=1)
    if np.any(denominator <= FLOOR):
        raise DegenerateGeometryError(
            f"B^-1 diag(BB^T)^(1/2) 1 has non-positive entries {denominator}")
    return float(max(np.min((p_max - p0) / denominator), 0.0))


def build_constraints(ch):
    """
    Build B, q, p0 and the derived quantities for a channel realization.

    Parameters:
        ch(ChannelRealization): the problem instance

    Returns:
        ConstraintSet: the constraint geometry of the instance
    """
    gains = np.asarray(ch.gains, dtype=float)
    gamma = np.asarray(ch.gamma_min, dtype=float)
    B = -gamma[:, None] * gains
    np.fill_diagonal(B, np.diag(gains))
    q = gamma * ch.noise_power
    return ConstraintSet.from_matrices(B, q, ch.p_max)


def feasibility_check(cs, p_max=None):
    """True iff 0 <= p0 <= p_max element-wise, compared exactly."""
    p_max = cs.p_max if p_max is None else p_max
    return bool(np.all(cs.p0 >= 0) and np.all(cs.p0 <= p_max))


def d_max_star(cs, p_max=None):
    """The largest uniform distance keeping the interior point inside the power box."""
    if p_max is None or p_max == cs.p_max:
        if not cs.feasible:
            raise InvalidArgumentError("d_max_star is only defined for feasible instances")
        return cs.d_max_star
    if not feasibility_check(cs, p_max):
        raise InvalidArgumentError("d_max_star is only defined for feasible instances")
    return _d_max_star(cs.p0, cs.c_map, p_max)


def interior_point(cs, d):
    """
    The interior point p_C = p0 + B^-1 diag(BB^T)^(1/2) d, it sits at distance d_i from the
    i-th rate constraint hyperplane.
    """
    d = np.asarray(d, dtype=float)
    if d.shape != cs.q.shape:
        raise InvalidArgumentError(f"d has to be of length {cs.size}")
    if np.any(d < 0) or np.any(d > cs.d_max_star):
        raise InvalidArgumentError(f"d has to lie in [0, {cs.d_max_star}]")
    return cs.p0 + cs.c_map @ d


def heuristic_interior_point(cs):
    """The interior point at d = d_max_star * 1, the max-min distance choice."""
    if not cs.feasible:
        raise InvalidArgumentError("the heuristic interior point needs a feasible instance")
    return interior_point(cs, np.full(cs.size, cs.d_max_star))
