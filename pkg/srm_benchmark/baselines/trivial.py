import numpy as np

from srm_benchmark.errors import InfeasibleInstanceError


def baseline_p0(cs):
    """The base power B^-1 q, every rate requirement is met with equality."""
    if not cs.feasible:
        raise InfeasibleInstanceError("the base power is outside the power box", p0=cs.p0)
    return np.array(cs.p0)

