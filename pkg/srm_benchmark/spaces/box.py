import numpy as np

from srm_benchmark.spaces.space import Space

"""
A Box space of vectors v with lower <= v <= upper element-wise. The benchmark uses it for
the output boxes of the network, [0, p_max]^K for the power and [0, d_max]^K for distances.
"""
class BoxSpace(Space):
    """
    Parameters:
        upper(float|float[]): the upper corner of the box
        lower(float|float[]): the lower corner of the box (default 0)
        size(int): the length of the vectors when upper and lower are scalars
    """
    def __init__(self, upper, lower=0.0, size=None):
        Space.__init__(self)
        upper = np.asarray(upper, dtype=float)
        lower = np.asarray(lower, dtype=float)
        if size is not None:
            upper = np.broadcast_to(upper, (size,))
        upper, lower = np.broadcast_arrays(upper, lower)
        if np.any(lower > upper):
            raise ValueError("lower has to be smaller or equal than upper")
        self._upper = np.array(upper, dtype=float)
        self._lower = np.array(lower, dtype=float)

    @property
    def shape(self):
        return self._upper.shape

    def range(self):
        return {"min": self._lower.copy(), "max": self._upper.copy()}

    def isSampled(self, value):
        try:
            value = np.asarray(value, dtype=float)
        except (TypeError, ValueError):
            return False
        if value.shape != self._upper.shape:
            return False
        return bool(np.all(value >= self._lower) and np.all(value <= self._upper))

    def sample(self, random=None):
        random = random or self._random
        return self._lower + random.random(self._upper.shape) * (self._upper - self._lower)
