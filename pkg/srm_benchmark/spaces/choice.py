import numpy as np

from srm_benchmark.spaces.space import Space

"""
A Choice space that returns one of a fixed set of values with equal probability. It is used
for rate requirements drawn from a grid such as {0.1, 0.2, ..., 1.0} bit/s/Hz.
"""
class ChoiceSpace(Space):
    """
    Parameters:
        values(float[]): the values that can be drawn, at least one
    """
    def __init__(self, values):
        Space.__init__(self)
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            raise ValueError("values can't be empty")
        self._values = values

    @property
    def values(self):
        return self._values.copy()

    def range(self):
        return {"min": float(self._values.min()), "max": float(self._values.max())}

    def isSampled(self, value):
        try:
            return bool(np.any(np.isclose(self._values, float(value), rtol=0, atol=1e-12)))
        except (TypeError, ValueError):
            return False

    """
    Sample one value, or an array of values when size is given

    Parameters:
        random (np.random.Generator): optional generator for this draw
        size (int): number of independent draws

    Returns:
        float|float[]: the drawn value(s)
    """
    def sample(self, random=None, size=None):
        random = random or self._random
        return self._values[random.integers(0, self._values.size, size=size)]
