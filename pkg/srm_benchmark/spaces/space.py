import numpy as np

"""
A parent class that governs the shape and range of a random quantity used by the benchmark
(a rate requirement, a power vector, a distance vector). It owns its random generator so every
space can be seeded on its own.
"""
class Space:
    """
    Build the space with an unseeded generator; call seed for reproducible draws.
    """
    def __init__(self):
        self._random = np.random.default_rng()

    """
    Reseed the space

    Parameters:
        seed (int|np.random.Generator): the seed value or an already built generator
    """
    def seed(self, seed):
        if isinstance(seed, np.random.Generator):
            self._random = seed
        else:
            self._random = np.random.default_rng(seed)

    """
    Bounds of the values this space produces

    Returns:
        dict[str,any]: "min" and "max" of the space, scalars or arrays depending on the space
    """
    def range(self):
        return {"min": 0.0, "max": 0.0}

    """
    Check if a value lies in this space

    Parameters:
        value (any): a rate, or a vector of powers or distances

    Returns:
        bool: true when the value has the right shape and lies within the bounds
    """
    def isSampled(self, value):
        raise NotImplementedError("subclasses define their own membership test")

    """
    Draw one value

    Parameters:
        random (np.random.Generator): optional generator overriding the space one for this draw

    Returns:
        any: a rate or a vector, depending on the space
    """
    def sample(self, random=None):
        raise NotImplementedError("subclasses define their own sampler")
