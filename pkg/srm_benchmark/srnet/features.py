"""
Network inputs: gains in dB standardised per coordinate with training-set statistics, followed
by the raw SINR targets, in the order g row-major then gamma_min.
"""
from dataclasses import dataclass

import numpy as np

from srm_benchmark.errors import InvalidArgumentError

STD_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class FeatureStats:
    mean: np.ndarray
    std: np.ndarray

    @property
    def size(self):
        return self.mean.shape[0]


def gains_db(gains):
    gains = np.asarray(gains, dtype=float)
    if np.any(gains <= 0):
        raise InvalidArgumentError("gains have to be positive to be converted to dB")
    return 10.0 * np.log10(gains)


def compute_stats(gains):
    """
    Per-coordinate mean and standard deviation of the dB gains.

    Parameters:
        gains(float[][][]): (M, K, K) stack of training gains

    Returns:
        FeatureStats: the standardisation constants
    """
    flat = gains_db(gains).reshape(len(gains), -1)
    if flat.shape[0] == 0:
        raise InvalidArgumentError("feature statistics need at least one sample")
    std = np.maximum(flat.std(axis=0), STD_FLOOR)
    return FeatureStats(mean=flat.mean(axis=0), std=std)


def featurize_arrays(gains, gamma_min, stats):
    flat = gains_db(gains).reshape(len(gains), -1)
    if flat.shape[1] != stats.size:
        raise InvalidArgumentError(f"stats cover {stats.size} gains, got {flat.shape[1]}")
    return np.concatenate([(flat - stats.mean) / stats.std, np.asarray(gamma_min, dtype=float)], axis=1)


def featurize(ch, stats):
    """The length K^2+K input vector of one channel realization."""
    return featurize_arrays(ch.gains[None], ch.gamma_min[None], stats)[0]


def featurize_dataset(dataset, stats):
    return featurize_arrays(dataset.gains(), dataset.gamma_min(), stats)
