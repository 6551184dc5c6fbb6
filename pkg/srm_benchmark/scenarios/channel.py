"""
Channel realizations: large-scale gains with Rayleigh small-scale fading, rate requirements
turned into SINR targets, and noise normalisation.

Gains are stored divided by the noise power, so every realization has noise_power = 1. SINR
is unchanged by that rescaling and the stored gains stay close to 1 in magnitude.
"""
from dataclasses import dataclass, field

import numpy as np

from srm_benchmark.errors import InvalidArgumentError
from srm_benchmark.scenarios.layout import sample_ue_positions
from srm_benchmark.spaces import ChoiceSpace


def dbm_to_watts(value_dbm):
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def rate_to_sinr(rate):
    """gamma = 2^r - 1 for a rate in bit/s/Hz."""
    return np.power(2.0, np.asarray(rate, dtype=float)) - 1.0


def sinr_to_rate(gamma):
    return np.log2(1.0 + np.asarray(gamma, dtype=float))


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    gains: np.ndarray
    gamma_min: np.ndarray
    noise_power: float
    p_max: float
    positions: np.ndarray = field(default=None, repr=False)
    large_scale_db: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        gains = np.array(self.gains, dtype=float)
        gamma = np.array(self.gamma_min, dtype=float)
        if gains.ndim != 2 or gains.shape[0] != gains.shape[1] or gamma.shape != (gains.shape[0],):
            raise InvalidArgumentError(f"gains has to be K x K and gamma_min of length K, got "
                                       f"{gains.shape} and {gamma.shape}")
        if np.any(gains <= 0):
            raise InvalidArgumentError("channel gains have to be positive")
        if np.any(gamma < 0):
            raise InvalidArgumentError("SINR targets can't be negative")
        if self.noise_power <= 0 or self.p_max <= 0:
            raise InvalidArgumentError("noise power and p_max have to be positive")
        gains.setflags(write=False)
        gamma.setflags(write=False)
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "gamma_min", gamma)

    @property
    def size(self):
        return self.gamma_min.shape[0]

    @property
    def rate_min(self):
        return sinr_to_rate(self.gamma_min)


def _rates(rate_spec, size, rng):
    if isinstance(rate_spec, ChoiceSpace):
        return rate_spec.sample(rng, size=size)
    if isinstance(rate_spec, str):
        if rate_spec == "random":
            raise InvalidArgumentError("the random rate spec needs its grid, pass a ChoiceSpace")
        rate_spec = float(rate_spec)
    rates = np.broadcast_to(np.asarray(rate_spec, dtype=float), (size,)).copy()
    if np.any(rates < 0):
        raise InvalidArgumentError("rate requirements can't be negative")
    return rates


def sample_channel(layout, region, rate_spec, rng, pmax_dbm=46.0, sigma2_dbm=-92.0,
                   shadowing_std_db=8.0, attempt_cap=10**6):
    """
    Draw one problem instance.

    Parameters:
        layout(NetworkLayout): the cells
        region((float,float)): the cell-edge region in dB
        rate_spec(float|float[]|ChoiceSpace): a fixed rate, per-UE rates, or a grid to draw
        every UE rate from
        rng(np.random.Generator): the random source

    Returns:
        ChannelRealization: noise-normalised gains, SINR targets and the power cap in watts
    """
    positions, alpha_db = sample_ue_positions(layout, region, rng, shadowing_std_db, attempt_cap)
    size = layout.cell_count
    fading = rng.exponential(1.0, (size, size))
    noise = dbm_to_watts(sigma2_dbm)
    gains = 10.0 ** (alpha_db / 10.0) * fading / noise
    gamma = rate_to_sinr(_rates(rate_spec, size, rng))
    return ChannelRealization(gains=gains, gamma_min=gamma, noise_power=1.0, p_max=dbm_to_watts(pmax_dbm),
                              positions=positions, large_scale_db=alpha_db)
