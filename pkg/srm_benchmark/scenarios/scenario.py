import numpy as np

from srm_benchmark.config import ScenarioConfig, build
from srm_benchmark.errors import InvalidArgumentError
from srm_benchmark.geometry.constraints import build_constraints
from srm_benchmark.geometry.rates import rates_arrays
from srm_benchmark.scenarios.dataset import generate_dataset, rate_spec_of
from srm_benchmark.scenarios.channel import dbm_to_watts
from srm_benchmark.spaces import BoxSpace, ChoiceSpace

# B p >= q is checked with this slack relative to max(q)
SATISFACTION_TOLERANCE = 1e-8
# the power cap may be exceeded by this relative amount
POWER_TOLERANCE = 1e-12


def meets_constraints(cs, power):
    """B p >= q up to the relative slack, and 0 <= p <= p_max up to the power tolerance."""
    power = np.asarray(power, dtype=float)
    slack = SATISFACTION_TOLERANCE * float(np.max(np.abs(cs.q), initial=0.0))
    in_box = np.all(power >= 0) and np.all(power <= cs.p_max * (1.0 + POWER_TOLERANCE))
    return bool(in_box and cs.satisfies(power, slack))


"""
A parent class for all the scenarios in the benchmark. A scenario knows how to draw problem
instances and how to judge a power allocation on one of them.
"""
class Scenario:
    """
    constructor for the scenario. All the keyword arguments are ScenarioConfig fields

    Parameters:
        kwargs(any): the parameters of the scenario such as rho_min, rho_max and rate
    """
    def __init__(self, **kwargs):
        self._random = np.random.default_rng()
        self._config = build(ScenarioConfig, **kwargs)
        self._rate_spec = rate_spec_of(self._config)
        spec = self._rate_spec
        self._rate_space = spec if isinstance(spec, ChoiceSpace) else ChoiceSpace([spec])
        self._power_space = BoxSpace(dbm_to_watts(self._config.pmax_dbm), size=self._config.cell_count)

    @property
    def config(self):
        return self._config

    @property
    def rate_space(self):
        return self._rate_space

    """
    The box [0, p_max]^K of transmit powers, useful to draw random raw network outputs
    """
    @property
    def power_space(self):
        return self._power_space

    """
    Draw one feasible problem instance

    Parameters:
        random(np.random.Generator): optional generator, the scenario's own is used otherwise

    Returns:
        ChannelRealization: a feasible instance
    """
    def sample(self, random=None):
        raise NotImplementedError("sample function is not implemented")

    """
    Draw a feasibility-filtered dataset

    Parameters:
        count(int): number of samples
        seed(int): base seed of the per-draw streams, drawn from the scenario's generator when missing
        workers(int): processes used for drawing

    Returns:
        Dataset: the generated dataset
    """
    def generate(self, count, seed=None, workers=1):
        if seed is None:
            seed = int(self._random.integers(0, 2**31 - 1))
        return generate_dataset(self._config, count=count, seed=seed, workers=workers)

    """
    Get all the needed information about an instance to judge power allocations on it quickly.

    Parameters:
        channel(ChannelRealization): the instance

    Returns:
        dict[str,any]: the channel, its constraint set, base power and d_max_star
    """
    def info(self, channel):
        cs = build_constraints(channel)
        return {
            "channel": channel,
            "constraints": cs,
            "p0": cs.p0,
            "d_max_star": cs.d_max_star,
            "feasible": cs.feasible,
        }

    def _check_power(self, info, power):
        power = np.asarray(power, dtype=float)
        if power.shape != (info["channel"].size,):
            raise InvalidArgumentError(f"power has to be of length {info['channel'].size}, got {power.shape}")
        return power

    """
    Check that a power allocation meets every rate requirement and the power box

    Parameters:
        info(dict[str,any]): the output of info
        power(float[]): the transmit powers

    Returns:
        bool: True when the allocation is feasible
    """
    def satisfaction(self, info, power):
        return meets_constraints(info["constraints"], self._check_power(info, power))

    def rates(self, info, power):
        ch = info["channel"]
        return rates_arrays(ch.gains, ch.noise_power, self._check_power(info, power))

    def sum_rate(self, info, power):
        return float(self.rates(info, power).sum())

    """
    The smallest per-user rate margin r_i - r_i,min in bit/s/Hz, negative when a requirement is missed
    """
    def rate_margin(self, info, power):
        return float(np.min(self.rates(info, power) - info["channel"].rate_min))
