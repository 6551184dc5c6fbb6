import numpy as np

from srm_benchmark.scenarios.channel import ChannelRealization

"""
SRM Environment class. This is the class the user interacts with. Please don't construct it by
hand but use the make function from srm_benchmark. For example, the following code creates the
environment for three cell-edge cells at a 0.1 bit/s/Hz rate requirement.

import srm_benchmark

env = srm_benchmark.make('celledge-0-3dB-0.1-v0')
"""
class SRMEnv:
    """
    Parameters:
        name(str): the string name that defines the current scenario
        scenario(Scenario): a subclass of Scenario that draws and judges the instances
    """
    def __init__(self, name, scenario):
        self._name = name
        self._scenario = scenario

    @property
    def name(self):
        return self._name

    @property
    def scenario(self):
        return self._scenario

    """
    The space the per-UE rate requirements are drawn from

    Returns:
        ChoiceSpace: a single value for fixed-rate scenarios, the rate grid otherwise
    """
    @property
    def rate_space(self):
        return self._scenario.rate_space

    """
    The box [0, p_max]^K a power allocation has to lie in

    Returns:
        BoxSpace: the power box of the scenario
    """
    @property
    def power_space(self):
        return self._scenario.power_space

    """
    Adjust the seed of the random number generator used by the scenario

    Parameters:
        seed(int): the seed for the random number generator used by the scenario
    """
    def seed(self, seed):
        self._scenario._random = np.random.default_rng(seed)
        self.rate_space.seed(seed)
        self.power_space.seed(seed)

    def sample(self):
        return self._scenario.sample()

    """
    Draw a feasibility-filtered dataset for the scenario

    Parameters:
        count(int): number of feasible samples
        seed(int): optional base seed, drawn from the environment generator otherwise
        workers(int): processes used for drawing

    Returns:
        Dataset: the feasible samples with their generation statistics
    """
    def generate(self, count, seed=None, workers=1):
        return self._scenario.generate(count, seed=seed, workers=workers)

    """
    Calculate the cached information of one or many channels

    Parameters:
        channels(ChannelRealization|ChannelRealization[]): the instances

    Returns:
        dict|dict[]: the info of every instance, a single one for a single input
    """
    def info(self, channels):
        if isinstance(channels, ChannelRealization):
            return self._scenario.info(channels)
        if isinstance(channels, dict):
            return channels
        if not hasattr(channels, "__len__"):
            raise ValueError("wrong input for the function, expected channel realizations")
        return [c if isinstance(c, dict) else self._scenario.info(c) for c in channels]

    def _pairs(self, channels, powers):
        infos = self.info(channels)
        single = isinstance(infos, dict)
        if single:
            infos = [infos]
            powers = [powers]
        powers = np.asarray(powers, dtype=float)
        if len(infos) != len(powers):
            raise ValueError(f"got {len(infos)} channels but {len(powers)} power allocations")
        return single, infos, powers

    """
    Check every power allocation against its instance's rate and power constraints

    Parameters:
        channels(any|any[]): channels or infos
        powers(float[]|float[][]): the matching power allocations

    Returns:
        float: the fraction of feasible allocations
        bool[]: feasibility per allocation
        any[]: the infos, they can be passed again instead of the channels
    """
    def satisfaction(self, channels, powers):
        single, infos, powers = self._pairs(channels, powers)
        passed = np.array([self._scenario.satisfaction(i, p) for i, p in zip(infos, powers)])
        if single:
            return float(passed[0]), passed[0], infos[0]
        return float(passed.mean()) if len(passed) else 0.0, passed, infos

    """
    Calculate the sum rate of every power allocation

    Returns:
        float: the mean sum rate in bit/s/Hz
        float[]: sum rate per allocation
        any[]: the infos
    """
    def sum_rate(self, channels, powers):
        single, infos, powers = self._pairs(channels, powers)
        rates = np.array([self._scenario.sum_rate(i, p) for i, p in zip(infos, powers)])
        if single:
            return rates[0], rates[0], infos[0]
        return float(rates.mean()) if len(rates) else 0.0, rates, infos

    """
    Evaluate power allocations for constraint satisfaction and sum rate

    Parameters:
        channels(any|any[]): channels or infos
        powers(float[]|float[][]): the matching power allocations

    Returns:
        float: satisfaction probability
        float: mean sum rate
        dict[str,any[]]: per-allocation satisfaction, sum rate and minimum rate margin
        any[]: the infos of all the channels
    """
    def evaluate(self, channels, powers):
        single, infos, powers = self._pairs(channels, powers)
        sat_score, satisfied, _ = self.satisfaction(infos, powers)
        rate_score, rates, _ = self.sum_rate(infos, powers)
        margins = np.array([self._scenario.rate_margin(i, p) for i, p in zip(infos, powers)])
        details = {"satisfaction": satisfied, "sum_rate": rates, "rate_margin": margins}
        if single:
            return sat_score, rate_score, {k: v[0] for k, v in details.items()}, infos[0]
        return sat_score, rate_score, details, infos
