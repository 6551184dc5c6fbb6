from srm_benchmark.srm_env import SRMEnv
from srm_benchmark.scenarios import SCENARIOS
from difflib import SequenceMatcher

"""
Add a scenario under a name of its own, next to the celledge-{rho_min}-{rho_max}dB-{rate}-v0
family shipped with the package. A scenario class with ScenarioConfig keyword arguments is
enough, e.g. a wider cell-edge region or another rate requirement.

Parameters:
    name (string): the registry key, e.g. celledge-0-9dB-0.2-v0
    scenarioClass (class): a subclass of srm_benchmark.scenarios.scenario.Scenario
    scenarioArgs (dict[string,any]): ScenarioConfig overrides such as rho_min, rho_max, rate
    or cell_count
"""
def register(name, scenarioClass, scenarioArgs=None):
    if name in SCENARIOS:
        raise AttributeError(f'scenario {name} is already registered')
    SCENARIOS[name] = (scenarioClass, dict(scenarioArgs or {}))

"""
Names of the registered scenarios, the shipped cell-edge grid first and then anything added
through register.

Returns:
    string[]: the scenario names
"""
def list():
    return [name for name in SCENARIOS]

"""
Build the environment of a registered scenario. Unknown names fail with the closest
registered name in the message, since the region and rate parts are easy to mistype.

Parameters:
    name (string): a registered scenario name

Returns:
    SRMEnv: draws channel instances and judges power allocations against their rate and power
    constraints
"""
def make(name):
    if name not in SCENARIOS:
        closest = max(SCENARIOS, key=lambda n: SequenceMatcher(None, n, name).ratio(), default="")
        raise NotImplementedError(f'scenario {name} is not registered, did you mean {closest}?')
    entry = SCENARIOS[name]
    scenarioClass, scenarioArgs = (entry[0], entry[1] if len(entry) > 1 else {}) \
        if isinstance(entry, tuple) else (entry, {})
    return SRMEnv(name, scenarioClass(**scenarioArgs))
