from srm_benchmark.scenarios.scenario import Scenario
from importlib import import_module
import os

"""
Scenario registry: name -> (Scenario subclass, ScenarioConfig overrides)
"""
SCENARIOS = {
}

# a scenario family is a sub-package exporting its own SCENARIOS dict, e.g. celledge
_here = os.path.dirname(__file__)
families = sorted(f for f in os.listdir(_here)
                  if not f.startswith((".", "__")) and os.path.isdir(os.path.join(_here, f)))

for family in families:
    module = import_module(f"srm_benchmark.scenarios.{family}")
    SCENARIOS.update(getattr(module, "SCENARIOS", {}))
