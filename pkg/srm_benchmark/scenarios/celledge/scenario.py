import logging
import math

from srm_benchmark.errors import DegenerateGeometryError, SingularGeometryError, YieldTooLowError
from srm_benchmark.geometry.constraints import build_constraints
from srm_benchmark.scenarios.channel import sample_channel
from srm_benchmark.scenarios.dataset import YIELD_EVIDENCE
from srm_benchmark.scenarios.layout import NetworkLayout
from srm_benchmark.scenarios.scenario import Scenario

logger = logging.getLogger(__name__)


class CellEdgeScenario(Scenario):
    def __init__(self, **kwargs):
        Scenario.__init__(self, **kwargs)
        self._layout = NetworkLayout(self._config.cell_count, self._config.cell_radius)
        self._region = (self._config.rho_min, self._config.rho_max)

    @property
    def layout(self):
        return self._layout

    def sample(self, random=None):
        random = random or self._random
        config = self._config
        cap = math.ceil(YIELD_EVIDENCE / config.yield_floor)
        for _ in range(cap):
            ch = sample_channel(self._layout, self._region, self._rate_spec, random, pmax_dbm=config.pmax_dbm,
                                sigma2_dbm=config.sigma2_dbm, shadowing_std_db=config.shadowing_std_db,
                                attempt_cap=config.attempt_cap)
            try:
                if build_constraints(ch).feasible:
                    return ch
            except (DegenerateGeometryError, SingularGeometryError):
                logger.debug("dropping a degenerate draw")
        raise YieldTooLowError(0, cap, config.yield_floor)
