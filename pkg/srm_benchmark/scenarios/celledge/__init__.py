from srm_benchmark.scenarios.celledge.scenario import CellEdgeScenario

REGIONS = ((0, 3), (3, 6), (6, 9))
RATES = ("0.1", "0.2", "0.3", "0.4", "0.5")

SCENARIOS = {}
for rho_min, rho_max in REGIONS:
    for rate in RATES:
        SCENARIOS[f"celledge-{rho_min}-{rho_max}dB-{rate}-v0"] = \
            (CellEdgeScenario, {"rho_min": rho_min, "rho_max": rho_max, "rate": rate})
    SCENARIOS[f"celledge-{rho_min}-{rho_max}dB-random-v0"] = \
        (CellEdgeScenario, {"rho_min": rho_min, "rho_max": rho_max, "rate": "random"})
