"""
Evaluation of methods on test sets: JSON report per run and a per-sample CSV.

Satisfaction is measured twice, on the raw method output and on the output after the
base-power fallback; only penalty methods can differ between the two.
"""
import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd

from srm_benchmark.errors import InvalidArgumentError
from srm_benchmark.geometry.rates import rates_arrays
from srm_benchmark.scenarios.scenario import meets_constraints

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SAMPLE_COLUMNS = ("test", "sample", "method", "sum_rate", "min_rate_margin", "time_us")


@dataclass
class MethodSummary:
    method: str
    mean_sum_rate: float
    satisfaction_raw: float
    satisfaction: float
    fallback_rate: float
    mean_time_us: float
    sum_rates: np.ndarray = field(repr=False)
    margins: np.ndarray = field(repr=False)
    times_us: np.ndarray = field(repr=False)


@dataclass
class EvalReport:
    test: str
    sample_count: int
    seed: int
    rho_min: float
    rho_max: float
    rate_spec: str
    methods: list
    config: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "test": self.test,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "region_db": [self.rho_min, self.rho_max],
            "rate_spec": self.rate_spec,
            "config": self.config,
            "methods": [{k: v for k, v in asdict(m).items() if k not in ("sum_rates", "margins", "times_us")}
                        for m in self.methods],
        }


def summarize(name, dataset, output):
    gains, noise = dataset.gains(), dataset.noise()
    rates = rates_arrays(gains, noise, output.powers)
    margins = (rates - np.log2(1.0 + dataset.gamma_min())).min(axis=1)
    raw_ok = np.array([meets_constraints(cs, p) for cs, p in zip(dataset.constraints, output.raw)])
    final_ok = np.array([meets_constraints(cs, p) for cs, p in zip(dataset.constraints, output.powers)])
    replaced = np.any(output.raw != output.powers, axis=1)
    return MethodSummary(method=name, mean_sum_rate=float(rates.sum(axis=1).mean()),
                         satisfaction_raw=float(raw_ok.mean()), satisfaction=float(final_ok.mean()),
                         fallback_rate=float(replaced.mean()), mean_time_us=float(output.times_us.mean()),
                         sum_rates=rates.sum(axis=1), margins=margins, times_us=output.times_us)


def evaluate(dataset, methods, test_name="test", seed=0, config=None, workers=None):
    """
    Run every method over the whole test set.

    Parameters:
        dataset(Dataset): feasible test samples
        methods(Method[]): the methods to compare
        test_name(str): label of the test set in the report
        seed(int): seeds the randomised methods
        config(dict): echoed in the report

    Returns:
        EvalReport: one summary per method
    """
    if len(dataset) == 0:
        raise InvalidArgumentError("the test set is empty")
    summaries = []
    for method in methods:
        summary = summarize(method.name, dataset, method.run(dataset, seed=seed, workers=workers))
        logger.info("%s on %s: sum rate %.4f, satisfaction %.4f (raw %.4f), %.1f us per instance",
                    method.name, test_name, summary.mean_sum_rate, summary.satisfaction,
                    summary.satisfaction_raw, summary.mean_time_us)
        summaries.append(summary)
    meta = dataset.meta
    return EvalReport(test=test_name, sample_count=len(dataset), seed=seed, rho_min=meta.rho_min,
                      rho_max=meta.rho_max, rate_spec=meta.rate_spec, methods=summaries, config=config or {})


def trend_table(reports):
    """Mean sum rate and satisfaction per (method, region, rate requirement), sorted by rate."""
    rows = []
    for report in reports:
        for m in report.methods:
            rows.append({"method": m.method, "region_db": [report.rho_min, report.rho_max],
                         "rate_spec": report.rate_spec, "mean_sum_rate": m.mean_sum_rate,
                         "satisfaction": m.satisfaction, "satisfaction_raw": m.satisfaction_raw})

    def rate_key(row):
        try:
            return (row["method"], row["region_db"], 0, float(row["rate_spec"]))
        except ValueError:
            return (row["method"], row["region_db"], 1, 0.0)
    return sorted(rows, key=rate_key)


def write_report(reports, path):
    document = {"schema": SCHEMA_VERSION, "reports": [r.to_dict() for r in reports]}
    if len(reports) > 1:
        document["trend"] = trend_table(reports)
    with open(path, "w") as fh:
        json.dump(document, fh, indent=2)


def write_samples(reports, path):
    frames = [pd.DataFrame({"test": report.test, "sample": np.arange(len(m.sum_rates)), "method": m.method,
                            "sum_rate": m.sum_rates, "min_rate_margin": m.margins, "time_us": m.times_us},
                           columns=list(SAMPLE_COLUMNS))
              for report in reports for m in report.methods]
    table = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=list(SAMPLE_COLUMNS))
    table.to_csv(path, index=False, float_format="%.17g")
