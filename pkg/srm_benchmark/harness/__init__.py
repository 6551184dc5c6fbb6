from srm_benchmark.harness.evaluate import EvalReport, MethodSummary, evaluate, trend_table
from srm_benchmark.harness.bench import bench
from srm_benchmark.harness.methods import resolve_method
