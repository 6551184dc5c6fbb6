"""Desk-scale checks, run with ``pytest --runslow``."""
import numpy as np
import pytest

from conftest import random_channel
from srm_benchmark.baselines import infer_penalty_net, train_penalty_net
from srm_benchmark.config import LocalOptConfig, PenaltyConfig, ScenarioConfig, TrainConfig, worker_count
from srm_benchmark.geometry.batch import ConstraintBatch, project_batch
from srm_benchmark.geometry.checks import factor_residuals, indices_stable
from srm_benchmark.geometry.constraints import interior_point
from srm_benchmark.geometry.projection import project_forward
from srm_benchmark.geometry.qp import solve_l2_projection
from srm_benchmark.geometry.rates import rates_arrays
from srm_benchmark.harness.bench import bench
from srm_benchmark.harness.methods import CheckpointMethod, LocalOptMethod
from srm_benchmark.scenarios.dataset import generate_dataset
from srm_benchmark.scenarios.scenario import meets_constraints
from srm_benchmark.srnet import infer, init_model, train

pytestmark = pytest.mark.slow

DESK = TrainConfig(hidden=(128, 64), batch_size=512, iterations=20000, log_every=2000, seed=0)


def scenario_data(region, rate, count, seed):
    config = ScenarioConfig(rho_min=region[0], rho_max=region[1], rate=rate, count=count, seed=seed)
    return generate_dataset(config, workers=worker_count())


@pytest.fixture(scope="module")
def mixed_instances():
    sets = []
    for index, region in enumerate([(0, 3), (3, 6), (6, 9)]):
        for rate in ("0.1", "0.3", "0.5", "random"):
            sets.extend(scenario_data(region, rate, 2500, 100 + index).constraints)
    return sets


@pytest.fixture(scope="module")
def trained():
    train_set = scenario_data((0, 3), "0.1", 100000, 11)
    test_set = scenario_data((0, 3), "0.1", 10000, 12)
    srnet, _ = train(init_model(DESK, 3), train_set, DESK)
    heuristic, _ = train(init_model(DESK, 3, "srnet-heu"), train_set, DESK)
    penalty, _ = train_penalty_net(train_set, DESK, PenaltyConfig())
    return {"train": train_set, "test": test_set, "srnet": srnet, "srnet-heu": heuristic, "penalty": penalty}


def test_projection_is_always_feasible(mixed_instances, rng):
    batch = ConstraintBatch.from_sets(mixed_instances)
    for _ in range(4):
        p_hat = rng.uniform(0.0, 1.0, batch.p0.shape) * batch.p_max[:, None]
        d = rng.uniform(0.0, 1.0, batch.p0.shape) * batch.d_max_star[:, None]
        tape = project_batch(batch, p_hat, d)
        slack = np.einsum("mij,mj->mi", batch.B, tape.p_E) - batch.q
        assert np.all(slack >= -1e-8 * np.abs(batch.q).max(axis=1, keepdims=True))
        assert np.allclose(tape.p_E.max(axis=1), batch.p_max, rtol=1e-12, atol=0)


def test_gradients_on_many_instances(rng):
    checked = 0
    while checked < 1000:
        ch, cs = random_channel(rng, size=3, rate=rng.uniform(0.1, 1.0))
        tape = project_forward(cs, rng.uniform(0.05, 0.95, 3) * cs.p_max, rng.uniform(0.05, 0.95, 3) * cs.d_max_star)
        if not indices_stable(cs, tape):
            continue
        residuals = factor_residuals(ch, cs, tape)
        assert max(residuals.values()) <= 1e-5, residuals
        checked += 1


def test_geometry_extremality_and_monotonicity(rng):
    for _ in range(10000):
        _, cs = random_channel(rng, size=3)
        top = interior_point(cs, np.full(3, cs.d_max_star))
        assert np.max(top) == pytest.approx(cs.p_max, rel=1e-9)
        assert np.any(cs.p0 + cs.c_map @ np.full(3, 1.01 * cs.d_max_star) > cs.p_max)
        d = rng.uniform(0.0, cs.d_max_star, 3)
        assert np.all(interior_point(cs, d * rng.uniform(0.0, 1.0, 3)) <= interior_point(cs, d) + 1e-12)
        tape = project_forward(cs, rng.uniform(0.0, cs.p_max, 3), d)
        if not tape.feasible_input:
            assert cs.B[tape.k_eps] @ tape.p_D == pytest.approx(cs.q[tape.k_eps], rel=1e-9)
            shorter = tape.p_hat + 0.99 * tape.eps_star * (tape.p_C - tape.p_hat)
            assert np.any(cs.B @ shorter < cs.q)


def test_l2_dominance(rng):
    for _ in range(10000):
        _, cs = random_channel(rng, size=3)
        p_hat = rng.uniform(0.0, cs.p_max, 3)
        tape = project_forward(cs, p_hat, rng.uniform(0.0, cs.d_max_star, 3))
        result = solve_l2_projection(cs, p_hat)
        assert result.kkt_residual <= 1e-9
        assert np.linalg.norm(tape.p_D - p_hat) >= np.linalg.norm(result.p - p_hat) - 1e-8


def test_desk_training_beats_the_baselines(trained):
    test_set = trained["test"]
    powers, rates = infer(trained["srnet"], test_set)
    base = np.stack([cs.p0 for cs in test_set.constraints])
    base_mean = rates_arrays(test_set.gains(), test_set.noise(), base).sum(axis=1).mean()
    penalty = infer_penalty_net(trained["penalty"], test_set)
    assert all(meets_constraints(cs, p) for cs, p in zip(test_set.constraints, powers))
    assert rates.mean() >= 1.05 * base_mean
    assert rates.mean() >= penalty.sum_rates.mean()


def test_rate_mismatch(trained):
    harder = scenario_data((0, 3), "0.5", 2000, 13)
    powers, _ = infer(trained["srnet"], harder)
    assert all(meets_constraints(cs, p) for cs, p in zip(harder.constraints, powers))
    raw = infer_penalty_net(trained["penalty"], harder, fallback=False)
    assert raw.satisfied.mean() < 0.5


def test_runtime_ordering(trained):
    subset = trained["test"].take(range(200))
    rows = bench(subset, [CheckpointMethod("srnet", trained["srnet"]), CheckpointMethod("srnet-heu", trained["srnet-heu"]),
                          LocalOptMethod(LocalOptConfig())], repeats=1)
    times = {row["method"]: row["mean_time_us"] for row in rows}
    assert times["srnet"] <= times["local-opt"] / 10
    assert times["srnet-heu"] <= times["srnet"] * 1.1
