import json

import numpy as np
import pandas as pd
import pytest

from srm_benchmark.config import RATE_GRID, LocalOptConfig, PenaltyConfig, TrainConfig
from srm_benchmark.baselines.penalty import train_penalty_net
from srm_benchmark.errors import DivergedError, InvalidArgumentError
from srm_benchmark.harness import cli
from srm_benchmark.harness.bench import bench, write_bench
from srm_benchmark.harness.evaluate import evaluate, write_report, write_samples
from srm_benchmark.harness.methods import (BasePowerMethod, CheckpointMethod, EnsembleMethod, LocalOptMethod,
                                           resolve_method)
from srm_benchmark.harness.project import dump, load_instance, parse_matrix
from srm_benchmark.harness.workers import ordered_map
from srm_benchmark.scenarios.dataset import load_dataset, save_dataset
from srm_benchmark.spaces import ChoiceSpace
from srm_benchmark.srnet import compute_stats, init_model, save_model

TOY = TrainConfig(hidden=(8, 8), batch_size=8, iterations=5, log_every=0, seed=2)


@pytest.fixture(scope="module")
def srnet_model(small_dataset):
    model = init_model(TOY, 3)
    model.feature_stats = compute_stats(small_dataset.gains())
    return model.eval()


@pytest.fixture(scope="module")
def penalty_model(small_dataset):
    return train_penalty_net(small_dataset, TOY, PenaltyConfig())[0]


class TestEvaluate:
    def test_base_power(self, small_dataset):
        report = evaluate(small_dataset, [BasePowerMethod()], test_name="small")
        summary = report.methods[0]
        assert summary.method == "p0"
        assert summary.satisfaction == summary.satisfaction_raw == 1.0
        assert summary.fallback_rate == 0.0
        assert np.allclose(summary.margins, 0.0, atol=1e-9)
        document = report.to_dict()
        assert document["schema"] == 1
        assert document["sample_count"] == len(small_dataset)
        assert document["region_db"] == [0.0, 3.0]

    def test_networks(self, small_dataset, srnet_model, penalty_model):
        methods = [CheckpointMethod("srnet.ckpt", srnet_model), CheckpointMethod("penalty.ckpt", penalty_model)]
        srnet, penalty = evaluate(small_dataset, methods).methods
        assert srnet.satisfaction == srnet.satisfaction_raw == 1.0
        assert penalty.satisfaction == 1.0
        assert penalty.satisfaction_raw <= 1.0
        assert penalty.fallback_rate == pytest.approx(1.0 - penalty.satisfaction_raw, abs=0.05)

    def test_ensemble_method(self, small_dataset, penalty_model):
        method = EnsembleMethod(["a", "b"], [penalty_model, penalty_model.copy()])
        output = method.run(small_dataset)
        assert method.name == "ensemble:a,b"
        assert output.powers.shape == output.raw.shape == (len(small_dataset), 3)

    def test_local_opt_is_seeded(self, small_dataset):
        subset = small_dataset.take([0, 1, 2])
        method = LocalOptMethod(LocalOptConfig(starts=2))
        first = method.run(subset, seed=4, workers=1)
        second = method.run(subset, seed=4, workers=1)
        assert np.array_equal(first.powers, second.powers)
        assert first.times_us.shape == (3,)

    def test_empty_test_set(self, small_dataset):
        with pytest.raises(InvalidArgumentError):
            evaluate(small_dataset.take([]), [BasePowerMethod()])

    def test_files(self, small_dataset, tmp_path):
        reports = [evaluate(small_dataset, [BasePowerMethod()], test_name=name) for name in ("a", "b")]
        write_report(reports, tmp_path / "report.json")
        write_samples(reports, tmp_path / "samples.csv")
        document = json.loads((tmp_path / "report.json").read_text())
        assert len(document["reports"]) == 2
        assert len(document["trend"]) == 2
        samples = pd.read_csv(tmp_path / "samples.csv")
        assert list(samples.columns) == ["test", "sample", "method", "sum_rate", "min_rate_margin", "time_us"]
        assert len(samples) == 2 * len(small_dataset)
        assert list(samples["test"].unique()) == ["a", "b"]
        assert np.allclose(samples["sum_rate"][:len(small_dataset)], reports[0].methods[0].sum_rates, rtol=1e-15, atol=0)

    def test_resolve(self):
        assert isinstance(resolve_method("p0"), BasePowerMethod)
        assert isinstance(resolve_method("local-opt"), LocalOptMethod)

    def test_ordered_map(self):
        assert ordered_map(abs, [-3, 2, -1], workers=1) == [3, 2, 1]


class TestBench:
    def test_rows(self, small_dataset):
        rows = bench(small_dataset.take(range(8)), [BasePowerMethod()], repeats=2)
        assert rows[0]["method"] == "p0"
        assert rows[0]["instances"] == 8
        assert rows[0]["mean_time_us"] >= 0

    def test_repeats(self, small_dataset):
        with pytest.raises(InvalidArgumentError):
            bench(small_dataset, [BasePowerMethod()], repeats=0)

    def test_write(self, tmp_path):
        with open(tmp_path / "bench.csv", "w", newline="") as fh:
            write_bench([{"method": "p0", "instances": 1, "repeats": 1, "mean_time_us": 1.0, "std_time_us": 0.0}], fh)
        assert (tmp_path / "bench.csv").read_text().splitlines()[0] == "method,instances,repeats,mean_time_us,std_time_us"


class TestProject:
    def test_dump(self, identity_set):
        text = "\n".join(dump(None, identity_set, np.array([0.1, 0.9]), np.array([0.25, 0.25])))
        assert "eps_star    = 0.6153846154 (row 0)" in text
        assert "p_E         = [0.619047619, 1] (k_max 1)" in text

    def test_dump_with_channel(self):
        ch, cs = load_instance(gains="1,0.1;0.1,1", gamma="0.5,0.5", p_max=1.0, noise=0.1)
        text = "\n".join(dump(ch, cs, np.array([0.02, 0.5]), np.array([0.1, 0.1])))
        assert "dJ/dp_E" in text
        assert "dJ/dp_hat chain residual" in text

    def test_matrix(self):
        assert np.array_equal(parse_matrix("1,2;3,4"), [[1.0, 2.0], [3.0, 4.0]])
        with pytest.raises(InvalidArgumentError):
            parse_matrix("1,2;3")

    def test_needs_an_instance(self):
        with pytest.raises(InvalidArgumentError):
            load_instance()


class TestCommandLine:
    def test_project(self, capsys):
        code = cli.main(["project", "--B", "1,0;0,1", "--q", "0.5,0.5", "--phat", "0.1,0.9", "--d", "0.25,0.25"])
        assert code == 0
        assert "0.6153846" in capsys.readouterr().out

    def test_project_infeasible(self, capsys):
        code = cli.main(["project", "--B", "1,0;0,1", "--q", "2,2", "--phat", "0.1,0.9", "--heuristic"])
        assert code == 4
        assert "p0 = 2, 2" in capsys.readouterr().out

    def test_usage_errors(self):
        assert cli.main(["project", "--B", "1,0;0,1", "--q", "0.5,0.5", "--phat", "0.1,0.9"]) == 2
        with pytest.raises(SystemExit) as info:
            cli.main(["generate", "--region", "0,3"])
        assert info.value.code == 2

    def test_missing_dataset(self, tmp_path):
        assert cli.main(["eval", "--test", str(tmp_path / "none.csv"), "--method", "p0",
                         "--out", str(tmp_path / "r.json")]) == 1

    def test_diverged(self, tmp_path, small_dataset, monkeypatch):
        data = tmp_path / "data.csv"
        save_dataset(small_dataset, data)

        def explode(*args, **kwargs):
            raise DivergedError(7, float("nan"))
        monkeypatch.setattr(cli, "train", explode)
        assert cli.main(["train", "--data", str(data), "--out", str(tmp_path / "m.ckpt")]) == 3

    def test_generate_train_eval(self, tmp_path, monkeypatch, capsys):
        monkeypatch.delenv("SRM_WORKERS", raising=False)
        config = tmp_path / "small.cfg"
        config.write_text("hidden = 8,8\nbatch_size = 8\nlog_every = 0\n")
        data = tmp_path / "data.csv"
        model = tmp_path / "model.ckpt"
        report = tmp_path / "report.json"
        assert cli.main(["generate", "--region", "0,3", "--lambda", "0.2", "--count", "16", "--seed", "3",
                         "--out", str(data)]) == 0
        assert "16 feasible samples" in capsys.readouterr().out
        assert cli.main(["train", "--data", str(data), "--config", str(config), "--iterations", "3",
                         "--out", str(model)]) == 0
        assert len((tmp_path / "model.ckpt.trace.csv").read_text().splitlines()) == 4
        assert cli.main(["eval", "--test", str(data), "--method", "p0", "--method", str(model),
                         "--out", str(report)]) == 0
        document = json.loads(report.read_text())
        assert [m["method"] for m in document["reports"][0]["methods"]] == ["p0", str(model)]
        assert all(m["satisfaction"] == 1.0 for m in document["reports"][0]["methods"])
        assert (tmp_path / "report.samples.csv").exists()

    def test_penalty_training(self, tmp_path, small_dataset):
        data = tmp_path / "data.csv"
        save_dataset(small_dataset, data)
        config = tmp_path / "small.cfg"
        config.write_text("hidden = 8,8\nbatch_size = 8\nlog_every = 0\nweight_grid = 1,10\n")
        model = tmp_path / "penalty.ckpt"
        assert cli.main(["train", "--data", str(data), "--variant", "penalty-mul", "--config", str(config),
                         "--iterations", "2", "--search-weight", "--out", str(model)]) == 0
        assert CheckpointMethod(str(model)).model.variant == "penalty-mul"

    def test_random_rate_dataset(self, tmp_path, monkeypatch):
        monkeypatch.delenv("SRM_WORKERS", raising=False)
        data = tmp_path / "random.csv"
        assert cli.main(["generate", "--region", "6,9", "--lambda-random", "--count", "8", "--seed", "4",
                         "--out", str(data)]) == 0
        dataset = load_dataset(data)
        assert dataset.meta.rate_spec == "random"
        rates = np.concatenate([ch.rate_min for ch in dataset.samples])
        grid = ChoiceSpace(RATE_GRID)
        assert all(grid.isSampled(round(r, 12)) for r in rates)

    def test_rate_domain_penalty_training(self, tmp_path, small_dataset):
        data = tmp_path / "data.csv"
        save_dataset(small_dataset, data)
        config = tmp_path / "small.cfg"
        config.write_text("hidden = 8,8\nbatch_size = 8\nlog_every = 0\n")
        model = tmp_path / "penalty.ckpt"
        assert cli.main(["train", "--data", str(data), "--variant", "penalty-add", "--penalty-domain", "rate",
                         "--config", str(config), "--iterations", "3", "--out", str(model)]) == 0
        trace = pd.read_csv(tmp_path / "penalty.ckpt.trace.csv")
        assert list(trace.columns) == ["step", "loss"]
        assert len(trace) == 3 and np.all(np.isfinite(trace["loss"]))
        assert CheckpointMethod(str(model)).model.variant == "penalty-add"


def test_checkpoint_method_loads_files(tmp_path, srnet_model, small_dataset):
    path = tmp_path / "srnet.ckpt"
    save_model(srnet_model, path)
    method = resolve_method(str(path))
    assert method.name == str(path)
    assert np.allclose(method.run(small_dataset).powers, CheckpointMethod("x", srnet_model).run(small_dataset).powers)
