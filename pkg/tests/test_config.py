import pytest

from srm_benchmark.config import (PRESETS, LocalOptConfig, PenaltyConfig, ScenarioConfig, TrainConfig, build,
                                  read_config, worker_count)
from srm_benchmark.errors import ConfigError


def test_read_config_and_build(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# desk run\npreset = desk\niterations = 10  # short\nhidden = 16, 8\n\nweight = 2.5\nrho_max=6\n")
    values = read_config(path)
    train = build(TrainConfig, values)
    assert train.iterations == 10
    assert train.hidden == (16, 8)
    assert train.batch_size == PRESETS["desk"]["batch_size"]
    assert build(PenaltyConfig, values).weight == 2.5
    assert build(ScenarioConfig, values).rho_max == 6.0


def test_full_preset():
    train = build(TrainConfig, {"preset": "full"})
    assert train.hidden == (720, 360, 180, 90)
    assert train.batch_size == 8000


def test_overrides_win_and_none_is_ignored():
    train = build(TrainConfig, {"iterations": "5"}, iterations=7, seed=None)
    assert train.iterations == 7
    assert train.seed == 0


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("iterashuns = 3\n")
    with pytest.raises(ConfigError):
        read_config(path)


def test_bad_value_rejected():
    with pytest.raises(ConfigError):
        build(TrainConfig, {"iterations": "many"})


def test_unknown_preset_rejected():
    with pytest.raises(ConfigError):
        build(TrainConfig, {"preset": "huge"})


@pytest.mark.parametrize("section, kwargs", [
    (TrainConfig, {"batch_size": 1}),
    (PenaltyConfig, {"weight": -1.0}),
    (PenaltyConfig, {"ensemble_size": 0}),
    (PenaltyConfig, {"mode": "both"}),
    (LocalOptConfig, {"starts": 0}),
    (ScenarioConfig, {"cell_count": 1}),
])
def test_invalid_fields(section, kwargs):
    with pytest.raises(ConfigError):
        section(**kwargs)


def test_worker_count(monkeypatch):
    monkeypatch.setenv("SRM_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("SRM_WORKERS", "zero")
    with pytest.raises(ConfigError):
        worker_count()
    monkeypatch.delenv("SRM_WORKERS")
    assert worker_count() == 1
