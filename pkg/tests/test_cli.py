import json
import textwrap

import pytest

from subspace_doa.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, main
from subspace_doa.errors import ConfigError
from subspace_doa.harness import config as cfgmod
from subspace_doa.harness.report import read_report
from subspace_doa.learning.checkpoint import read_metrics

CONFIG = """
[geometry]
name = "mra5"

[scene]
k_values = [1, 2]
n_per_k = 16
snr_db = [10, 20]
snapshots = 20
seed = 1

[train]
data = "train.bin"
validation = "val.bin"
checkpoint = "model.ckpt"
hidden = [16]
epochs = 2
batch_size = 8
lr = 0.01

[sweep]
methods = ["da_ssm", "learned_subspace"]
snr_db = [0, 20]
snapshots = [20]
k = [1, 2]
n_angles = 2
n_noise = 2
seed = 4
results = "results.csv"
checkpoints = { learned_subspace = "model.ckpt" }
"""


def _write(path, text):
    path.write_text(textwrap.dedent(text))
    return str(path)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    _write(tmp_path / "run.toml", CONFIG)
    return tmp_path


def _pipeline(cfg="run.toml"):
    assert main(["simulate", "--config", cfg, "--out", "train.bin"]) == EXIT_OK
    assert main(["simulate", "--config", cfg, "--out", "val.bin", "--seed", "2"]) == EXIT_OK
    assert main(["train", "--config", cfg]) == EXIT_OK
    assert main(["sweep", "--config", cfg]) == EXIT_OK


def test_full_pipeline(workdir, capsys):
    _pipeline()
    metrics = read_metrics(workdir / "model.ckpt.metrics.jsonl")
    assert [m["epoch"] for m in metrics] == [1, 2]
    assert set(metrics[0]) == {"epoch", "loss", "val_distance", "wall_time"}
    cells = read_report(workdir / "results.csv")
    assert len(cells) == 8
    assert main(["evaluate", "--config", "run.toml", "--out", "eval.json"]) == EXIT_OK
    result = json.loads((workdir / "eval.json").read_text())
    assert result["records"] == 32 and result["mean_distance"] >= 0
    capsys.readouterr()
    assert main(["report", "--config", "run.toml", "--out", "results.json"]) == EXIT_OK
    assert "learned_subspace" in capsys.readouterr().out
    assert read_report(workdir / "results.json") == cells


def test_pipeline_is_reproducible(workdir):
    _pipeline()
    first = (workdir / "results.csv").read_bytes()
    for name in ("train.bin", "val.bin", "model.ckpt", "results.csv"):
        (workdir / name).unlink()
    _pipeline()
    assert (workdir / "results.csv").read_bytes() == first


def test_seed_override_changes_data(workdir):
    main(["simulate", "--config", "run.toml", "--out", "a.bin"])
    main(["simulate", "--config", "run.toml", "--out", "b.bin", "--seed", "99"])
    main(["simulate", "--config", "run.toml", "--out", "c.bin"])
    assert (workdir / "a.bin").read_bytes() == (workdir / "c.bin").read_bytes()
    assert (workdir / "a.bin").read_bytes() != (workdir / "b.bin").read_bytes()


@pytest.mark.parametrize(
    "text",
    [
        "[scene]\nbogus = 1\n",
        "[extra]\nx = 1\n",
        "[geometry]\nname = 'mra77'\n",
        "[geometry]\nM = 10\n",
        "[scene]\nk_values = [9]\nmin_sep = 0.5\n",
        "not toml at all [",
        "scene = 3\n",
    ],
)
def test_config_errors_exit_2(workdir, text):
    cfg = _write(workdir / "bad.toml", text)
    assert main(["simulate", "--config", cfg]) == EXIT_CONFIG


def test_missing_required_keys_exit_2(workdir):
    cfg = _write(workdir / "bad.toml", "[train]\nepochs = 1\n")
    assert main(["train", "--config", cfg]) == EXIT_CONFIG
    cfg = _write(workdir / "bad2.toml", "[sweep]\nmethods = ['learned_e2e']\n")
    assert main(["sweep", "--config", cfg]) == EXIT_CONFIG
    assert main(["report", "--config", cfg]) == EXIT_CONFIG


def test_bad_arguments_exit_2(workdir):
    assert main(["teleport", "--config", "run.toml"]) == EXIT_CONFIG
    assert main(["simulate"]) == EXIT_CONFIG


def test_io_errors_exit_4(workdir):
    assert main(["simulate", "--config", "nope.toml"]) == EXIT_IO
    assert main(["train", "--config", "run.toml"]) == EXIT_IO  # train.bin absent
    (workdir / "train.bin").write_bytes(b"garbage")
    assert main(["train", "--config", "run.toml"]) == EXIT_IO
    assert main(["simulate", "--config", "run.toml", "--out", str(workdir / "no" / "x.bin")]) == EXIT_IO


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_exit_3(workdir):
    text = CONFIG.replace("lr = 0.01", "lr = 1e200\nloss = \"fro_gram\"")
    cfg = _write(workdir / "hot.toml", text)
    main(["simulate", "--config", cfg, "--out", "train.bin"])
    main(["simulate", "--config", cfg, "--out", "val.bin"])
    assert main(["train", "--config", cfg]) == EXIT_NUMERIC


def test_config_defaults_and_explicit_geometry():
    cfg = cfgmod.validate({"geometry": {"M": 7, "S": [1, 2, 5, 7], "gamma": [0.1, 0.2]}})
    geom = cfgmod.geometry_from(cfg)
    assert geom.M == 7 and geom.S == (1, 2, 5, 7)
    assert cfgmod.gamma_from(cfg) == complex(0.1, 0.2)
    spec = cfgmod.dataset_spec_from(cfg, geom)
    assert spec.k_values == tuple(range(1, 7)) and spec.T == 50
    sweep = cfgmod.sweep_spec_from(cfg, geom)
    assert sweep.trials == 400 and sweep.methods == ("da_ssm",)
    assert cfgmod.training_config_from(cfg).batch_size == 256


def test_config_rho_options():
    geom = cfgmod.geometry_from({})
    uniform = cfgmod.dataset_spec_from({"scene": {"rho": "uniform"}}, geom)
    assert uniform.rho is None and uniform.imperfection is not None
    fixed = cfgmod.dataset_spec_from({"scene": {"rho": 0.4}}, geom)
    assert fixed.rho == 0.4
    with pytest.raises(ConfigError):
        cfgmod.dataset_spec_from({"scene": {"rho": "sometimes"}}, geom)
    with pytest.raises(ConfigError):
        cfgmod.gamma_from({"geometry": {"gamma": [1.0]}})
