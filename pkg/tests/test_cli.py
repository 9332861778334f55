import json
import math

import numpy as np
import pytest
import scipy.io.wavfile

from modal_string_toolkit.cli.commands import main
from modal_string_toolkit.cli.config_file import WORKERS_VARIABLE, Run_Config, read_config, worker_count
from modal_string_toolkit.dataset.Dataset import load
from modal_string_toolkit.dataset.Dataset_Spec import Dataset_Role
from modal_string_toolkit.errors import Invalid_Parameter_Error
from modal_string_toolkit.gradnet.checkpoint_io import read_checkpoint
from modal_string_toolkit.solver.trajectory_io import read_trajectory
from modal_string_toolkit.training.Training_Log import read_training_log

TINY_CONFIG = """
[string]
gamma = 164.82
kappa = 1.03
nu = 164.82
sigma0 = 3.0
sigma1_hat = 2.0e-4
M = 4

[solver]
fs = 32000.0

[training]
epochs = 2
batch_size = 8
validation_period = 1
hidden_size = 8

[dataset]
M = 4

[dataset.train]
count = 2
seed = 1
fs = 32000.0
T_sim = 0.01
Te = [0.5e-3, 1.5e-3]
famp = [2.5e4, 3.5e4]
gamma = [123.48, 174.62]
kappa = [1.01, 1.05]
nu = [123.48, 174.62]
sigma0 = 3.0
sigma1 = 2.0e-4

[dataset.validation]
role = "validation"
count = 1
seed = 2
fs = 32000.0
T_sim = 0.01
Te = [0.5e-3, 1.5e-3]
famp = [3.5e4, 5.0e4]
famp_reference_hz = 61.74
gamma = [174.62, 246.94]
kappa = [1.05, 1.1]
nu = [123.48, 174.62]
sigma0 = 2.0
sigma1 = 2.0e-4

[dataset.test]
role = "test"
count = 1
seed = 3
fs = 32000.0
T_sim = 0.01
Te = [0.5e-3, 1.5e-3]
famp = [3.5e4, 5.0e4]
famp_reference_hz = 61.74
gamma = [174.62, 246.94]
kappa = [1.05, 1.1]
nu = [123.48, 174.62]
sigma0 = 2.0
sigma1 = 2.0e-4

[render]
T_sim = 0.02
window_length = 256
hop = 128
"""


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text(TINY_CONFIG)
    return path


def test_default_configuration():
    config = read_config(None)
    assert config == Run_Config()
    assert config.scaled_string() is None
    assert config.dataset.M == 20 and config.solver.fs == 32000.0


def test_configuration_file(tiny_config):
    config = read_config(tiny_config)
    assert config.scaled_string().M == 4
    assert config.training.hidden_size == 8 and config.training.adam.lr == 1e-3
    assert config.dataset.spec(Dataset_Role.Validation).role is Dataset_Role.Validation
    assert config.dataset.train.famp_reference_hz == 61.74


def test_invalid_configuration_files(tmp_path):
    (tmp_path / "broken.toml").write_text("[string\ngamma = ")
    with pytest.raises(Invalid_Parameter_Error):
        read_config(tmp_path / "broken.toml")
    (tmp_path / "negative.toml").write_text("[solver]\nfs = -1.0\n")
    with pytest.raises(Invalid_Parameter_Error):
        read_config(tmp_path / "negative.toml")
    (tmp_path / "both.toml").write_text("[string]\ngamma = 100.0\nM = 4\n\n[physical_string]\nL = 0.65\nrho = 7850.0\nr = 2e-4\nT0 = 70.0\nE = 2e11\n")
    with pytest.raises(Invalid_Parameter_Error):
        read_config(tmp_path / "both.toml")


def test_physical_string_section(tmp_path):
    path = tmp_path / "physical.toml"
    path.write_text("[physical_string]\nL = 0.65\nrho = 7850.0\nr = 2e-4\nT0 = 70.0\nE = 2e11\nM = 6\nfamp_newton = 1.0\n")
    config = read_config(path)
    string = config.scaled_string()
    assert string.M == 6
    assert string.gamma == pytest.approx(math.sqrt(70.0 / (7850.0 * math.pi * 4e-8)) / 0.65)
    assert config.scaled_excitation().famp > 0.0


def test_worker_count(monkeypatch):
    monkeypatch.delenv(WORKERS_VARIABLE, raising=False)
    assert worker_count() == 1
    assert worker_count(4) == 4
    assert worker_count(0) == 1
    monkeypatch.setenv(WORKERS_VARIABLE, "3")
    assert worker_count() == 3
    assert worker_count(2) == 2
    monkeypatch.setenv(WORKERS_VARIABLE, "many")
    with pytest.raises(Invalid_Parameter_Error):
        worker_count()


def test_check_command(capsys):
    assert main(["check", "--suite", "spectral", "--suite", "sherman-morrison"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 and all(line.startswith("PASS") for line in lines)


def test_usage_errors(capsys, tmp_path):
    assert main(["check", "--suite", "nothing"]) == 1
    assert main(["simulate", "--gamma", "164.82", "--nu", "164.82"]) == 1
    assert main(["simulate", "--trajectory", str(tmp_path / "t.mtrj")]) == 1
    assert main(["simulate", "--gamma", "164.82", "--nu", "164.82", "--length", "0.65", "--trajectory", str(tmp_path / "t.mtrj")]) == 1
    assert main(["simulate", "--gamma", "-1", "--nu", "164.82", "--trajectory", str(tmp_path / "t.mtrj")]) == 1
    assert main(["generate"]) == 1
    assert not (tmp_path / "t.mtrj").exists()
    assert "Error" in capsys.readouterr().err


def test_unstable_simulation_is_a_runtime_error(capsys, tmp_path):
    code = main(["simulate", "--gamma", "164.82", "--nu", "164.82", "--modes", "20", "--fs", "1000", "--duration", "0.01", "--trajectory",
                 str(tmp_path / "t.mtrj")])
    assert code == 2
    assert "Error:" in capsys.readouterr().err


def test_oracle_simulation(tmp_path):
    wav, trajectory = tmp_path / "pluck.wav", tmp_path / "pluck.mtrj"
    code = main(["simulate", "--gamma", "164.82", "--nu", "164.82", "--kappa", "1.03", "--modes", "6", "--duration", "0.02", "--wav", str(wav),
                 "--trajectory", str(trajectory), "--spectrogram", str(tmp_path / "pluck.csv"), "--window-length", "256", "--hop", "128"])
    assert code == 0
    stored = read_trajectory(trajectory)
    assert (stored.N, stored.M) == (640, 6)
    rate, data = scipy.io.wavfile.read(wav)
    assert rate == 32000 and data.shape == (640,)
    np.testing.assert_array_equal(data, stored.w.astype(np.float32))
    metadata = json.loads((tmp_path / "pluck.wav.json").read_text())
    assert metadata["mode"] == "float32"
    assert metadata["string"]["gamma"] == 164.82 and metadata["string"]["M"] == 6
    assert metadata["solver"]["fs"] == 32000.0
    assert (tmp_path / "pluck.csv").read_text().startswith("time,")


def test_physical_simulation(tmp_path):
    code = main(["simulate", "--length", "0.65", "--density", "7850", "--radius", "2e-4", "--tension", "70", "--youngs-modulus", "2e11",
                 "--famp-newton", "1.0", "--modes", "4", "--duration", "0.01", "--mode", "pcm16", "--wav", str(tmp_path / "steel.wav")])
    assert code == 0
    metadata = json.loads((tmp_path / "steel.wav.json").read_text())
    assert metadata["mode"] == "pcm16"
    assert metadata["string"]["gamma"] == pytest.approx(math.sqrt(70.0 / (7850.0 * math.pi * 4e-8)) / 0.65)
    assert scipy.io.wavfile.read(tmp_path / "steel.wav")[1].dtype == np.int16


def test_generate_train_evaluate(tiny_config, tmp_path, capsys):
    data = tmp_path / "data"
    assert main(["generate", "--config", str(tiny_config), "--out", str(data)]) == 0
    assert {p.name for p in data.iterdir()} == {"train", "validation", "test"}
    assert len(load(data / "train")) == 2 and load(data / "test").M == 4

    checkpoint = tmp_path / "model.gnck"
    assert main(["train", "--config", str(tiny_config), "--train-data", str(data / "train"), "--val-data", str(data / "validation"),
                 "--out", str(checkpoint), "--seed", "4"]) == 0
    params = read_checkpoint(checkpoint)
    assert (params.M, params.H) == (4, 8)
    sidecar = json.loads((tmp_path / "model.gnck.json").read_text())
    assert sidecar["train"]["seed"] == 4 and sidecar["best_epoch"] in (1, 2)
    assert len(read_training_log(tmp_path / "model.csv")) == 2

    metrics = tmp_path / "metrics.csv"
    assert main(["evaluate", "--checkpoint", str(checkpoint), "--data", str(data / "test"), "--initial-ms", "5", "--out", str(metrics),
                 "--per-mode", str(tmp_path / "modes.csv")]) == 0
    out = capsys.readouterr().out
    assert "mse_rel_q_initial" in out and "modes at or below linear error" in out
    assert metrics.read_text().startswith("trajectory,solution,")
    assert len((tmp_path / "modes.csv").read_text().splitlines()) == 5

    assert main(["evaluate", "--oracle", "--data", str(data / "test"), "--initial-ms", "5", "--out", str(metrics)]) == 0
    assert "100%" in capsys.readouterr().out
    assert main(["evaluate", "--oracle", "--checkpoint", str(checkpoint), "--data", str(data / "test"), "--out", str(metrics)]) == 1

    assert main(["simulate", "--config", str(tiny_config), "--checkpoint", str(checkpoint), "--trajectory", str(tmp_path / "model.mtrj")]) == 0
    assert read_trajectory(tmp_path / "model.mtrj").N == 640


def test_regenerating_one_split(tiny_config, tmp_path):
    assert main(["generate", "--config", str(tiny_config), "--role", "validation", "--count", "2", "--seed", "9", "--out", str(tmp_path)]) == 0
    dataset = load(tmp_path / "validation")
    assert len(dataset) == 2 and dataset.spec.seed == 9
    assert not (tmp_path / "train").exists()
