import csv

import numpy as np
import numpy.testing as npt
import pytest

from modal_string_toolkit.dataset.Dataset import generate
from modal_string_toolkit.dataset.Dataset_Spec import Dataset_Role, desk_evaluation_spec
from modal_string_toolkit.errors import Invalid_Parameter_Error, Undefined_Metric_Error
from modal_string_toolkit.evaluation.evaluation_runner import evaluate_dataset
from modal_string_toolkit.evaluation.metrics import METRIC_NAMES, Trajectory_Metrics, mae_rel, mse_rel, per_mode_mse, trajectory_metrics, \
    write_metrics_csv, write_per_mode_csv
from modal_string_toolkit.solver.SAV_Solver import SAV_Solver
from modal_string_toolkit.spectral.Potential_Field import Zero_Field
from modal_string_toolkit.spectral.Spectral_Nonlinearity import Spectral_Nonlinearity


@pytest.fixture(scope="module")
def evaluation_data():
    return generate(desk_evaluation_spec(Dataset_Role.Test, count=2, seed=8, T_sim=0.01), M=4)


def test_relative_errors():
    target = np.array([[1.0, -1.0], [2.0, 0.0]])
    predicted = np.array([[1.0, -2.0], [2.0, 1.0]])
    assert mse_rel(predicted, target) == pytest.approx(2.0 / 6.0)
    assert mae_rel(predicted, target) == pytest.approx(2.0 / 4.0)
    assert mse_rel(target, target) == 0.0
    assert mse_rel(np.zeros(3), np.ones(3)) == 1.0


def test_undefined_metrics():
    with pytest.raises(Undefined_Metric_Error):
        mse_rel(np.ones(4), np.zeros(4))
    with pytest.raises(Undefined_Metric_Error):
        mae_rel(np.ones(4), np.zeros(4))
    with pytest.raises(Undefined_Metric_Error):
        mse_rel(np.zeros(0), np.zeros(0))
    with pytest.raises(Invalid_Parameter_Error):
        mse_rel(np.ones(4), np.ones(5))


def test_per_mode_error():
    target = np.zeros((10, 3))
    predicted = np.zeros((10, 3))
    predicted[:5, 1] = 2.0
    predicted[5:, 2] = 1.0
    npt.assert_allclose(per_mode_mse(predicted, target, 5), [0.0, 4.0, 0.0])
    npt.assert_allclose(per_mode_mse(predicted, target, 10), [0.0, 2.0, 0.5])
    with pytest.raises(Undefined_Metric_Error):
        per_mode_mse(predicted, target, 0)
    with pytest.raises(Invalid_Parameter_Error):
        per_mode_mse(predicted, target, 11)


def test_trajectory_metrics(string, ops, excitation, config):
    target = SAV_Solver(ops, Spectral_Nonlinearity(ops.M), string.nu, config, excitation).simulate(640)
    linear = SAV_Solver(ops, Zero_Field(ops.M), string.nu, config, excitation).simulate(640)
    exact = trajectory_metrics(target, target, initial_seconds=0.01)
    assert all(getattr(exact, name) == 0.0 for name in METRIC_NAMES)
    scores = trajectory_metrics(linear, target, initial_seconds=0.01)
    assert all(getattr(scores, name) > 0.0 for name in METRIC_NAMES)
    assert scores.mse_rel_w_initial == pytest.approx(mse_rel(linear.w[:320], target.w[:320]))
    with pytest.raises(Undefined_Metric_Error):
        trajectory_metrics(linear, target, initial_seconds=1.0)


def test_mean_of_metrics():
    a = Trajectory_Metrics(**{name: 1.0 for name in METRIC_NAMES})
    b = Trajectory_Metrics(**{name: 3.0 for name in METRIC_NAMES})
    assert Trajectory_Metrics.mean([a, b]) == Trajectory_Metrics(**{name: 2.0 for name in METRIC_NAMES})


def test_oracle_field_reproduces_the_targets(evaluation_data):
    report = evaluate_dataset(Spectral_Nonlinearity(4), evaluation_data, initial_seconds=0.005)
    assert len(report.model) == len(report.linear) == 2
    assert report.model_mean.mse_rel_q_full == 0.0
    assert report.linear_mean.mse_rel_q_full > 0.0
    assert len(report.per_mode_mse_model) == 4
    assert report.modes_beating_linear() == 1.0


def test_evaluation_at_another_rate(evaluation_data):
    report = evaluate_dataset(Spectral_Nonlinearity(4), evaluation_data, fs=48000.0, duration_scale=0.5, initial_seconds=0.002)
    assert report.model_mean.mae_rel_w_full == 0.0
    assert report.linear_mean.mae_rel_w_full > 0.0


def test_linear_field_scores_like_the_baseline(evaluation_data):
    report = evaluate_dataset(Zero_Field(4), evaluation_data, initial_seconds=0.005)
    assert report.model == report.linear
    npt.assert_array_equal(report.per_mode_mse_model, report.per_mode_mse_linear)


def test_report_files(evaluation_data, tmp_path):
    report = evaluate_dataset(Spectral_Nonlinearity(4), evaluation_data, initial_seconds=0.005)
    write_metrics_csv(report, tmp_path / "metrics.csv")
    write_per_mode_csv(report, tmp_path / "modes.csv")
    with open(tmp_path / "metrics.csv", newline="") as csv_file:
        rows = list(csv.reader(csv_file))
    assert tuple(rows[0]) == ("trajectory", "solution") + METRIC_NAMES
    assert [row[:2] for row in rows[1:]] == [["0", "model"], ["0", "linear"], ["1", "model"], ["1", "linear"], ["mean", "model"],
                                             ["mean", "linear"]]
    with open(tmp_path / "modes.csv", newline="") as csv_file:
        rows = list(csv.reader(csv_file))
    assert rows[0] == ["mode", "model_mse", "linear_mse"]
    assert [row[0] for row in rows[1:]] == ["1", "2", "3", "4"]
