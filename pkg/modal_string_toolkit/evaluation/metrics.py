"""Relative error metrics between predicted and target trajectories"""
import csv
from pathlib import Path
from typing import List, Union

import numpy as np
from pydantic import BaseModel

from ..errors import Invalid_Parameter_Error, Undefined_Metric_Error
from ..solver.Trajectory import Trajectory


def _check_aligned(predicted: np.ndarray, target: np.ndarray):
    if predicted.shape != target.shape:
        raise Invalid_Parameter_Error(f"Predicted series {predicted.shape} does not match target series {target.shape}")
    if target.size == 0:
        raise Undefined_Metric_Error("Metric of an empty series")


def mse_rel(predicted: np.ndarray, target: np.ndarray) -> float:
    """
    :return: sum ||x~ - x||^2 / sum ||x||^2
    :raises Undefined_Metric_Error: the target has no energy
    """
    _check_aligned(predicted, target)
    denominator = float(np.sum(target * target))
    if denominator == 0.0:
        raise Undefined_Metric_Error("Relative MSE of a zero-energy target")
    difference = predicted - target
    return float(np.sum(difference * difference)) / denominator


def mae_rel(predicted: np.ndarray, target: np.ndarray) -> float:
    """
    :return: sum ||x~ - x||_1 / sum ||x||_1
    :raises Undefined_Metric_Error: the target is identically zero
    """
    _check_aligned(predicted, target)
    denominator = float(np.sum(np.abs(target)))
    if denominator == 0.0:
        raise Undefined_Metric_Error("Relative MAE of a zero target")
    return float(np.sum(np.abs(predicted - target))) / denominator


def window_samples(fs: float, seconds: float) -> int:
    return int(round(fs * seconds))


def per_mode_mse(predicted: np.ndarray, target: np.ndarray, window: int) -> np.ndarray:
    """
    :param predicted: predicted displacements, shape (N, M)
    :param target: target displacements, shape (N, M)
    :param window: number of initial samples
    :return: mean squared error of every mode over the window
    """
    _check_aligned(predicted, target)
    if window <= 0:
        raise Undefined_Metric_Error(f"Per-mode MSE over an empty window ({window} samples)")
    if window > target.shape[0]:
        raise Invalid_Parameter_Error(f"Window of {window} samples exceeds the trajectory length {target.shape[0]}")
    difference = predicted[:window] - target[:window]
    return np.mean(difference * difference, axis=0)


class Trajectory_Metrics(BaseModel):
    """
        Relative MSE and MAE of displacements q and audio output w over the initial window and the full duration
    """
    mse_rel_q_initial: float
    mae_rel_q_initial: float
    mse_rel_w_initial: float
    mae_rel_w_initial: float
    mse_rel_q_full: float
    mae_rel_q_full: float
    mse_rel_w_full: float
    mae_rel_w_full: float

    @staticmethod
    def mean(metrics: list):
        """
        :return: field-wise average of a list of Trajectory_Metrics
        """
        assert len(metrics) > 0, "Average of no metrics"
        return Trajectory_Metrics(**{name: float(np.mean([getattr(m, name) for m in metrics])) for name in Trajectory_Metrics.model_fields})


def trajectory_metrics(predicted: Trajectory, target: Trajectory, initial_seconds: float = 0.1) -> Trajectory_Metrics:
    """
    :param predicted: rollout to score
    :param target: reference rollout at the same sampling rate
    :param initial_seconds: duration of the initial window
    :return: all scalar metrics of the prediction
    """
    window = window_samples(target.sample_rate, initial_seconds)
    if window <= 0 or window > target.N:
        raise Undefined_Metric_Error(f"Initial window of {window} samples does not fit a trajectory of {target.N}")
    return Trajectory_Metrics(mse_rel_q_initial=mse_rel(predicted.q[:window], target.q[:window]),
                              mae_rel_q_initial=mae_rel(predicted.q[:window], target.q[:window]),
                              mse_rel_w_initial=mse_rel(predicted.w[:window], target.w[:window]),
                              mae_rel_w_initial=mae_rel(predicted.w[:window], target.w[:window]),
                              mse_rel_q_full=mse_rel(predicted.q, target.q), mae_rel_q_full=mae_rel(predicted.q, target.q),
                              mse_rel_w_full=mse_rel(predicted.w, target.w), mae_rel_w_full=mae_rel(predicted.w, target.w))


class Metrics_Report(BaseModel):
    """
        Metrics of a model and of the linear baseline over every trajectory of a dataset, with their averages
        and the per-mode MSE over the initial window averaged over trajectories
    """
    model: List[Trajectory_Metrics]
    linear: List[Trajectory_Metrics]
    per_mode_mse_model: List[float]
    per_mode_mse_linear: List[float]

    @property
    def model_mean(self) -> Trajectory_Metrics:
        return Trajectory_Metrics.mean(self.model)

    @property
    def linear_mean(self) -> Trajectory_Metrics:
        return Trajectory_Metrics.mean(self.linear)

    def modes_beating_linear(self) -> float:
        """
        :return: portion of modes whose model error does not exceed the linear error
        """
        model, linear = np.array(self.per_mode_mse_model), np.array(self.per_mode_mse_linear)
        return float(np.mean(model <= linear))


METRIC_NAMES = tuple(Trajectory_Metrics.model_fields)


def write_metrics_csv(report: Metrics_Report, path: Union[str, Path]):
    """
    One row per trajectory and solution, then the averages
    """
    with open(path, "w", newline="") as csv_file:
        writer = csv.writer(csv_file, lineterminator="\n")
        writer.writerow(("trajectory", "solution") + METRIC_NAMES)
        for index, (model, linear) in enumerate(zip(report.model, report.linear)):
            writer.writerow([str(index), "model"] + [repr(getattr(model, name)) for name in METRIC_NAMES])
            writer.writerow([str(index), "linear"] + [repr(getattr(linear, name)) for name in METRIC_NAMES])
        writer.writerow(["mean", "model"] + [repr(getattr(report.model_mean, name)) for name in METRIC_NAMES])
        writer.writerow(["mean", "linear"] + [repr(getattr(report.linear_mean, name)) for name in METRIC_NAMES])


def write_per_mode_csv(report: Metrics_Report, path: Union[str, Path]):
    with open(path, "w", newline="") as csv_file:
        writer = csv.writer(csv_file, lineterminator="\n")
        writer.writerow(("mode", "model_mse", "linear_mse"))
        for m, (model, linear) in enumerate(zip(report.per_mode_mse_model, report.per_mode_mse_linear), start=1):
            writer.writerow([str(m), repr(model), repr(linear)])
