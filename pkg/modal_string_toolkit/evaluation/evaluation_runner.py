"""Re-simulation of a dataset with a learned field and with the linear baseline"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Tuple

import numpy as np

from ..dataset.Dataset import Dataset, Trajectory_Draw, simulate_draw
from ..solver.SAV_Solver import SAV_Solver
from ..solver.Solver_Config import Solver_Config
from ..solver.Trajectory import Trajectory
from ..spectral.Potential_Field import Potential_Field, Zero_Field
from ..string_model.Modal_Operators import build_modal_operators
from .metrics import Metrics_Report, Trajectory_Metrics, per_mode_mse, trajectory_metrics, window_samples

logger = logging.getLogger(__name__)


def simulate_with_field(draw: Trajectory_Draw, field: Potential_Field, config: Solver_Config, n_samples: int) -> Trajectory:
    """
    :return: rollout of a draw from rest with the given field
    """
    ops = build_modal_operators(draw.string)
    return SAV_Solver(ops, field, draw.string.nu, config, draw.excitation).simulate(n_samples)


def _evaluate_draw(draw: Trajectory_Draw, target: Optional[Trajectory], field: Potential_Field, config: Solver_Config, n_samples: int,
                   initial_seconds: float) -> Tuple[Trajectory_Metrics, Trajectory_Metrics, np.ndarray, np.ndarray]:
    if target is None:
        target = simulate_draw(draw, config, n_samples)
    predicted = simulate_with_field(draw, field, config, n_samples)
    linear = simulate_with_field(draw, Zero_Field(draw.string.M), config, n_samples)
    window = window_samples(config.fs, initial_seconds)
    return (trajectory_metrics(predicted, target, initial_seconds), trajectory_metrics(linear, target, initial_seconds),
            per_mode_mse(predicted.q, target.q, window), per_mode_mse(linear.q, target.q, window))


def evaluate_dataset(field: Potential_Field, dataset: Dataset, fs: Optional[float] = None, duration_scale: float = 1.0, workers: int = 1,
                     initial_seconds: float = 0.1) -> Metrics_Report:
    """
    Score a field against the trajectories of a dataset, with the linear string as baseline
    :param field: learned field to evaluate
    :param dataset: target dataset
    :param fs: sampling rate of the evaluation; other than the dataset rate, targets are re-simulated with the spectral nonlinearity
    :param duration_scale: multiple of the dataset duration to simulate, targets are re-simulated when it is not 1
    :param workers: processes evaluating trajectories, results are ordered by draw regardless
    :param initial_seconds: duration of the initial window
    :return: metrics of the field and of the linear baseline
    """
    fs = dataset.spec.fs if fs is None else fs
    config = dataset.solver_config.with_sample_rate(fs)
    resimulate = fs != dataset.spec.fs or duration_scale != 1.0
    n_samples = int(round(dataset.spec.T_sim * duration_scale * fs))
    targets = [None if resimulate else t for t in dataset.trajectories]
    count = len(dataset)
    logger.info(f"Evaluating {field} on {dataset} at fs={fs:g} for {n_samples} samples{' (re-simulated targets)' if resimulate else ''}")
    arguments = (dataset.draws, targets, [field] * count, [config] * count, [n_samples] * count, [initial_seconds] * count)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_evaluate_draw, *arguments))
    else:
        results = list(map(_evaluate_draw, *arguments))
    model, linear, mode_model, mode_linear = zip(*results)
    return Metrics_Report(model=list(model), linear=list(linear), per_mode_mse_model=np.mean(mode_model, axis=0).tolist(),
                          per_mode_mse_linear=np.mean(mode_linear, axis=0).tolist())
