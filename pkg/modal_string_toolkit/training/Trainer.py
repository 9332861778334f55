"""Epoch loop over teacher-forced segments with model selection on the validation loss"""
import logging
import time
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel

from ..dataset.Dataset import Dataset
from ..errors import Invalid_Parameter_Error, Solver_Diverged_Error, Training_Diverged_Error
from ..gradnet.GradNet_Field import GradNet_Field
from ..gradnet.GradNet_Params import GradNet_Params, gradnet_init
from ..gradnet.checkpoint_io import write_checkpoint
from ..solver.SAV_Solver import SAV_Solver
from ..solver.Solver_Config import Solver_Config
from ..solver.Trajectory import Trajectory
from ..string_model.Modal_Operators import build_modal_operators
from .Adam_Optimizer import Adam_State, adam_step
from .Segment import Segment, Segment_Batch, Segment_Context, segment_dataset
from .Train_Config import Train_Config
from .Training_Log import Epoch_Record, Training_Log
from .losses import mse_loss, stack_states
from .segment_backprop import forward_backward_batch, segment_batch_loss

logger = logging.getLogger(__name__)

Training_Example = Tuple[Trajectory, Segment_Context]


def dataset_examples(dataset: Dataset) -> List[Training_Example]:
    """
    :return: every trajectory of a dataset paired with the solver constants of its draw
    """
    config = dataset.solver_config
    return [(trajectory, Segment_Context(build_modal_operators(draw.string), draw.string.nu, draw.excitation, config))
            for draw, trajectory in dataset]


def split_segments(examples: List[Training_Example], segment_ms: float) -> List[Segment]:
    segments = []
    for index, (trajectory, context) in enumerate(examples):
        segments.extend(segment_dataset(trajectory, context.config.fs, context, segment_ms, index))
    return segments


def segment_validation_loss(segments: List[Segment], params: GradNet_Params, batch_size: int) -> float:
    """
    :return: mean teacher-forced loss over all segments, infinite if any rollout is not finite
    """
    losses = []
    for start in range(0, len(segments), batch_size):
        losses.append(segment_batch_loss(Segment_Batch(segments[start:start + batch_size]), params))
    loss = float(np.mean(np.concatenate(losses)))
    return loss if np.isfinite(loss) else float("inf")


def full_rollout_validation_loss(examples: List[Training_Example], params: GradNet_Params) -> float:
    """
    Free-running loss: each trajectory re-simulated with the network from its initial state
    :return: mean over trajectories of mse_loss on [q, p], infinite if any rollout diverges
    """
    field = GradNet_Field(params)
    losses = []
    for trajectory, context in examples:
        solver = SAV_Solver(context.ops, field, context.nu, context.config, context.excitation, context.input_gain)
        try:
            predicted = solver.simulate(trajectory.N, solver.consistent_initial_state(trajectory.q[0], trajectory.p[0]))
        except Solver_Diverged_Error as e:
            logger.warning(f"Validation rollout diverged: {e}")
            return float("inf")
        losses.append(mse_loss(stack_states(predicted.q, predicted.p), stack_states(trajectory.q, trajectory.p)))
    return float(np.mean(losses))


class Checkpoint_Sidecar(BaseModel):
    """
        Settings and selection outcome stored next to a checkpoint
    """
    train: Train_Config
    solver: Solver_Config
    best_epoch: Optional[int] = None
    val_loss: Optional[float] = None
    rollout_val_loss: Optional[float] = None


def sidecar_path(checkpoint_path: Union[str, Path]) -> Path:
    checkpoint_path = Path(checkpoint_path)
    return checkpoint_path.with_name(checkpoint_path.name + ".json")


def write_training_checkpoint(path: Union[str, Path], params: GradNet_Params, sidecar: Checkpoint_Sidecar):
    """
    Write a GNCK checkpoint and its JSON sidecar
    """
    write_checkpoint(path, params)
    sidecar_path(path).write_text(sidecar.model_dump_json(indent=2))


class Training_Result:
    """
        Selected and final parameters of a run with its log
    """

    def __init__(self, best_params: GradNet_Params, final_params: GradNet_Params, log: Training_Log):
        self.best_params: GradNet_Params = best_params
        self.final_params: GradNet_Params = final_params
        self.log: Training_Log = log

    @property
    def best_epoch(self) -> Optional[int]:
        best = self.log.best
        return None if best is None else best.epoch


class Trainer:
    """
        Control structure for fitting a gradient network inside the solver to target trajectories
    """

    def __init__(self, config: Train_Config):
        self.config: Train_Config = config

    def _train_epoch(self, segments: List[Segment], params: GradNet_Params, adam: Adam_State, rng: np.random.Generator) -> Tuple[GradNet_Params, float, int]:
        """
        :return: parameters after the epoch, mean segment loss, number of skipped segments
        """
        order = rng.permutation(len(segments))
        total, evaluated, diverged = 0.0, 0, 0
        for start in range(0, len(order), self.config.batch_size):
            batch = Segment_Batch([segments[i] for i in order[start:start + self.config.batch_size]])
            result = forward_backward_batch(batch, params)
            diverged += result.diverged
            if result.evaluated == 0:
                continue
            params = adam_step(params, result.grads, adam)
            total += result.loss * result.evaluated
            evaluated += result.evaluated
        if evaluated == 0:
            raise Training_Diverged_Error(f"All {len(segments)} training segments diverged")
        return params, total / evaluated, diverged

    def train(self, train_examples: List[Training_Example], val_examples: List[Training_Example], csv_path: Union[str, Path, None] = None,
              initial_params: Optional[GradNet_Params] = None) -> Training_Result:
        """
        :param train_examples: training trajectories with their solver constants
        :param val_examples: validation trajectories with their solver constants
        :param csv_path: destination of the per-epoch CSV log
        :param initial_params: starting parameters, Kaiming initialised from the seed when not given
        :return: parameters with the lowest validation loss, final parameters and the log
        """
        if len(train_examples) == 0 or len(val_examples) == 0:
            raise Invalid_Parameter_Error("Training needs at least one training and one validation trajectory")
        cfg = self.config
        rng = np.random.default_rng(cfg.seed)
        M = train_examples[0][1].M
        params = gradnet_init(M, cfg.hidden_size, cfg.neg_slope, rng) if initial_params is None else initial_params.copy()
        adam = Adam_State.for_params(params, cfg.adam)
        segments = split_segments(train_examples, cfg.segment_ms)
        val_segments = split_segments(val_examples, cfg.segment_ms)
        log = Training_Log(csv_path)
        best_params = params.copy()
        logger.info(f"Training {params} on {len(segments)} segments, validating on {len(val_segments)}")
        start_time = time.perf_counter()
        for epoch in range(1, cfg.epochs + 1):
            params, train_loss, diverged = self._train_epoch(segments, params, adam, rng)
            if diverged > 0:
                logger.warning(f"Epoch {epoch}: {diverged} segments diverged and were skipped")
            val_loss, rollout_loss = None, None
            if epoch % cfg.validation_period == 0 or epoch == cfg.epochs:
                val_loss = segment_validation_loss(val_segments, params, max(cfg.batch_size, 64))
                if cfg.full_rollout_validation:
                    rollout_loss = full_rollout_validation_loss(val_examples, params)
            record = Epoch_Record(epoch, train_loss, val_loss, time.perf_counter() - start_time, diverged, rollout_loss)
            if log.append(record):
                best_params = params.copy()
            logger.info(str(record) if rollout_loss is None else f"{record}, rollout val {rollout_loss:1.4e}")
        logger.info(f"Selected epoch {log.best.epoch if log.best else None} with validation loss {log.best.val_loss if log.best else None}")
        return Training_Result(best_params, params, log)


def train(dataset: Dataset, val_dataset: Dataset, config: Train_Config, csv_path: Union[str, Path, None] = None) -> Training_Result:
    """
    :param dataset: training dataset
    :param val_dataset: validation dataset
    :param config: training settings
    :param csv_path: destination of the per-epoch CSV log
    :return: parameters with the lowest validation loss and the training log
    """
    if dataset.M != val_dataset.M:
        raise Invalid_Parameter_Error(f"Training data has {dataset.M} modes but validation data has {val_dataset.M}")
    return Trainer(config).train(dataset_examples(dataset), dataset_examples(val_dataset), csv_path)
