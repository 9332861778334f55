"""Command line surface: generate, train, simulate, evaluate and check"""
import logging
import sys
from pathlib import Path
from typing import List, Optional

import click
from pydantic import BaseModel, ValidationError

from ..dataset.Dataset import generate as generate_dataset, load as load_dataset, save as save_dataset
from ..dataset.Dataset_Spec import Dataset_Role
from ..errors import Invalid_Parameter_Error, Modal_String_Error
from ..evaluation.audio_rendering import Render_Mode, render_wav, spectrogram_csv
from ..evaluation.evaluation_runner import evaluate_dataset
from ..evaluation.metrics import Trajectory_Metrics, write_metrics_csv, write_per_mode_csv
from ..gradnet.GradNet_Field import GradNet_Field
from ..gradnet.checkpoint_io import read_checkpoint
from ..solver.SAV_Solver import SAV_Solver
from ..solver.Solver_Config import Solver_Config
from ..solver.trajectory_io import write_trajectory
from ..spectral.Potential_Field import Zero_Field
from ..spectral.Spectral_Nonlinearity import Spectral_Nonlinearity
from ..string_model.Modal_Operators import build_modal_operators
from ..string_model.String_Parameters import Excitation_Params, Physical_String_Params, Scaled_String_Params, scale_excitation_amplitude, \
    scale_physical_params
from ..training.Trainer import Checkpoint_Sidecar, train as train_model, write_training_checkpoint
from .checks import SUITES, run_suites
from .config_file import Run_Config, read_config, worker_count

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class Modal_String_Group(click.Group):
    """
        Reports toolkit and file errors on stderr and exits with the runtime error code
    """

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except (Modal_String_Error, OSError) as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_RUNTIME)


@click.group(cls=Modal_String_Group)
@click.option("-v", "--verbose", is_flag=True, help="Log debug diagnostics.")
def cli(verbose: bool):
    """Differentiable modal synthesis of nonlinear strings."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format=LOG_FORMAT)


_ROLES = {str(role): role for role in Dataset_Role}


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="TOML run configuration.")
@click.option("--role", type=click.Choice(list(_ROLES) + ["all"]), default="all", show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Directory receiving one sub-directory per split.")
@click.option("--modes", "M", type=int, help="Number of modes [dataset] M.")
@click.option("--count", type=int, help="Trajectories per split.")
@click.option("--seed", type=int, help="Seed of the split.")
@click.option("--workers", type=int, help="Worker processes, defaults to $MODAL_STRING_WORKERS.")
def generate(config_path: Optional[str], role: str, out_dir: str, M: Optional[int], count: Optional[int], seed: Optional[int],
             workers: Optional[int]):
    """Simulate datasets with the spectral nonlinearity."""
    config = read_config(config_path)
    M = config.dataset.M if M is None else M
    roles = list(Dataset_Role) if role == "all" else [_ROLES[role]]
    for r in roles:
        spec = config.dataset.spec(r)
        spec = spec.with_role(r, count=count, seed=seed)
        dataset = generate_dataset(spec, M, worker_count(workers))
        save_dataset(dataset, Path(out_dir) / str(r))


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="TOML run configuration.")
@click.option("--train-data", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--val-data", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", "checkpoint", type=click.Path(dir_okay=False), required=True, help="GNCK checkpoint of the selected model.")
@click.option("--log", "log_path", type=click.Path(dir_okay=False), help="Training log CSV, next to the checkpoint by default.")
@click.option("--epochs", type=int)
@click.option("--batch-size", type=int)
@click.option("--hidden-size", type=int)
@click.option("--lr", type=float)
@click.option("--seed", type=int)
def train(config_path: Optional[str], train_data: str, val_data: str, checkpoint: str, log_path: Optional[str], epochs: Optional[int],
          batch_size: Optional[int], hidden_size: Optional[int], lr: Optional[float], seed: Optional[int]):
    """Fit a gradient network to a training dataset."""
    config = read_config(config_path)
    overrides = {name: value for name, value in (("epochs", epochs), ("batch_size", batch_size), ("hidden_size", hidden_size), ("seed", seed))
                 if value is not None}
    if lr is not None:
        overrides["adam"] = config.training.adam.model_copy(update={"lr": lr})
    train_config = _validated(config.training, overrides)
    train_set, val_set = load_dataset(train_data), load_dataset(val_data)
    log_path = Path(checkpoint).with_suffix(".csv") if log_path is None else Path(log_path)
    result = train_model(train_set, val_set, train_config, log_path)
    best = result.log.best
    sidecar = Checkpoint_Sidecar(train=train_config, solver=train_set.solver_config, best_epoch=result.best_epoch,
                                 val_loss=None if best is None else best.val_loss, rollout_val_loss=None if best is None else best.rollout_val_loss)
    write_training_checkpoint(checkpoint, result.best_params, sidecar)


class Render_Metadata(BaseModel):
    """
        Settings of a rendered simulation, written next to its outputs
    """
    field: str
    mode: Render_Mode
    fs: float
    T_sim: float
    string: Scaled_String_Params
    excitation: Excitation_Params
    solver: Solver_Config


def _validated(model: BaseModel, updates: dict):
    try:
        return model.model_validate({**model.model_dump(), **updates})
    except ValidationError as e:
        raise click.UsageError(str(e))


def _physical_string(physical: dict, sigma0: Optional[float], sigma1: Optional[float]) -> Optional[Physical_String_Params]:
    """
    :return: the physical string given on the command line, None when no physical option is set
    """
    given = {name: value for name, value in physical.items() if value is not None}
    if len(given) == 0:
        return None
    if len(given) < len(physical):
        raise click.UsageError("Physical strings need --length, --density, --radius, --tension and --youngs-modulus")
    losses = {name: value for name, value in (("sigma0", sigma0), ("sigma1", sigma1)) if value is not None}
    try:
        return Physical_String_Params(**given, **losses)
    except ValidationError as e:
        raise click.UsageError(str(e))


def _resolve_string(config: Run_Config, scaled: dict, physical: Optional[Physical_String_Params], M: Optional[int]) -> Scaled_String_Params:
    """
    Command line options override the configuration file; a physical string replaces the scaled one entirely
    """
    if physical is not None:
        return scale_physical_params(physical, config.dataset.M if M is None else M)
    scaled = {name: value for name, value in scaled.items() if value is not None}
    base = config.scaled_string()
    values = {"M": config.dataset.M} if base is None else base.model_dump()
    if M is not None:
        values["M"] = M
    try:
        return Scaled_String_Params.model_validate({**values, **scaled})
    except ValidationError as e:
        raise click.UsageError(f"No valid string: use a configuration with [string] or pass at least --gamma and --nu\n{e}")


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="TOML run configuration.")
@click.option("--checkpoint", type=click.Path(exists=True, dir_okay=False), help="Simulate with a trained network.")
@click.option("--linear", is_flag=True, help="Simulate the linear string.")
@click.option("--fs", type=float, help="Sampling rate [solver] fs.")
@click.option("--duration", type=float, help="Simulated time [render] T_sim.")
@click.option("--modes", "M", type=int)
@click.option("--gamma", type=float)
@click.option("--kappa", type=float)
@click.option("--nu", type=float)
@click.option("--sigma0", type=float)
@click.option("--sigma1", type=float, help="Scaled frequency-dependent loss, or physical sigma1 with a physical string.")
@click.option("--length", type=float, help="Physical string length (m).")
@click.option("--density", type=float, help="Physical material density (kg m^-3).")
@click.option("--radius", type=float, help="Physical string radius (m).")
@click.option("--tension", type=float, help="Physical tension (N).")
@click.option("--youngs-modulus", type=float, help="Physical Young's modulus (N m^-2).")
@click.option("--famp", type=float, help="Excitation amplitude, scaled units.")
@click.option("--famp-newton", type=float, help="Excitation amplitude in newtons, with a physical string.")
@click.option("--te", type=float, help="Excitation duration (s).")
@click.option("--xe", type=float, help="Excitation position.")
@click.option("--xo", type=float, help="Output position.")
@click.option("--lambda0", type=float, help="Control gain [solver] lambda0.")
@click.option("--wav", type=click.Path(dir_okay=False), help="Audio output file.")
@click.option("--trajectory", "trajectory_path", type=click.Path(dir_okay=False), help="MTRJ trajectory file.")
@click.option("--mode", type=click.Choice([str(m) for m in Render_Mode]), help="WAV sample format [render] mode.")
@click.option("--spectrogram", "spectrogram_path", type=click.Path(dir_okay=False), help="Spectrogram CSV of the audio output.")
@click.option("--window-length", type=int)
@click.option("--hop", type=int)
def simulate(config_path, checkpoint, linear, fs, duration, M, gamma, kappa, nu, sigma0, sigma1, length, density, radius, tension, youngs_modulus,
             famp, famp_newton, te, xe, xo, lambda0, wav, trajectory_path, mode, spectrogram_path, window_length, hop):
    """Simulate a string with the spectral, learned or linear nonlinearity."""
    if wav is None and trajectory_path is None and spectrogram_path is None:
        raise click.UsageError("Nothing to write: give --wav, --trajectory or --spectrogram")
    if checkpoint is not None and linear:
        raise click.UsageError("--checkpoint and --linear are exclusive")
    config = read_config(config_path)
    params = read_checkpoint(checkpoint) if checkpoint is not None else None
    if params is not None and M is not None and M != params.M:
        raise click.UsageError(f"The checkpoint acts on {params.M} modes, not {M}")
    physical = _physical_string({"L": length, "rho": density, "r": radius, "T0": tension, "E": youngs_modulus}, sigma0, sigma1)
    scaled = {"gamma": gamma, "kappa": kappa, "nu": nu, "sigma0": sigma0, "sigma1_hat": sigma1}
    string = _resolve_string(config, scaled, physical, params.M if params is not None else M)
    excitation = _validated(config.scaled_excitation(), {name: value for name, value in (("famp", famp), ("Te", te), ("xe", xe), ("xo", xo))
                                                          if value is not None})
    if famp_newton is not None:
        if physical is None:
            raise click.UsageError("--famp-newton needs a physical string")
        excitation = excitation.model_copy(update={"famp": scale_excitation_amplitude(famp_newton, physical)})
    solver_config = _validated(config.solver, {name: value for name, value in (("fs", fs), ("lambda0", lambda0)) if value is not None})
    render = _validated(config.render, {name: value for name, value in (("T_sim", duration), ("mode", mode), ("window_length", window_length),
                                                                         ("hop", hop)) if value is not None})
    if params is not None:
        field = GradNet_Field(params)
    elif linear:
        field = Zero_Field(string.M)
    else:
        field = Spectral_Nonlinearity(string.M)
    solver = SAV_Solver(build_modal_operators(string), field, string.nu, solver_config, excitation)
    trajectory = solver.simulate(int(round(render.T_sim * solver_config.fs)))
    if trajectory_path is not None:
        write_trajectory(trajectory_path, trajectory)
    if wav is not None:
        render_wav(trajectory, solver_config.fs, wav, render.mode)
        metadata = Render_Metadata(field=str(field), mode=render.mode, fs=solver_config.fs, T_sim=render.T_sim, string=string, excitation=excitation,
                                   solver=solver_config)
        Path(wav).with_name(Path(wav).name + ".json").write_text(metadata.model_dump_json(indent=2))
    if spectrogram_path is not None:
        spectrogram_csv(trajectory.w, solver_config.fs, render.window_length, render.hop, spectrogram_path)
    logger.info(f"Simulated {trajectory} with {field}")


def _metrics_table(model: Trajectory_Metrics, linear: Trajectory_Metrics) -> List[str]:
    lines = [f"{'metric':<22}{'model':>14}{'linear':>14}"]
    for name in Trajectory_Metrics.model_fields:
        lines.append(f"{name:<22}{getattr(model, name):>14.4e}{getattr(linear, name):>14.4e}")
    return lines


@cli.command()
@click.option("--checkpoint", type=click.Path(exists=True, dir_okay=False), help="Trained network to evaluate.")
@click.option("--oracle", is_flag=True, help="Evaluate the spectral nonlinearity itself.")
@click.option("--data", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--fs", type=float, help="Evaluate at another sampling rate.")
@click.option("--duration-scale", type=float, default=1.0, show_default=True, help="Multiple of the dataset duration.")
@click.option("--initial-ms", type=float, default=100.0, show_default=True, help="Length of the initial window.")
@click.option("--out", "out_csv", type=click.Path(dir_okay=False), required=True, help="Metrics CSV.")
@click.option("--per-mode", "per_mode_csv", type=click.Path(dir_okay=False), help="Per-mode MSE CSV.")
@click.option("--workers", type=int, help="Worker processes, defaults to $MODAL_STRING_WORKERS.")
def evaluate(checkpoint, oracle, data, fs, duration_scale, initial_ms, out_csv, per_mode_csv, workers):
    """Compare a model and the linear string against a dataset."""
    if (checkpoint is None) == (not oracle):
        raise click.UsageError("Give exactly one of --checkpoint and --oracle")
    dataset = load_dataset(data)
    field = Spectral_Nonlinearity(dataset.M) if oracle else GradNet_Field(read_checkpoint(checkpoint))
    if field.M != dataset.M:
        raise Invalid_Parameter_Error(f"The model acts on {field.M} modes but the dataset has {dataset.M}")
    report = evaluate_dataset(field, dataset, fs, duration_scale, worker_count(workers), initial_ms / 1000.0)
    write_metrics_csv(report, out_csv)
    if per_mode_csv is not None:
        write_per_mode_csv(report, per_mode_csv)
    for line in _metrics_table(report.model_mean, report.linear_mean):
        click.echo(line)
    click.echo(f"modes at or below linear error: {report.modes_beating_linear():.0%}")


@cli.command()
@click.option("--suite", "suites", type=click.Choice(list(SUITES)), multiple=True, help="Suites to run, all by default.")
@click.pass_context
def check(ctx: click.Context, suites):
    """Run the gradient, energy and oracle self-checks."""
    results = run_suites(list(suites))
    for result in results:
        click.echo(str(result))
    if not all(r.passed for r in results):
        ctx.exit(EXIT_RUNTIME)


def main(argv: Optional[List[str]] = None) -> int:
    """
    :param argv: arguments without the program name, sys.argv when None
    :return: 0 on success, 1 on a usage error, 2 on a runtime error
    """
    try:
        result = cli.main(args=argv, prog_name="modal-string", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    return result if isinstance(result, int) else 0


def run():
    sys.exit(main())
