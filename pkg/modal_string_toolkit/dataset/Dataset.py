"""Generation, persistence and loading of oracle-simulated datasets"""
import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterator, List, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from ..errors import Dataset_Error, Manifest_Hash_Error, Missing_Trajectory_Error, Stability_Error
from ..solver.SAV_Solver import SAV_Solver
from ..solver.Solver_Config import Solver_Config
from ..solver.Trajectory import Trajectory
from ..solver.trajectory_io import parse_trajectory, trajectory_bytes
from ..spectral.Spectral_Nonlinearity import spectral_field
from ..string_model.Modal_Operators import build_modal_operators, check_stability
from ..string_model.String_Parameters import Excitation_Params, Scaled_String_Params
from .Dataset_Spec import Dataset_Spec
from .amplitude_scaling import famp_for_frequency

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class Trajectory_Draw(BaseModel):
    """
        Parameters of one dataset trajectory
    """
    model_config = ConfigDict(frozen=True)

    index: int
    string: Scaled_String_Params
    excitation: Excitation_Params


class Manifest_Content(BaseModel):
    """
        Everything the manifest hash covers besides the trajectory bytes
    """
    model_config = ConfigDict(frozen=True)

    spec: Dataset_Spec
    M: int
    draws: List[Trajectory_Draw]
    files: List[str]


class Dataset_Manifest(Manifest_Content):
    """
        Manifest file of a dataset directory
    """
    sha256: str


def sample_spec(spec: Dataset_Spec, M: int, rng: np.random.Generator = None) -> List[Trajectory_Draw]:
    """
    Independent uniform draws of every parameter, famp drawn from the range rescaled to the draw's fundamental
    :param spec: parameter ranges
    :param M: number of modes
    :param rng: random generator, seeded from spec.seed when not given
    :return: one draw per trajectory
    """
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    draws = []
    for index in range(spec.count):
        gamma = spec.gamma.sample(rng)
        string = Scaled_String_Params(gamma=gamma, kappa=spec.kappa.sample(rng), nu=spec.nu.sample(rng), sigma0=spec.sigma0.sample(rng),
                                      sigma1_hat=spec.sigma1.sample(rng), M=M)
        famp_range = famp_for_frequency(spec.famp, gamma / 2.0, spec.famp_reference_hz)
        excitation = Excitation_Params(famp=famp_range.sample(rng), Te=spec.Te.sample(rng), xe=spec.xe.sample(rng), xo=spec.xo.sample(rng))
        draws.append(Trajectory_Draw(index=index, string=string, excitation=excitation))
    return draws


def solver_config_for(spec: Dataset_Spec) -> Solver_Config:
    return Solver_Config(fs=spec.fs, lambda0=spec.lambda0)


def simulate_draw(draw: Trajectory_Draw, config: Solver_Config, n_samples: int) -> Trajectory:
    """
    :return: rollout of a draw from rest with the spectral nonlinearity
    """
    ops = build_modal_operators(draw.string)
    solver = SAV_Solver(ops, spectral_field(ops.M), draw.string.nu, config, draw.excitation)
    return solver.simulate(n_samples)


class Dataset:
    """
        Trajectories simulated from the draws of a Dataset_Spec, in draw order
    """

    def __init__(self, spec: Dataset_Spec, M: int, draws: List[Trajectory_Draw], trajectories: List[Trajectory]):
        assert len(draws) == len(trajectories), f"{len(draws)} draws but {len(trajectories)} trajectories"
        self.spec: Dataset_Spec = spec
        self.M: int = M
        self.draws: List[Trajectory_Draw] = draws
        self.trajectories: List[Trajectory] = trajectories

    @property
    def solver_config(self) -> Solver_Config:
        return solver_config_for(self.spec)

    def file_names(self) -> List[str]:
        return [f"trajectory_{draw.index:04d}.mtrj" for draw in self.draws]

    def manifest_content(self) -> Manifest_Content:
        return Manifest_Content(spec=self.spec, M=self.M, draws=self.draws, files=self.file_names())

    def __len__(self):
        return len(self.trajectories)

    def __iter__(self) -> Iterator[Tuple[Trajectory_Draw, Trajectory]]:
        return iter(zip(self.draws, self.trajectories))

    def __eq__(self, other):
        return (isinstance(other, Dataset) and self.spec == other.spec and self.M == other.M and self.draws == other.draws
                and all(a == b for a, b in zip(self.trajectories, other.trajectories)))

    def __str__(self):
        return f"Dataset({self.spec.role}, {len(self)} trajectories, M={self.M}, fs={self.spec.fs:g})"


def check_draws(draws: List[Trajectory_Draw], config: Solver_Config):
    """
    :raises Stability_Error: naming the first draw whose highest mode violates the stability condition
    """
    for draw in draws:
        stable, margin = check_stability(build_modal_operators(draw.string), config.k)
        if not stable:
            raise Stability_Error(f"Draw {draw.index} is unstable at fs={config.fs:g} (margin {margin:1.3e} rad/s): {draw.string}", parameters=draw)


def generate(spec: Dataset_Spec, M: int, workers: int = 1) -> Dataset:
    """
    :param spec: parameter ranges
    :param M: number of modes
    :param workers: processes simulating trajectories, results are ordered by draw regardless
    :return: the generated dataset
    """
    draws = sample_spec(spec, M)
    config = solver_config_for(spec)
    check_draws(draws, config)
    n_samples = spec.n_samples
    logger.info(f"Generating {spec.count} {spec.role} trajectories of {n_samples} samples (M={M}, fs={spec.fs:g}) on {workers} workers")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            trajectories = list(executor.map(simulate_draw, draws, [config] * len(draws), [n_samples] * len(draws)))
    else:
        trajectories = [simulate_draw(draw, config, n_samples) for draw in draws]
    return Dataset(spec, M, draws, trajectories)


def _manifest_hash(content: Manifest_Content, payloads: List[bytes]) -> str:
    digest = hashlib.sha256(content.model_dump_json().encode("utf-8"))
    for payload in payloads:
        digest.update(payload)
    return digest.hexdigest()


def save(dataset: Dataset, path: Union[str, Path]):
    """
    Write every trajectory as an MTRJ file, then the manifest
    :param dataset: dataset to store
    :param path: destination directory, created if missing
    """
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    content = dataset.manifest_content()
    payloads = [trajectory_bytes(t) for t in dataset.trajectories]
    for name, payload in zip(content.files, payloads):
        (directory / name).write_bytes(payload)
    manifest = Dataset_Manifest(**content.model_dump(), sha256=_manifest_hash(content, payloads))
    (directory / MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2))
    logger.info(f"Saved {dataset} to {directory}")


def load(path: Union[str, Path]) -> Dataset:
    """
    :param path: dataset directory
    :return: the stored dataset
    :raises Missing_Trajectory_Error: a file named by the manifest is absent
    :raises Manifest_Hash_Error: the contents do not match the manifest hash
    """
    directory = Path(path)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.is_file():
        raise Dataset_Error(f"No {MANIFEST_NAME} in {directory}")
    try:
        manifest = Dataset_Manifest.model_validate_json(manifest_path.read_text())
    except ValidationError as e:
        raise Dataset_Error(f"Malformed manifest {manifest_path}: {e}") from e
    missing = [name for name in manifest.files if not (directory / name).is_file()]
    if len(missing) > 0:
        raise Missing_Trajectory_Error(f"Dataset {directory} is missing {', '.join(missing)}")
    payloads = [(directory / name).read_bytes() for name in manifest.files]
    content = Manifest_Content(spec=manifest.spec, M=manifest.M, draws=manifest.draws, files=manifest.files)
    if _manifest_hash(content, payloads) != manifest.sha256:
        raise Manifest_Hash_Error(f"Contents of {directory} do not match the manifest hash")
    return Dataset(manifest.spec, manifest.M, list(manifest.draws), [parse_trajectory(payload) for payload in payloads])
