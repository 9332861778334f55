"""MTRJ container for solver trajectories.

Layout (little endian): b"MTRJ", uint32 version, uint32 M, uint32 N, float64 fs, float64 famp, float64 Te,
float64 xe, float64 xo, float64 lambda0, float64 eps, uint32 decimation,
then q (N x M, row major), p (N x M), psi (N), w (N) as float64.
"""
import struct
from pathlib import Path
from typing import Union

import numpy as np

from ..errors import File_Format_Error
from ..string_model.String_Parameters import Excitation_Params
from .Trajectory import Trajectory

TRAJECTORY_MAGIC = b"MTRJ"
TRAJECTORY_VERSION = 1
_HEADER = struct.Struct("<4sIIIdddddddI")
_FLOAT = np.dtype("<f8")


def trajectory_bytes(trajectory: Trajectory) -> bytes:
    e = trajectory.excitation
    header = _HEADER.pack(TRAJECTORY_MAGIC, TRAJECTORY_VERSION, trajectory.M, trajectory.N, trajectory.fs, e.famp, e.Te, e.xe, e.xo,
                          trajectory.lambda0, trajectory.eps, trajectory.decimation)
    arrays = (trajectory.q, trajectory.p, trajectory.psi, trajectory.w)
    return header + b"".join(np.ascontiguousarray(a, dtype=_FLOAT).tobytes() for a in arrays)


def write_trajectory(path: Union[str, Path], trajectory: Trajectory):
    """
    :param path: destination file
    :param trajectory: trajectory to store
    """
    Path(path).write_bytes(trajectory_bytes(trajectory))


def parse_trajectory(payload: bytes) -> Trajectory:
    """
    :param payload: serialised trajectory
    :return: the stored trajectory, bit-identical to the one written
    """
    if len(payload) < _HEADER.size:
        raise File_Format_Error(f"Trajectory truncated: {len(payload)} bytes is shorter than the header")
    magic, version, M, N, fs, famp, Te, xe, xo, lambda0, eps, decimation = _HEADER.unpack_from(payload)
    if magic != TRAJECTORY_MAGIC:
        raise File_Format_Error(f"Not an MTRJ trajectory (magic {magic!r})")
    if version != TRAJECTORY_VERSION:
        raise File_Format_Error(f"Unsupported trajectory version {version}")
    count = 2 * N * M + 2 * N
    expected = _HEADER.size + count * _FLOAT.itemsize
    if len(payload) != expected:
        raise File_Format_Error(f"Trajectory payload has {len(payload)} bytes but M={M}, N={N} requires {expected}")
    values = np.frombuffer(payload, dtype=_FLOAT, count=count, offset=_HEADER.size).astype(np.float64)
    q = values[:N * M].reshape(N, M)
    p = values[N * M:2 * N * M].reshape(N, M)
    psi = values[2 * N * M:2 * N * M + N]
    w = values[2 * N * M + N:]
    excitation = Excitation_Params(famp=famp, Te=Te, xe=xe, xo=xo)
    return Trajectory(q, p, psi, w, fs, excitation, lambda0, eps, decimation)


def read_trajectory(path: Union[str, Path]) -> Trajectory:
    """
    :param path: trajectory file
    :return: the stored trajectory
    """
    return parse_trajectory(Path(path).read_bytes())
