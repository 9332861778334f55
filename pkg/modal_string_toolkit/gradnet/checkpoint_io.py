"""GNCK checkpoint container for gradient network parameters.

Layout (little endian): b"GNCK", uint32 version, uint32 M, uint32 H, float64 neg_slope,
then W (H x M, row major), b, log_alpha, log_beta as float64.
"""
import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from ..errors import File_Format_Error
from .GradNet_Params import GradNet_Params

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"GNCK"
CHECKPOINT_VERSION = 1
_HEADER = struct.Struct("<4sIIId")
_FLOAT = np.dtype("<f8")


def checkpoint_bytes(params: GradNet_Params) -> bytes:
    """
    :param params: network parameters
    :return: the serialised checkpoint
    """
    header = _HEADER.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, params.M, params.H, params.neg_slope)
    return header + b"".join(np.ascontiguousarray(a, dtype=_FLOAT).tobytes() for a in params.arrays())


def write_checkpoint(path: Union[str, Path], params: GradNet_Params):
    """
    :param path: destination file
    :param params: network parameters to store
    """
    path = Path(path)
    path.write_bytes(checkpoint_bytes(params))
    logger.info(f"Wrote checkpoint {path} (M={params.M}, H={params.H})")


def parse_checkpoint(payload: bytes) -> GradNet_Params:
    """
    :param payload: serialised checkpoint
    :return: the stored parameters
    """
    if len(payload) < _HEADER.size:
        raise File_Format_Error(f"Checkpoint truncated: {len(payload)} bytes is shorter than the header")
    magic, version, M, H, neg_slope = _HEADER.unpack_from(payload)
    if magic != CHECKPOINT_MAGIC:
        raise File_Format_Error(f"Not a GNCK checkpoint (magic {magic!r})")
    if version != CHECKPOINT_VERSION:
        raise File_Format_Error(f"Unsupported checkpoint version {version}")
    count = H * M + 3 * H
    expected = _HEADER.size + count * _FLOAT.itemsize
    if len(payload) != expected:
        raise File_Format_Error(f"Checkpoint payload has {len(payload)} bytes but M={M}, H={H} requires {expected}")
    values = np.frombuffer(payload, dtype=_FLOAT, count=count, offset=_HEADER.size).astype(np.float64)
    W = values[:H * M].reshape(H, M)
    b, log_alpha, log_beta = values[H * M:].reshape(3, H)
    return GradNet_Params(W, b.copy(), log_alpha.copy(), log_beta.copy(), neg_slope)


def read_checkpoint(path: Union[str, Path]) -> GradNet_Params:
    """
    :param path: checkpoint file
    :return: the stored parameters
    """
    return parse_checkpoint(Path(path).read_bytes())
