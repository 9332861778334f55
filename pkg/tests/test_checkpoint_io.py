import struct

import numpy as np
import pytest

from modal_string_toolkit.errors import File_Format_Error
from modal_string_toolkit.gradnet.GradNet_Params import gradnet_init
from modal_string_toolkit.gradnet.checkpoint_io import checkpoint_bytes, parse_checkpoint, read_checkpoint, write_checkpoint


@pytest.fixture
def params(rng):
    return gradnet_init(4, 7, 0.02, rng)


def test_checkpoint_file(params, tmp_path):
    path = tmp_path / "model.gnck"
    write_checkpoint(path, params)
    assert read_checkpoint(path) == params
    payload = path.read_bytes()
    assert payload[:4] == b"GNCK"
    assert struct.unpack_from("<III", payload, 4) == (1, 4, 7)
    assert struct.unpack_from("<d", payload, 16)[0] == 0.02
    assert len(payload) == 24 + 8 * (7 * 4 + 3 * 7)
    assert np.frombuffer(payload, "<f8", count=1, offset=24)[0] == params.W[0, 0]


def test_wrong_magic(params):
    with pytest.raises(File_Format_Error):
        parse_checkpoint(b"XXXX" + checkpoint_bytes(params)[4:])


def test_unknown_version(params):
    payload = bytearray(checkpoint_bytes(params))
    payload[4:8] = struct.pack("<I", 2)
    with pytest.raises(File_Format_Error):
        parse_checkpoint(bytes(payload))


@pytest.mark.parametrize("stop", [3, 20, -8])
def test_truncated_payload(params, stop):
    with pytest.raises(File_Format_Error):
        parse_checkpoint(checkpoint_bytes(params)[:stop])
