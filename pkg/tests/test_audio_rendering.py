import csv
import struct

import numpy as np
import numpy.testing as npt
import pytest
import scipy.io.wavfile
from scipy.signal import get_window

from modal_string_toolkit.errors import Invalid_Parameter_Error
from modal_string_toolkit.evaluation.audio_rendering import Render_Mode, render_wav, spectrogram, spectrogram_csv
from modal_string_toolkit.solver.SAV_Solver import SAV_Solver
from modal_string_toolkit.spectral.Spectral_Nonlinearity import Spectral_Nonlinearity

FS = 32000.0


def format_tag(path) -> int:
    """
    :return: format code of the fmt chunk of a RIFF WAVE file
    """
    payload = path.read_bytes()
    assert payload[:4] == b"RIFF" and payload[8:12] == b"WAVE"
    offset = 12
    while offset + 8 <= len(payload):
        chunk_id, size = struct.unpack_from("<4sI", payload, offset)
        if chunk_id == b"fmt ":
            return struct.unpack_from("<H", payload, offset + 8)[0]
        offset += 8 + size + size % 2
    raise AssertionError("no fmt chunk")


@pytest.fixture
def tone():
    return 0.3 * np.sin(2.0 * np.pi * 1000.0 * np.arange(16384) / FS)


def test_pcm16_peak(tone):
    samples = Render_Mode.PCM16(3.0 * tone)
    assert samples.dtype == np.int16
    assert np.max(np.abs(samples)) == round(10.0 ** (-1.0 / 20.0) * 32767.0)
    npt.assert_array_equal(Render_Mode.PCM16(np.zeros(10)), np.zeros(10, dtype=np.int16))


def test_float_wav(tone, tmp_path):
    render_wav(tone, FS, tmp_path / "tone.wav")
    rate, data = scipy.io.wavfile.read(tmp_path / "tone.wav")
    assert rate == 32000
    assert data.dtype == np.float32
    npt.assert_array_equal(data, tone.astype(np.float32))
    assert format_tag(tmp_path / "tone.wav") == 3


def test_pcm_wav(tone, tmp_path):
    render_wav(tone, FS, tmp_path / "tone.wav", Render_Mode.PCM16)
    rate, data = scipy.io.wavfile.read(tmp_path / "tone.wav")
    assert data.dtype == np.int16 and data.shape == tone.shape
    assert format_tag(tmp_path / "tone.wav") == 1


def test_trajectory_output_is_rendered(string, ops, excitation, config, tmp_path):
    trajectory = SAV_Solver(ops, Spectral_Nonlinearity(ops.M), string.nu, config, excitation).simulate(200)
    render_wav(trajectory, config.fs, tmp_path / "pluck.wav")
    _, data = scipy.io.wavfile.read(tmp_path / "pluck.wav")
    npt.assert_array_equal(data, trajectory.w.astype(np.float32))


def test_non_finite_audio(tmp_path):
    with pytest.raises(Invalid_Parameter_Error):
        render_wav(np.array([0.0, np.nan, 1.0]), FS, tmp_path / "bad.wav")
    assert not (tmp_path / "bad.wav").exists()


def test_spectrogram_frames(tone):
    times, frequencies, magnitudes = spectrogram(tone, FS)
    assert magnitudes.shape == (13, 2049)
    assert frequencies[-1] == pytest.approx(FS / 2.0)
    npt.assert_allclose(times, (np.arange(13) * 1024 + 2048) / FS)
    assert np.all(np.argmax(magnitudes, axis=1) == 128)


def test_spectrogram_window():
    _, _, magnitudes = spectrogram(np.ones(4096), FS)
    assert magnitudes.shape == (1, 2049)
    assert magnitudes[0, 0] == pytest.approx(2048.0)
    npt.assert_allclose(magnitudes[0, 1], 1024.0)
    assert np.max(magnitudes[0, 2:]) < 1e-9


def test_spectrogram_energy(rng):
    signal = rng.normal(size=2048)
    _, _, magnitudes = spectrogram(signal, FS, window_length=512, hop=256)
    windowed = signal[256:768] * get_window("hann", 512)
    X2 = magnitudes[1] ** 2
    assert np.sum(windowed ** 2) == pytest.approx((X2[0] + 2.0 * np.sum(X2[1:-1]) + X2[-1]) / 512)


def test_degenerate_spectrograms(tone):
    with pytest.raises(Invalid_Parameter_Error):
        spectrogram(tone[:100], FS)
    with pytest.raises(Invalid_Parameter_Error):
        spectrogram(tone, FS, hop=0)


def test_spectrogram_csv(tone, tmp_path):
    spectrogram_csv(tone, FS, 1024, 512, tmp_path / "spec.csv")
    with open(tmp_path / "spec.csv", newline="") as csv_file:
        rows = list(csv.reader(csv_file))
    assert rows[0][0] == "time" and len(rows[0]) == 514
    assert float(rows[0][1]) == 0.0 and float(rows[0][-1]) == pytest.approx(16000.0)
    assert len(rows) == 1 + 31
    assert float(rows[1][0]) == pytest.approx(512 / FS)
