"""WAV and spectrogram export of audio outputs"""
import csv
import logging
from enum import Enum
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import scipy.io.wavfile
import scipy.signal

from ..errors import Invalid_Parameter_Error
from ..solver.Trajectory import Trajectory

logger = logging.getLogger(__name__)

PEAK_DBFS = -1.0


class Render_Mode(Enum):
    """
    Enumeration of WAV sample formats. Calling a member converts a float64 series to the samples written
    """
    Float32 = "float32"
    PCM16 = "pcm16"

    def __call__(self, signal: np.ndarray) -> np.ndarray:
        if self is Render_Mode.Float32:
            return signal.astype(np.float32)
        elif self is Render_Mode.PCM16:
            peak = float(np.max(np.abs(signal))) if signal.size > 0 else 0.0
            if peak == 0.0:
                return np.zeros(signal.shape, dtype=np.int16)
            scale = 10.0 ** (PEAK_DBFS / 20.0) * 32767.0 / peak
            return np.round(signal * scale).astype(np.int16)

    def __str__(self):
        return self.value

    def __repr__(self):
        return str(self)


def render_wav(signal: Union[Trajectory, np.ndarray], fs: float, path: Union[str, Path], mode: Render_Mode = Render_Mode.Float32):
    """
    :param signal: audio output series or a trajectory whose output w is written
    :param fs: sampling rate of the series
    :param path: destination WAV file
    :param mode: sample format
    """
    w = signal.w if isinstance(signal, Trajectory) else np.asarray(signal, dtype=np.float64)
    if not np.all(np.isfinite(w)):
        raise Invalid_Parameter_Error("Cannot render a signal with non-finite samples")
    rate = int(round(fs))
    scipy.io.wavfile.write(path, rate, mode(w))
    logger.info(f"Wrote {w.shape[0]} {mode} samples at {rate} Hz to {path}")


def spectrogram(signal: np.ndarray, fs: float, window_length: int = 4096, hop: int = 1024) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Magnitude short-time Fourier transform with a periodic Hann window
    :param signal: mono series
    :param fs: sampling rate
    :param window_length: samples per frame
    :param hop: samples between frame starts
    :return: frame centre times, bin frequencies and magnitudes of shape (frames, window_length // 2 + 1)
    """
    if window_length < 2 or hop < 1:
        raise Invalid_Parameter_Error(f"Degenerate spectrogram window {window_length} or hop {hop}")
    if window_length > signal.shape[0]:
        raise Invalid_Parameter_Error(f"Window of {window_length} samples is longer than the series of {signal.shape[0]}")
    window = scipy.signal.get_window("hann", window_length)
    starts = np.arange(0, signal.shape[0] - window_length + 1, hop)
    frames = np.stack([signal[s:s + window_length] for s in starts]) * window
    magnitudes = np.abs(np.fft.rfft(frames, axis=-1))
    times = (starts + window_length / 2.0) / fs
    return times, np.fft.rfftfreq(window_length, 1.0 / fs), magnitudes


def spectrogram_csv(signal: np.ndarray, fs: float, window_length: int, hop: int, path: Union[str, Path]):
    """
    Write the spectrogram as CSV: a header of bin frequencies, then one row per frame led by its time
    """
    times, frequencies, magnitudes = spectrogram(signal, fs, window_length, hop)
    with open(path, "w", newline="") as csv_file:
        writer = csv.writer(csv_file, lineterminator="\n")
        writer.writerow(["time"] + [repr(float(f)) for f in frequencies])
        for t, row in zip(times, magnitudes):
            writer.writerow([repr(float(t))] + [repr(float(m)) for m in row])
