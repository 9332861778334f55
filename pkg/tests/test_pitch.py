import numpy as np
import pytest

from modal_string_toolkit.errors import Undefined_Metric_Error
from modal_string_toolkit.evaluation.pitch import estimate_fundamental, pitch_glide
from modal_string_toolkit.solver.Trajectory import Trajectory
from modal_string_toolkit.string_model.String_Parameters import Excitation_Params

FS = 48000.0


def gliding_trajectory(duration: float = 1.0) -> Trajectory:
    t = np.arange(int(duration * FS)) / FS
    frequency = 220.0 + 20.0 * np.exp(-t / 0.05)
    phase = 2.0 * np.pi * np.cumsum(frequency) / FS
    q = np.zeros((t.shape[0], 2))
    q[:, 0] = np.sin(phase)
    n = t.shape[0]
    return Trajectory(q, np.zeros_like(q), np.zeros(n), q[:, 0].copy(), FS, Excitation_Params(famp=0.0, Te=1e-3, xe=0.5, xo=0.5))


def test_sine_frequency():
    t = np.arange(4800) / FS
    assert estimate_fundamental(np.sin(2.0 * np.pi * 220.0 * t + 0.3), FS) == pytest.approx(220.0, rel=1e-5)
    assert estimate_fundamental(0.1 * np.sin(2.0 * np.pi * 1234.5 * t), FS) == pytest.approx(1234.5, rel=1e-4)


def test_frequency_needs_two_crossings():
    with pytest.raises(Undefined_Metric_Error):
        estimate_fundamental(np.ones(100), FS)
    with pytest.raises(Undefined_Metric_Error):
        estimate_fundamental(np.sin(2.0 * np.pi * 10.0 * np.arange(4800) / FS), FS)


def test_falling_pitch():
    glide = pitch_glide(gliding_trajectory())
    assert 225.0 < glide.initial_hz < 240.0
    assert glide.final_hz == pytest.approx(220.0, rel=1e-3)
    assert glide.relative_drop > 0.0


def test_windows_must_fit():
    with pytest.raises(Undefined_Metric_Error):
        pitch_glide(gliding_trajectory(0.5), initial_seconds=0.1, final_seconds=0.5)
