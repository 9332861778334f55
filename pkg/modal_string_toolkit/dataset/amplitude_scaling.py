"""Scaling of the excitation amplitude with the fundamental frequency.

A short raised-cosine pulse of duration Te drives a mode of angular frequency omega to a free vibration
of amplitude close to famp Te / (2 omega) when 2 pi / Te is much larger than omega. Scaling famp linearly with
the fundamental therefore keeps the range of displacements across strings of different pitch.
"""
import numpy as np

from ..solver.sav_operations import sav_update
from ..string_model.String_Parameters import Excitation_Params
from ..string_model.excitation import excitation_samples
from .Dataset_Spec import Value_Range


def famp_for_frequency(base_range: Value_Range, omega_fundamental: float, omega_reference: float) -> Value_Range:
    """
    :param base_range: amplitude range at the reference frequency
    :param omega_fundamental: fundamental of the string being excited
    :param omega_reference: frequency at which base_range applies, in the same unit
    :return: base_range scaled by omega_fundamental / omega_reference
    """
    assert omega_fundamental > 0.0 and omega_reference > 0.0, f"Frequencies must be positive but got {omega_fundamental}, {omega_reference}"
    return base_range.scaled(omega_fundamental / omega_reference)


def closed_form_amplitude(omega: float, excitation: Excitation_Params) -> float:
    """
    :return: famp Te / (2 omega), the short-pulse limit of the free vibration amplitude
    """
    return excitation.famp * excitation.Te / (2.0 * omega)


def driven_oscillator_amplitude(omega: float, excitation: Excitation_Params, fs: float, duration: float) -> float:
    """
    Integrate q'' + omega^2 q = f_e(t) from rest with the linear SAV update and measure the free vibration
    :param omega: angular frequency of the oscillator
    :param excitation: excitation pulse
    :param fs: sampling rate
    :param duration: simulated time, longer than the pulse by at least one period
    :return: peak |q| after the pulse has ended
    """
    k = 1.0 / fs
    n_steps = int(round(duration * fs))
    assert (n_steps - 1) * k > excitation.Te + 2.0 * np.pi / omega, f"Duration {duration} s does not cover the pulse and one period"
    forcing = excitation_samples(n_steps - 1, k, excitation)
    Sigma, Omega2, g = np.zeros(1), np.array([omega * omega]), np.zeros(1)
    q, p, psi = np.zeros(1), np.zeros(1), 0.0
    peak = 0.0
    for n in range(n_steps - 1):
        _, p, q, psi = sav_update(q, p, psi, g, Sigma, Omega2, 0.0, k, forcing[n])
        if (n + 1) * k > excitation.Te:
            peak = max(peak, abs(float(q[0])))
    return peak
