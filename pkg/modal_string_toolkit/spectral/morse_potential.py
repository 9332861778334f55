"""Transverse string potential (sqrt(1 + xi^2) - 1)^2 and its derivative"""
import numpy as np


def _stretch(xi):
    """
    :param xi: slope values
    :return: sqrt(1 + xi^2) - 1 evaluated without cancellation, and sqrt(1 + xi^2)
    """
    root = np.sqrt(1.0 + xi * xi)
    return xi * xi / (root + 1.0), root


def morse_potential(xi):
    """
    :param xi: scalar or array of slopes
    :return: (sqrt(1 + xi^2) - 1)^2 elementwise
    """
    stretch, _ = _stretch(xi)
    return stretch * stretch


def morse_potential_deriv(xi):
    """
    :param xi: scalar or array of slopes
    :return: 2 (sqrt(1 + xi^2) - 1) xi / sqrt(1 + xi^2) elementwise
    """
    stretch, root = _stretch(xi)
    return 2.0 * stretch * xi / root
