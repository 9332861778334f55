import numpy as np
import numpy.testing as npt
import pytest

from modal_string_toolkit.errors import Invalid_Parameter_Error
from modal_string_toolkit.spectral.Potential_Field import Zero_Field
from modal_string_toolkit.spectral.Spectral_Grid import Spectral_Grid, dct_matrix, spatial_gradient
from modal_string_toolkit.spectral.Spectral_Nonlinearity import Spectral_Nonlinearity, oracle_force, oracle_potential, spectral_field
from modal_string_toolkit.spectral.morse_potential import morse_potential, morse_potential_deriv


def central_gradient(function, q, h=1e-7):
    gradient = np.zeros_like(q)
    for i in range(q.shape[0]):
        e = np.zeros_like(q)
        e[i] = h
        gradient[i] = (function(q + e) - function(q - e)) / (2.0 * h)
    return gradient


@pytest.mark.parametrize("M", [1, 5, 20])
def test_dct_rows_are_orthonormal(M):
    C = dct_matrix(M)
    npt.assert_allclose(C @ C.T, np.eye(M), atol=1e-13)


def test_dct_matches_the_stated_entries():
    C = dct_matrix(3)
    assert C[1, 2] == pytest.approx(np.sqrt(2.0 / 4.0) * np.cos(np.pi / 4.0 * 2 * 2.5))


def test_grid_points():
    grid = Spectral_Grid(3)
    npt.assert_allclose(grid.points, [0.125, 0.375, 0.625, 0.875])
    assert len(grid) == 4


def test_string_potential():
    assert morse_potential(0.0) == 0.0
    assert morse_potential_deriv(0.0) == 0.0
    assert morse_potential(1.0) == pytest.approx((np.sqrt(2.0) - 1.0) ** 2)
    xi = 1e-3
    assert morse_potential(xi) == pytest.approx(xi ** 4 / 4.0, rel=1e-5)
    xi = np.linspace(-2.0, 2.0, 41)
    h = 1e-6
    npt.assert_allclose(morse_potential_deriv(xi), (morse_potential(xi + h) - morse_potential(xi - h)) / (2 * h), atol=1e-8)


@pytest.mark.parametrize("M", [2, 6, 20])
def test_force_is_the_negative_potential_gradient(M, rng):
    for _ in range(10):
        q = rng.normal(0.0, 1e-2, M)
        npt.assert_allclose(central_gradient(oracle_potential, q), -oracle_force(q), rtol=1e-6, atol=1e-12)


def test_oracle_reuses_one_field_per_mode_count(rng):
    assert spectral_field(7) is spectral_field(7)
    assert spectral_field(7) is not spectral_field(8)
    hits = spectral_field.cache_info().hits
    q = rng.normal(0.0, 1e-2, (3, 7))
    npt.assert_array_equal(oracle_force(q), Spectral_Nonlinearity(7).force(q))
    npt.assert_array_equal(oracle_potential(q), Spectral_Nonlinearity(7).potential(q))
    assert spectral_field.cache_info().hits == hits + 2


def test_potential_is_non_negative_and_vanishes_at_rest(rng):
    field = Spectral_Nonlinearity(8)
    assert field.potential(np.zeros(8)) == 0.0
    npt.assert_array_equal(field.force(np.zeros(8)), np.zeros(8))
    assert np.all(field.potential(rng.normal(0.0, 0.1, (200, 8))) >= 0.0)


def test_batched_evaluation_matches_single_states(rng):
    field = Spectral_Nonlinearity(6)
    q = rng.normal(0.0, 1e-2, (5, 6))
    forces, potentials = field.force_and_potential(q)
    for i in range(5):
        npt.assert_allclose(forces[i], field.force(q[i]), rtol=1e-14)
        assert potentials[i] == pytest.approx(field.potential(q[i]), rel=1e-14)


def test_slopes_of_the_first_mode():
    grid = Spectral_Grid(4)
    q = np.array([1e-3, 0.0, 0.0, 0.0])
    expected = np.sqrt(5.0) * np.pi * 1e-3 * grid.C[0]
    npt.assert_allclose(spatial_gradient(q, grid, grid.wavenumbers), expected)


def test_mode_count_mismatch_is_rejected():
    with pytest.raises(Invalid_Parameter_Error):
        Spectral_Nonlinearity(4).force(np.zeros(5))


def test_zero_field():
    field = Zero_Field(3)
    assert field.potential(np.ones(3)) == 0.0
    npt.assert_array_equal(field(np.ones((2, 3))), np.zeros((2, 3)))
    npt.assert_array_equal(field.potential(np.ones((2, 3))), np.zeros(2))
