import numpy as np
import pytest

from jensenlab.errors import InputError, SamplingError, ShapeError, SizeError
from jensenlab.grid import (GridSpec, assemble, build_laplacian, direct_negative_sum, from_matrix,
                            minmax_check, negative_eigenvalues, sample_potential)
from jensenlab.potential import PotentialSpec, Gaussian, gaussian_well, singular_well


def test_dirichlet_spectrum_closed_form():
    g = GridSpec(1, 3.0, 40)
    k = np.arange(1, 41)
    want = 4 / g.h**2 * np.sin(k * np.pi / (2 * 41)) ** 2
    assert np.allclose(build_laplacian(g).eig.values, want, rtol=1e-12)


def test_periodic_spectrum_closed_form_2d():
    g = GridSpec(2, 2.0, 8, "periodic")
    one = (2 - 2 * np.cos(2 * np.pi * np.arange(8) / 8)) / g.h**2
    want = np.sort((one[:, None] + one[None, :]).ravel())
    assert np.allclose(build_laplacian(g).eig.values, want, atol=1e-10)


def test_grid_validation():
    with pytest.raises(InputError):
        GridSpec(4, 1.0, 5)
    with pytest.raises(InputError):
        GridSpec(1, 1.0, 2)
    with pytest.raises(SizeError):
        GridSpec(3, 1.0, 20)
    assert GridSpec(3, 1.0, 20, allow_large=True).unknowns == 8000


def test_assemble_parts_and_shape_checks():
    g = GridSpec(1, 4.0, 41)
    v = PotentialSpec(1, (Gaussian(-2.0, (0.0,), 1.0), Gaussian(3.0, (2.0,), 0.5)))
    minus = assemble(g, v)
    full = assemble(g, v, "full")
    assert np.all(minus.diagonal_potential <= 0)
    assert np.max(full.diagonal_potential) > 0
    with pytest.raises(ShapeError):
        assemble(g, gaussian_well(2))
    with pytest.raises(InputError):
        assemble(g, v, "plus")


def test_singular_potential_is_floored_on_nodes():
    g = GridSpec(1, 2.0, 21)
    vals = sample_potential(g, singular_well(1, 0.5))
    assert np.all(np.isfinite(vals))
    with pytest.raises(SamplingError):
        sample_potential(g, singular_well(1, 0.5, cutoff=0.0))


def test_minmax_full_potential_never_exceeds_minus_part():
    g = GridSpec(1, 6.0, 81)
    v = PotentialSpec(1, (Gaussian(-4.0, (0.0,), 1.0), Gaussian(2.0, (0.5,), 0.5)))
    full, minus = minmax_check(g, v)
    assert 0 < full <= minus


def test_direct_sum_of_raw_matrix():
    b = from_matrix(np.diag([-2.0, -0.5, 1.0]))
    assert direct_negative_sum(b) == pytest.approx(2.5)
    assert negative_eigenvalues(b).tolist() == [-2.0, -0.5]
