import math

import numpy as np
import pytest

from jensenlab.errors import InputError
from jensenlab.grid import GridSpec, assemble, build_laplacian, from_matrix
from jensenlab.linalg import expm_sym
from jensenlab.potential import gaussian_well
from jensenlab.semigroup import (duhamel_difference, hs_split_check, l1_linf_norm,
                                 semigroup_difference)


def _pair(n=48, depth=4.0):
    g = GridSpec(1, 6.0, n)
    return build_laplacian(g), assemble(g, gaussian_well(1, depth, 1.0))


def test_scalar_difference_closed_form():
    a, b = from_matrix([[1.0]], kind="free"), from_matrix([[-1.0]])
    dt = semigroup_difference(a, b, 0.5)
    assert dt.matrix[0, 0] == pytest.approx(math.exp(0.5) - math.exp(-0.5))
    assert dt.c1 == pytest.approx(abs(dt.matrix[0, 0]))


def test_duhamel_second_order():
    a, b = _pair()
    exact = semigroup_difference(a, b, 0.2).matrix
    e1 = np.max(np.abs(duhamel_difference(a, b, 0.2, 32).matrix - exact))
    e2 = np.max(np.abs(duhamel_difference(a, b, 0.2, 64).matrix - exact))
    assert 3.6 < e1 / e2 < 4.4


def test_domination_entrywise():
    a, b = _pair()
    for t in (0.05, 0.5, 3.0):
        assert np.all(expm_sym(a.eig, t).entries <= expm_sym(b.eig, t).entries + 1e-13)
        assert np.all(semigroup_difference(a, b, t).matrix >= -1e-13)


def test_hs_split_holds():
    a, b = _pair()
    rep = hs_split_check(a, b, 0.7)
    assert rep.holds
    assert rep.hs_a_half <= rep.hs_b_half


def test_l1_linf_of_identity_is_inverse_weight():
    assert l1_linf_norm(np.eye(3), 0.25) == pytest.approx(4.0)


def test_mismatched_pair_rejected():
    a, _ = _pair(48)
    _, b = _pair(50)
    with pytest.raises(InputError):
        semigroup_difference(a, b, 1.0)
    with pytest.raises(InputError):
        semigroup_difference(a, a, -1.0)
