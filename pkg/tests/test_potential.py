import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jensenlab.errors import InputError
from jensenlab.potential import (Constant, Gaussian, PotentialSpec, PowerTail, gaussian_well,
                                 power_tail_well, singular_well, square_well, zero)


def test_gaussian_value_and_parts():
    v = PotentialSpec(2, (Gaussian(-2.0, (1.0, 0.0), 0.5), Gaussian(1.0, (), 1.0)))
    x = np.array([[1.0, 0.0], [0.0, 0.0]])
    want = -2 * np.exp(-np.array([0.0, 1.0]) / 0.25) + np.exp(-np.array([1.0, 0.0]))
    assert np.allclose(v(x), want)
    assert np.all(v.minus(x) <= 0) and np.all(v.plus(x) >= 0)
    assert np.allclose(v.minus(x) + v.plus(x), v(x))


def test_power_tail_and_square_well_values():
    assert power_tail_well(1, 2.0)(np.array([[3.0]]))[0] == pytest.approx(-1 / 16)
    w = square_well(3, 2.0, 1.0)
    assert w(np.array([[0.5, 0, 0], [1.5, 0, 0]])).tolist() == [-2.0, 0.0]


def test_singular_center_and_tail_metadata():
    s = singular_well(5, 2.0, support=1.0)
    assert len(s.singular_centers()) == 1
    assert math.isinf(s.tail_exponent())
    assert power_tail_well(5, 3.0).tail_exponent() == 3.0
    assert zero(3).is_zero()


centers = st.lists(st.floats(-3, 3, allow_nan=False), min_size=2, max_size=2)


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, -0.1), centers, st.floats(0.2, 3), st.floats(0.5, 4))
def test_json_round_trip(a, c, w, alpha):
    v = PotentialSpec(2, (Gaussian(a, tuple(c), w), PowerTail(-1.0, (), alpha), Constant(0.0)))
    back = PotentialSpec.from_json(v.to_json())
    x = np.random.default_rng(0).standard_normal((10, 2))
    assert np.allclose(back(x), v(x))
    # the origin center is normalized away, after which the text is stable
    assert PotentialSpec.from_json(back.to_json()).to_json() == back.to_json()


def test_unknown_term_keys_rejected():
    with pytest.raises(InputError):
        PotentialSpec.from_dict({"d": 1, "form": [{"kind": "gaussian", "amplitude": -1, "widht": 1}]})
    with pytest.raises(InputError):
        PotentialSpec.from_dict({"d": 1, "form": [{"kind": "mystery"}]})
