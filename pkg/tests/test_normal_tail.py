import numpy as np
import pytest

from tailtwist.normal_tail import log_upper_tail, upper_tail_quantile_from_log


# values frozen from a 40-digit arbitrary-precision evaluation of
# log(erfc(z/sqrt(2))/2)
FROZEN = [
    (-10.0, -7.6198530241605261e-24),
    (25.0 / 6.0, -11.077623477928462),
    (5.0, -15.064998393988726),
    (40.0, -804.6084420137538),
]


@pytest.mark.parametrize("z,expected", FROZEN)
def test_log_upper_tail_frozen_values(z, expected):
    assert log_upper_tail(z) == pytest.approx(expected, rel=1e-13)


def test_log_upper_tail_limits():
    assert log_upper_tail(-np.inf) == 0.0
    assert log_upper_tail(np.inf) == -np.inf


def test_round_trip_from_z():
    z = np.linspace(-37.0, 300.0, 1500)
    y = -log_upper_tail(z)
    back = upper_tail_quantile_from_log(y)
    assert np.allclose(back, z, rtol=1e-10, atol=1e-10)


def test_round_trip_from_y():
    y = np.geomspace(1e-280, 1e6, 2000)
    z = upper_tail_quantile_from_log(y)
    back = -log_upper_tail(z)
    assert np.allclose(back, y, rtol=1e-10)


def test_quantile_edge_cases():
    assert upper_tail_quantile_from_log(0.0) == -np.inf
    assert upper_tail_quantile_from_log(np.inf) == np.inf
    with pytest.raises(ValueError):
        upper_tail_quantile_from_log(-1e-12)


def test_quantile_monotone():
    y = np.geomspace(1e-12, 1e5, 400)
    z = upper_tail_quantile_from_log(y)
    assert np.all(np.diff(z) > 0)


def test_scalar_in_scalar_out():
    assert isinstance(log_upper_tail(1.0), float)
    assert isinstance(upper_tail_quantile_from_log(1.0), float)
    assert isinstance(log_upper_tail(np.ones(3)), np.ndarray)
