import math

import numpy as np
import pytest

from magnonqed.units import CONSTANTS, H, HBAR, gyromagnetic_ratio, thermal_occupancy


def test_constants_are_codata_2018():
    assert CONSTANTS.mu_B == 9.2740100783e-24
    assert CONSTANTS.mu_0 == 1.25663706212e-6
    assert H == 6.62607015e-34
    assert HBAR == pytest.approx(1.054571817e-34, rel=1e-9)


def test_gyromagnetic_ratio_free_electron():
    assert gyromagnetic_ratio(2.0) == pytest.approx(27992489872.14541, rel=1e-14)


@pytest.mark.parametrize("g", [0.0, -2.0, math.nan, math.inf])
def test_gyromagnetic_ratio_rejects_bad_g(g):
    with pytest.raises(ValueError):
        gyromagnetic_ratio(g)


def test_gyromagnetic_ratio_linear_in_g():
    assert gyromagnetic_ratio(4.0) == pytest.approx(2 * gyromagnetic_ratio(2.0), rel=1e-15)


def test_thermal_occupancy_frozen_values():
    assert thermal_occupancy(10e9, 0.05) == pytest.approx(6.783594691135261e-05, rel=1e-12)
    assert thermal_occupancy(10e9, 1.0) == pytest.approx(1.623502914385847, rel=1e-12)


def test_thermal_occupancy_zero_temperature_is_exactly_zero():
    assert thermal_occupancy(10e9, 0.0) == 0.0
    out = thermal_occupancy(10e9, np.array([0.0, 0.01, 0.1]))
    assert out[0] == 0.0
    assert np.all(np.diff(out) > 0)


def test_thermal_occupancy_high_temperature_limit():
    T = 300.0
    f = 1e9
    assert thermal_occupancy(f, T) == pytest.approx(1.380649e-23 * T / (H * f) - 0.5, rel=1e-6)


def test_thermal_occupancy_errors():
    with pytest.raises(ValueError):
        thermal_occupancy(0.0, 1.0)
    with pytest.raises(ValueError):
        thermal_occupancy(1e9, -0.1)
