import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holobundle import torus
from holobundle.errors import GeometryMismatchError
from holobundle.torus import Field, TorusGeometry

TAU = 0.3 + 1.1j
GEOM = TorusGeometry(1, (TAU,), 6)

modes = st.tuples(st.integers(-6, 6), st.integers(-6, 6))


def plane_wave(g, freq):
    s, t = g.coordinates()
    return np.exp(2j * np.pi * (freq[0] * s + freq[1] * t))


@given(modes)
@settings(max_examples=40, deadline=None)
def test_real_derivatives_of_plane_waves(freq):
    f = Field.scalar(GEOM, plane_wave(GEOM, freq))
    for axis in (0, 1):
        expect = 2j * np.pi * freq[axis] * f.values
        assert np.abs(torus.deriv_real(f, axis).values - expect).max() < 1e-10


@given(modes)
@settings(max_examples=40, deadline=None)
def test_complex_derivatives_of_plane_waves(freq):
    # s = (tau zbar - conj(tau) z) / (tau - conj(tau)), t = (z - zbar) / (tau - conj(tau))
    m, n = freq
    den = TAU - np.conj(TAU)
    f = Field.scalar(GEOM, plane_wave(GEOM, freq))
    dz = 2j * np.pi * (-np.conj(TAU) * m + n) / den
    dzbar = 2j * np.pi * (TAU * m - n) / den
    assert np.abs(torus.deriv_z(f, 0).values - dz * f.values).max() < 1e-10
    assert np.abs(torus.deriv_zbar(f, 0).values - dzbar * f.values).max() < 1e-10


def test_laplacian_square_torus():
    g = TorusGeometry(1, (1j,), 5)
    f = Field.scalar(g, plane_wave(g, (2, -3)))
    lap = torus.deriv_z(torus.deriv_zbar(f, 0), 0) * 4
    expect = -(2 * np.pi) ** 2 * (4 + 9) * f.values
    assert np.abs(lap.values - expect).max() < 1e-9


def test_integrate_is_zero_mode():
    coeffs = np.zeros(GEOM.grid_shape, dtype=complex)
    coeffs[0, 0] = 0.7 - 0.2j
    coeffs[1, -1] = 3.0
    f = torus.from_modes(torus.ModeArray(GEOM, coeffs[..., None, None]))
    assert torus.integrate(f) == pytest.approx(0.7 - 0.2j)


def test_modes_roundtrip_and_degree(rng):
    vals = rng.standard_normal(GEOM.grid_shape + (2, 2))
    f = Field(GEOM, vals)
    back = torus.from_modes(torus.to_modes(f))
    assert np.allclose(back.values, vals)
    wave = Field.single_mode(GEOM, (2, -1))
    assert torus.to_modes(wave).degree() == 2


def test_evaluate_at_off_grid():
    f = Field.scalar(GEOM, plane_wave(GEOM, (1, 2)) + 0.5)
    x = (0.123, 0.77)
    expect = np.exp(2j * np.pi * (0.123 + 2 * 0.77)) + 0.5
    assert torus.evaluate_at(f, x)[0, 0] == pytest.approx(expect, abs=1e-12)


def test_interpolate_axis():
    f = plane_wave(GEOM, (3, 0))
    x = np.array([0.01, 0.5, 0.97])
    out = torus.interpolate_axis(f[:, :1], GEOM, 0, x)
    assert np.allclose(out[:, 0], np.exp(2j * np.pi * 3 * x))


def test_frequencies_fft_order():
    assert list(TorusGeometry(1, (1j,), 2).frequencies) == [0, 1, 2, -2, -1]


def test_complex_structure_squares_to_minus_one():
    g = TorusGeometry(2, (0.4 + 0.8j, -1.2 + 2j), 2)
    j = g.complex_structure()
    assert np.allclose(j @ j, -np.eye(4))


@pytest.mark.parametrize("kwargs, msg", [
    ({"d": 3, "tau": (1j,) * 3, "N": 2}, "dimension"),
    ({"d": 1, "tau": (1 - 1j,), "N": 2}, "Im"),
    ({"d": 1, "tau": (1j,), "N": 1}, "N must"),
    ({"d": 2, "tau": (1j,), "N": 2}, "moduli"),
])
def test_geometry_validation(kwargs, msg):
    with pytest.raises(ValueError, match=msg):
        TorusGeometry(**kwargs)


def test_geometry_dict_roundtrip():
    g = TorusGeometry(2, (0.1 + 1j, 2j), 4)
    assert g.to_dict()["N"] == 9
    assert TorusGeometry.from_dict(g.to_dict()) == g
    with pytest.raises(ValueError, match="odd"):
        TorusGeometry.from_dict({"d": 1, "tau": [[0, 1]], "N": 8})


def test_mixing_grids_raises():
    a = Field.zeros(GEOM)
    b = Field.zeros(TorusGeometry(1, (TAU,), 5))
    with pytest.raises(GeometryMismatchError):
        torus.multiply(a, b)


def test_nonfinite_values_rejected():
    with pytest.raises(ValueError, match="finite"):
        Field.scalar(GEOM, np.nan)
