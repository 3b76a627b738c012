import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from scatterkit import specfun as sf

# reference values from 40-digit mpmath evaluations
MP_J = {
    (0, 1.0): 0.76519768655796655,
    (1, 1.0): 0.44005058574493352,
    (5, 3.7): 0.09948541700833391,
    (30, 10.0): 1.551096078257467e-12,
    (60, 50.0): 0.0010485195995314181,
    (2, 0.3): 0.011165861949063963,
    (0, 25.0): 0.096266783275958116,
}
MP_Y = {
    (0, 1.0): 0.088256964215676958,
    (1, 1.0): -0.78121282130028872,
    (5, 3.7): -0.97906506823354206,
    (2, 0.3): -14.480094011452342,
    (0, 25.0): -0.12724943226800614,
    (60, 50.0): -9.194397418995578,
}


def test_trivial_values():
    assert sf.bessel_j(0, 0.0) == 1.0
    assert sf.bessel_j(1, 0.0) == 0.0
    assert sf.bessel_j(7, 0.0) == 0.0


@pytest.mark.parametrize("key", sorted(MP_J))
def test_j_against_high_precision(key):
    p, x = key
    assert sf.bessel_j(p, x) == pytest.approx(MP_J[key], rel=1e-12)


@pytest.mark.parametrize("key", sorted(MP_Y))
def test_y_against_high_precision(key):
    p, x = key
    assert sf.bessel_y(p, x) == pytest.approx(MP_Y[key], rel=1e-11)


def test_hankel_values():
    h = sf.hankel1(1, 1.0)
    assert h.real == pytest.approx(0.4400505857449335, abs=1e-13)
    assert h.imag == pytest.approx(-0.7812128213002887, abs=1e-13)
    assert sf.hankel1(0, 1.0) == sf.bessel_j(0, 1.0) + 1j * sf.bessel_y(0, 1.0)


def test_complex_argument():
    assert sf.bessel_j(2, 2 + 1j) == pytest.approx(
        0.41267190829317053 + 0.26597392279838854j, rel=1e-12
    )
    assert sf.bessel_j(0, 8 + 4j) == pytest.approx(2.9929102421483372 - 6.6845821112913367j, rel=1e-12)


def test_y_log_singularity():
    assert sf.bessel_y(0, 1e-8) < -10


def test_negative_orders():
    x = np.array([0.7, 3.3, 11.0])
    for p in range(1, 6):
        np.testing.assert_allclose(sf.bessel_j(-p, x), (-1) ** p * sf.bessel_j(p, x), rtol=0, atol=1e-15)
        np.testing.assert_allclose(sf.bessel_y(-p, x), (-1) ** p * sf.bessel_y(p, x), rtol=1e-14)


@pytest.mark.parametrize("p", range(0, 11))
@pytest.mark.parametrize("x", [0.5, 1.0, 5.0, 20.0])
def test_wronskian(p, x):
    w = sf.bessel_j(p + 1, x) * sf.bessel_y(p, x) - sf.bessel_j(p, x) * sf.bessel_y(p + 1, x)
    assert w == pytest.approx(2 / (np.pi * x), abs=1e-10)


@pytest.mark.parametrize("p", [1, 3, 8, 20])
def test_recurrence(p):
    x = np.linspace(max(p / 2, 0.5), 40, 25)
    for fn in (sf.bessel_j, sf.bessel_y):
        lhs = fn(p + 1, x)
        rhs = (2 * p / x) * fn(p, x) - fn(p - 1, x)
        scale = np.abs(fn(p - 1, x)) + np.abs(fn(p, x)) * 2 * p / x
        assert np.all(np.abs(lhs - rhs) <= 1e-9 * scale)


def test_real_and_complex_paths_agree():
    x = np.linspace(0.01, 60, 300)
    for p in (0, 1, 4, 17):
        np.testing.assert_allclose(
            sf.bessel_j(p, x), np.real(sf.bessel_j(p, x + 0j)), rtol=0, atol=1e-12
        )


def test_derivatives():
    assert sf.bessel_j_prime(0, 2.0) == pytest.approx(-sf.bessel_j(1, 2.0), abs=1e-15)
    assert sf.hankel1_prime(0, 1.0) == pytest.approx(-sf.hankel1(1, 1.0), abs=1e-14)
    h = 1e-5
    for fn, dfn in ((sf.bessel_j, sf.bessel_j_prime), (sf.bessel_y, sf.bessel_y_prime),
                    (sf.hankel1, sf.hankel1_prime)):
        fd = (fn(2, 3 + h) - fn(2, 3 - h)) / (2 * h)
        assert abs(dfn(2, 3.0) - fd) <= 1e-6


def test_derivative_complex_argument():
    z = 3.0 + 0.8j
    fd = (sf.bessel_j(3, z + 1e-6) - sf.bessel_j(3, z - 1e-6)) / 2e-6
    assert abs(sf.bessel_j_prime(3, z) - fd) < 1e-8


def test_hankel_modulus_decreasing():
    x = np.linspace(1, 20, 200)
    assert np.all(np.diff(np.abs(sf.hankel1(0, x))) < 0)


def test_spherical_j0():
    assert sf.spherical_j0(0.0) == 1.0
    assert abs(sf.spherical_j0(np.pi)) < 1e-15
    assert sf.spherical_j0(1.0) == pytest.approx(np.sin(1.0))


def test_errors():
    with pytest.raises(sf.UnsupportedOrderError):
        sf.bessel_j(61, 1.0)
    with pytest.raises(sf.UnsupportedOrderError):
        sf.hankel1(-70, 1.0)
    with pytest.raises(ValueError):
        sf.bessel_y(0, 0.0)
    with pytest.raises(ValueError):
        sf.bessel_y(1, -2.0)
    with pytest.raises(ValueError):
        sf.bessel_j(0, 2e4)


def test_array_shapes():
    x = np.linspace(0.1, 5, 12).reshape(3, 4)
    assert sf.bessel_j(3, x).shape == (3, 4)
    assert sf.hankel1(2, x).shape == (3, 4)
    assert isinstance(sf.bessel_j(0, 1.0), float)


@settings(max_examples=60, deadline=None)
@given(p=st.integers(-60, 60), x=st.floats(0.05, 200.0))
def test_j_matches_scipy(p, x):
    assert sf.bessel_j(p, x) == pytest.approx(special.jv(p, x), rel=1e-10, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(p=st.integers(0, 30), x=st.floats(0.5, 200.0))
def test_y_matches_scipy(p, x):
    ref = special.yv(p, x)
    # absolute error near zeros of Y is governed by the size of the neighbours
    scale = max(abs(ref), abs(special.yv(p + 1, x)), 1e-300)
    assert abs(sf.bessel_y(p, x) - ref) <= 1e-10 * scale
