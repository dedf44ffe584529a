import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from elastic_esm.specfun import (
    BesselDomainError,
    BesselOrderError,
    bessel_j,
    bessel_y,
    hankel1,
    hankel1_deriv,
)

EULER_GAMMA = 0.57721566490153286


def _jprime(n, x):
    return bessel_j(n - 1, x) - n / x * bessel_j(n, x)


def _yprime(n, x):
    return bessel_y(n - 1, x) - n / x * bessel_y(n, x)


def test_j_at_origin():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(3, 0.0) == 0.0


def test_first_zero_of_j0():
    # frozen from an arbitrary-precision root finder
    assert abs(bessel_j(0, 2.404825557695773)) < 1e-10


def test_j_against_mpmath_over_range():
    worst = 0.0
    for n in (0, 1, 5, 30, 80, 120):
        for x in (0.3, 2.0, 17.5, 60.0, 199.0):
            worst = max(worst, abs(bessel_j(n, x) - float(mpmath.besselj(n, x))))
    assert worst < 1e-12


@pytest.mark.parametrize("n", range(21))
def test_wronskian_at_1p7(n):
    x = 1.7
    w = bessel_j(n, x) * _yprime(n, x) - _jprime(n, x) * bessel_y(n, x)
    assert abs(w - 2 / (np.pi * x)) < 1e-10


@pytest.mark.parametrize("x", [0.25, 1.0, np.pi / 2 * 2.4, np.pi * 2.4, 50.0])
def test_wronskian_suite(x):
    n = np.arange(61)
    w = bessel_j(n, x) * _yprime(n, x) - _jprime(n, x) * bessel_y(n, x)
    # relative: at x = 0.25 the two products are individually O(1e-2..1e2)
    np.testing.assert_allclose(w, 2 / (np.pi * x), rtol=1e-10, atol=0)


def test_y0_small_argument_expansion():
    # literal check: the two-term expansion itself is off by ~1.28e-6 here
    x = 1e-3
    approx = 2 / np.pi * np.log(x / 2) + 2 * EULER_GAMMA / np.pi
    assert abs(bessel_y(0, x) - approx) < 1e-6


def test_y0_small_argument_next_order():
    x = 1e-3
    lead = 2 / np.pi * (np.log(x / 2) + EULER_GAMMA)
    nxt = 2 / np.pi * (x**2 / 4) * (1 - np.log(x / 2) - EULER_GAMMA)
    assert abs(bessel_y(0, x) - (lead + nxt)) < 1e-12
    assert abs(bessel_y(0, x) - float(mpmath.bessely(0, x))) < 1e-13


def test_negative_order_reflection():
    assert bessel_y(-2, 3.1) == bessel_y(2, 3.1)
    assert bessel_y(-3, 3.1) == -bessel_y(3, 3.1)


@given(n=st.integers(0, 120), x=st.floats(0.01, 200.0))
def test_reflection_exact(n, x):
    s = (-1) ** n
    assert bessel_j(-n, x) == s * bessel_j(n, x)
    assert bessel_y(-n, x) == s * bessel_y(n, x)
    hm, hp = hankel1(-n, x), hankel1(n, x)
    assert hm.real == s * hp.real and hm.imag == s * hp.imag


@given(n=st.integers(0, 40), x=st.floats(0.05, 100.0))
def test_hankel_is_j_plus_iy(n, x):
    h = hankel1(n, x)
    assert h.real == pytest.approx(bessel_j(n, x), rel=1e-12, abs=1e-300)
    assert h.imag == pytest.approx(bessel_y(n, x), rel=1e-12)


@pytest.mark.parametrize("x", [0.5, 1.0, 5.0, 50.0])
def test_nicholson_lower_bound(x):
    # literal check; for order 0 the bound holds the other way round
    assert abs(hankel1(0, x)) ** 2 >= 2 / (np.pi * x)


@pytest.mark.parametrize("x", [0.5, 1.0, 5.0, 50.0])
def test_nicholson_bound_by_order(x):
    # x |H_n(x)|^2 tends to 2/pi from below for n = 0, from above for n >= 1
    assert abs(hankel1(0, x)) ** 2 <= 2 / (np.pi * x)
    for n in (1, 2, 5):
        assert abs(hankel1(n, x)) ** 2 >= 2 / (np.pi * x)


def test_h0_large_argument_asymptotic():
    x = 10.0
    asym = np.sqrt(2 / (np.pi * x)) * np.exp(1j * (x - np.pi / 4))
    assert abs(hankel1(0, x) - asym) / abs(asym) < 0.02


def test_deriv_recurrence_at_zero_order():
    assert abs(hankel1_deriv(0, 2.0) + hankel1(1, 2.0)) < 1e-12


def test_deriv_central_difference():
    n, x, h = 4, 3.3, 1e-6
    fd = (hankel1(n, x + h) - hankel1(n, x - h)) / (2 * h)
    assert abs(hankel1_deriv(n, x) - fd) < 1e-7


def test_hankel_wronskian_form():
    x = 1.7
    for n in range(10):
        val = np.imag(np.conj(hankel1(n, x)) * hankel1_deriv(n, x))
        assert abs(val - 2 / (np.pi * x)) < 1e-12


@given(x=st.floats(2.0, 150.0))
def test_forward_recurrence_in_stable_regime(x):
    n = np.arange(1, min(int(x), 120))
    lhs = bessel_j(n + 1, x)
    rhs = 2 * n / x * bessel_j(n, x) - bessel_j(n - 1, x)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_order_bound_enforced():
    with pytest.raises(BesselOrderError):
        bessel_j(121, 1.0)
    assert bessel_j(121, 1.0, n_max=130) > 0
    with pytest.raises(BesselOrderError):
        hankel1(2.5, 1.0)


def test_domain_errors():
    with pytest.raises(BesselDomainError):
        bessel_y(0, 0.0)
    with pytest.raises(BesselDomainError):
        hankel1(1, -1.0)
    with pytest.raises(BesselDomainError):
        bessel_j(0, -0.5)
