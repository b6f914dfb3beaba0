import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose
from scipy import integrate, special

from fracdo.specfun import (ConvergenceError, MittagLefflerParams, WrightParams, bessel_j,
                            gamma_recip, mittag_leffler, ml_array, wright_neg, wright_phi,
                            WrightTable)


def mp_series_wright(alpha, rho, x, dps=60):
    """phi(-alpha, rho; -x) by direct summation in high precision (small x only)."""
    with mp.workdps(dps):
        a, r, z = mp.mpf(alpha), mp.mpf(rho), -mp.mpf(x)
        terms = [z ** k * mp.rgamma(r - a * k) / mp.factorial(k) for k in range(3000)]
        return float(mp.fsum(terms))


def mp_hankel_wright(alpha, rho, x, dps=60, n=60):
    """phi(-alpha, rho; -x) from the Hankel loop through the real saddle point."""
    with mp.workdps(dps):
        a, r, z = mp.mpf(alpha), mp.mpf(rho), mp.mpf(x)
        r0 = max((a * z) ** (1 / (1 - a)), mp.mpf(1))
        th = (mp.pi / 2 + min(mp.pi, mp.pi / (2 * a))) / 2
        f = lambda s: mp.exp(s - z * s ** a) * s ** -r
        e = mp.expj(th)
        ray = mp.quad(lambda t: mp.im(f(t * e) * e), mp.linspace(r0, 40 * r0, n) + [mp.inf])
        arc = mp.quad(lambda p: mp.re(f(r0 * mp.expj(p)) * r0 * mp.expj(p)), mp.linspace(0, th, n))
        return float((ray + arc) / mp.pi)


def mp_ml(rho, mu, z, dps=250):
    with mp.workdps(dps):
        z, rho, mu = mp.mpc(z), mp.mpf(rho), mp.mpf(mu)
        terms, k = [], 0
        while k < 30 or abs(terms[-1]) > mp.mpf(10) ** -30 or abs(terms[-2]) > mp.mpf(10) ** -30:
            terms.append(z ** k * mp.rgamma(mu + rho * k))
            k += 1
        return complex(mp.fsum(terms))


# gamma_recip

@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (0.0, 0.0), (-1.0, 0.0), (-7.0, 0.0),
                                         (0.5, 1 / math.sqrt(math.pi)), (3.0, 0.5)])
def test_gamma_recip_values(x, expected):
    assert gamma_recip(x) == pytest.approx(expected, rel=1e-15, abs=0)


@given(st.floats(-30, 30))
def test_gamma_recip_matches_mpmath(x):
    assert_allclose(gamma_recip(x), float(mp.rgamma(x)), rtol=1e-12, atol=1e-300)


# bessel_j

def _j0_series(z):
    return math.fsum((-z * z / 4) ** k / math.factorial(k) ** 2 for k in range(60))


def test_bessel_first_root_from_series_bisection():
    lo, hi = 2.0, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if _j0_series(lo) * _j0_series(mid) > 0 else (lo, mid)
    assert lo == pytest.approx(2.404825557695773, abs=1e-12)
    assert abs(bessel_j(0, 2.404825557695773)) < 1e-10


@pytest.mark.parametrize("order, z, expected", [(0, 0.0, 1.0), (1, 0.0, 0.0)])
def test_bessel_at_zero(order, z, expected):
    assert bessel_j(order, z) == expected


@given(st.floats(0, 1e4))
def test_bessel_matches_mpmath(z):
    assert_allclose(bessel_j(0, z), float(mp.besselj(0, z)), atol=1e-12)
    assert_allclose(bessel_j(1, z), float(mp.besselj(1, z)), atol=1e-12)


def test_bessel_rejects_order_and_negative():
    with pytest.raises(ValueError):
        bessel_j(2, 1.0)
    with pytest.raises(ValueError):
        bessel_j(0, -1.0)


def test_bessel_recurrence():
    z = np.linspace(0.1, 20, 200)
    h = 1e-5
    dj0 = (bessel_j(0, z + h) - bessel_j(0, z - h)) / (2 * h)
    j1 = bessel_j(1, z)
    big = np.abs(j1) > 1e-3
    assert np.max(np.abs(dj0 + j1)[big] / np.abs(j1[big])) < 1e-6


# Wright function

@pytest.mark.parametrize("beta, rho, z, expected", [
    (-0.5, 1.0, 0.0, 1.0),
    (-0.5, 0.0, 0.0, 0.0),
    (-0.5, 0.5, -1.0, math.exp(-0.25) / math.sqrt(math.pi)),
])
def test_wright_examples(beta, rho, z, expected):
    assert wright_phi(WrightParams(beta, rho, z)) == pytest.approx(expected, abs=1e-13)


def test_wright_example_against_series_oracle():
    assert_allclose(wright_phi(WrightParams(-0.5, 0.5, -1.0)), mp_series_wright(0.5, 0.5, 1.0), rtol=1e-13)


@given(st.floats(0, 40))
def test_m_wright_identity(x):
    assert_allclose(wright_neg(0.5, 0.5, x), math.exp(-x * x / 4) / math.sqrt(math.pi),
                    rtol=1e-10, atol=1e-300)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("rho", [1.0, 0.0, 0.3, -0.6, 2.0])
@pytest.mark.parametrize("x", [0.1, 1.0, 3.0])
def test_wright_against_mp_series(alpha, rho, x):
    assert_allclose(wright_neg(alpha, rho, x), mp_series_wright(alpha, rho, x), rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("alpha", [0.3, 0.8, 0.9])
@pytest.mark.parametrize("rho", [1.0, 0.3, -0.6])
@pytest.mark.parametrize("x", [1.5, 4.0, 12.0, 30.0])
def test_wright_against_hankel_loop(alpha, rho, x):
    ref = mp_hankel_wright(alpha, rho, x)
    assert_allclose(wright_neg(alpha, rho, x), ref, rtol=1e-9, atol=1e-300)


def test_wright_params_validation():
    with pytest.raises(ValueError):
        WrightParams(-1.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        WrightParams(-0.5, 1.0, 1.0)


def test_wright_convergence_error():
    with pytest.raises(ConvergenceError):
        wright_neg(0.1, 0.37, 9.5, max_terms=64)


@given(st.floats(0.1, 0.9), st.floats(-1.0, 2.0), st.floats(0.05, 15.0))
def test_wright_differentiation_identity(alpha, rho, x):
    # d/dz phi(beta, rho; z) = phi(beta, beta + rho; z) at z = -x
    h = 1e-5 * max(1.0, x)
    d = (wright_neg(alpha, rho, x - h) - wright_neg(alpha, rho, x + h)) / (2 * h)
    ref = wright_neg(alpha, rho - alpha, x)
    assert abs(d - ref) <= 1e-6 * max(abs(ref), 1e-3)


@pytest.mark.parametrize("mu", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("nu", ["0", "1-mu"])
@pytest.mark.parametrize("lam", [-1.0, -0.5])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_stankovic_transform(mu, nu, lam, t):
    nu = 0.0 if nu == "0" else 1.0 - mu
    f = lambda tau: math.exp(lam * tau) * t ** (nu - 1) * float(wright_neg(mu, nu, tau * t ** -mu))
    val = integrate.quad(f, 0, 5 * t ** mu, limit=200, epsabs=1e-13, epsrel=1e-12)[0] \
        + integrate.quad(f, 5 * t ** mu, np.inf, limit=200, epsabs=1e-13)[0]
    # the positive kernel damped by e^{lam tau}, lam < 0, gives E_mu(+lam t^mu; mu + nu)
    ref = t ** (mu + nu - 1) * ml_array(mu, mu + nu, np.array([lam * t ** mu]))[0].real
    assert val == pytest.approx(ref, abs=1e-6)


def test_wright_table_matches_direct():
    tab = WrightTable(0.6, 1.0 - 0.6, 8.0)
    z = np.linspace(0, 8, 777)
    assert_allclose(tab(z), wright_neg(0.6, 0.4, z), atol=1e-13)
    assert tab(np.array([9.0, -1.0])).tolist() == [0.0, 0.0]


# Mittag-Leffler

@pytest.mark.parametrize("rho, mu, z, expected", [
    (1.0, 1.0, 1.0, math.e),
    (0.5, 1.0, 0.0, 1.0),
])
def test_ml_examples(rho, mu, z, expected):
    assert mittag_leffler(MittagLefflerParams(rho, mu, z)) == pytest.approx(expected, rel=1e-14)


def test_ml_half_at_i():
    v = mittag_leffler(MittagLefflerParams(0.5, 1.0, 1j))
    assert_allclose(v, mp_ml(0.5, 1.0, 1j), atol=1e-10)
    assert_allclose(v, np.exp(-1.0) * special.erfc(-1j), atol=1e-10)


@given(st.floats(-4, 4), st.floats(-4, 4))
def test_ml_half_erfc_identity(re, im):
    z = complex(re, im)
    assert_allclose(ml_array(0.5, 1.0, np.array([z]))[0], np.exp(z * z) * special.erfc(-z),
                    rtol=1e-9, atol=1e-10)


@pytest.mark.parametrize("rho", [0.3, 0.7, 0.95])
@pytest.mark.parametrize("mu", [1.0, 0.7, 1.6])
@pytest.mark.parametrize("z", [2j, -3.0, 1.5 - 2j, 6j])
def test_ml_against_series_oracle(rho, mu, z):
    assert_allclose(ml_array(rho, mu, np.array([z]))[0], mp_ml(rho, mu, z), rtol=1e-9, atol=1e-10)


def test_ml_range_limit():
    with pytest.raises(ConvergenceError):
        ml_array(0.5, 1.0, np.array([60.0]))


@pytest.mark.parametrize("beta", [0.25, 0.35, 0.5])
def test_ml_bounded_on_positive_axis(beta):
    s = np.linspace(0, 3, 61)
    v = ml_array(beta, beta, s)
    assert np.all(np.isfinite(v))
    assert np.all(np.diff(v.real) > 0)
