import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import exp1

from condbound.errors import DomainError, ToleranceNotReached
from condbound.quadrature import (
    EULER_GAMMA,
    QuadratureConfig,
    archimedean_functional,
    euler_gamma_integral,
    exp_integral_e1,
    fixed_gauss,
    integrate_adaptive,
    m_lambda,
)
from condbound.testfunc import Odlyzko, PolyAutocorr

# M(lambda) for the Odlyzko function, from a 30-digit mpmath quadrature
M_ODLYZKO = {
    1.0: 2.3241628202681333959,
    1.47: 2.9236289730496384457,
    2.15: 3.4492173121504083793,
    3.58: 4.0213734470483649755,
}


def test_gamma_identity():
    assert euler_gamma_integral() == pytest.approx(EULER_GAMMA, abs=1e-10)


def test_gamma_constant_matches_mpmath():
    assert EULER_GAMMA == pytest.approx(float(mpmath.euler), abs=1e-16)


@pytest.mark.parametrize("x", [1e-8, 1e-3, 0.5, 1.0, 1.0000001, 2.0, 10.0, 50.0])
def test_e1_against_scipy(x):
    assert exp_integral_e1(x) == pytest.approx(exp1(x), rel=1e-13)


@given(st.floats(min_value=1e-6, max_value=60.0))
def test_e1_against_mpmath(x):
    assert exp_integral_e1(x) == pytest.approx(float(mpmath.e1(x)), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0])
def test_e1_domain(x):
    with pytest.raises(DomainError):
        exp_integral_e1(x)


@given(st.lists(st.floats(min_value=-5, max_value=5), min_size=1, max_size=12))
def test_gauss_exact_on_polynomials(coeffs):
    # degree <= 11 is integrated exactly by 6 nodes
    exact = np.polynomial.polynomial.polyint(coeffs)
    expected = np.polynomial.polynomial.polyval(2.0, exact) - np.polynomial.polynomial.polyval(-1.0, exact)
    got = fixed_gauss(lambda x: np.polynomial.polynomial.polyval(x, coeffs), -1.0, 2.0, 6)
    assert got == pytest.approx(expected, abs=1e-9 * (1 + abs(expected)))


def test_adaptive_smooth_and_kink():
    assert integrate_adaptive(np.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-12)
    assert integrate_adaptive(np.abs, -1.0, 2.0) == pytest.approx(2.5, abs=1e-10)


def test_adaptive_rejects_empty_interval():
    with pytest.raises(DomainError):
        integrate_adaptive(np.sin, 1.0, 1.0)


def test_adaptive_reports_failure():
    cfg = QuadratureConfig(abs_tol=1e-14, max_depth=2)
    with pytest.raises(ToleranceNotReached):
        integrate_adaptive(lambda x: np.sqrt(np.abs(x - 0.3)), 0.0, 1.0, cfg)


@pytest.mark.parametrize("lam", sorted(M_ODLYZKO))
def test_m_lambda_odlyzko(lam):
    assert m_lambda(Odlyzko(), lam) == pytest.approx(M_ODLYZKO[lam], abs=1e-10)


def test_m_lambda_requires_normalised_function():
    class Half:
        def __call__(self, x):
            return 0.5 * Odlyzko()(x)

    with pytest.raises(DomainError):
        m_lambda(Half(), 1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.2, max_value=5.0), st.floats(min_value=0.1, max_value=4.0))
def test_archimedean_functional_is_linear(lam, scale):
    F = Odlyzko()
    base = archimedean_functional(lambda x: F(x / lam), 1.0, lam)
    scaled = archimedean_functional(lambda x: scale * F(x / lam), scale, lam)
    assert scaled == pytest.approx(scale * base, rel=1e-9, abs=1e-9)


def test_triangle_against_mpmath():
    lam = 0.6
    tri = PolyAutocorr((1.0,))
    mpmath.mp.dps = 25
    head = mpmath.quad(lambda x: (1 - x / lam) / mpmath.expm1(x) - mpmath.exp(-x) / x, [0, lam])
    expected = 2 * (mpmath.log(2 * mpmath.pi) + head - mpmath.e1(lam))
    assert m_lambda(tri, lam) == pytest.approx(float(expected), abs=1e-10)
