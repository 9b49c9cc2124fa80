import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from trapped_pair.core import DomainError, PoleError
from trapped_pair.specfun import (EULER_GAMMA, ZETA_HALF, bessel_k0, bessel_k1, beta_psi,
                                  digamma, gamma_ratio, gamma_ratio_coeffs, gamma_u, hermite,
                                  hermite_at_zero, hermite_functions, hurwitz_zeta,
                                  hurwitz_zeta_eval, hyper_u, laguerre, laguerre_functions,
                                  parabolic_cylinder_d)

mp.mp.dps = 30


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def off_pole(v, margin=1e-3):
    return not (v <= 0 and abs(v - round(v)) < margin)


# frozen reference values (mpmath, 30 digits)

def test_constants():
    assert ZETA_HALF == pytest.approx(-1.4603545088095868, rel=1e-15)
    assert abs(ZETA_HALF - (-1.4603545)) < 1e-6
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, rel=1e-15)


@pytest.mark.parametrize("x, y", [(0.5, 1.0), (10.3, 9.8), (-3.7, 2.2), (-40.25, -40.75),
                                  (150.0, 149.5), (1e-8, 0.5)])
def test_gamma_ratio_vs_mpmath(x, y):
    ref = float(mp.gamma(x) / mp.gamma(y))
    assert rel(gamma_ratio(x, y), ref) < 1e-12


def test_gamma_ratio_poles():
    # numerator pole: infinity with the sign of the limit from the right
    assert gamma_ratio(-2.0, 0.5) == math.inf
    assert gamma_ratio(-3.0, 0.5) == -math.inf
    assert gamma_ratio(0.5, -3.0) == 0.0
    # both poles: common limit (-1)^(n-m) m!/n!
    assert gamma_ratio(-3.0, -1.0) == pytest.approx(1.0 / 6.0, rel=1e-15)


@given(st.floats(min_value=-50, max_value=50), st.floats(min_value=-50, max_value=50))
def test_gamma_recurrence(x, y):
    assume(off_pole(x) and off_pole(x + 1) and off_pole(y) and abs(x) > 1e-3 and abs(y) > 1e-3)
    base = gamma_ratio(x, y)
    # stay inside the normal floating-point range
    assume(1e-290 < abs(base) < 1e290)
    r = gamma_ratio(x + 1, y) / base
    assert r == pytest.approx(x, rel=1e-11)


@pytest.mark.parametrize("x", [1e-6, 0.3, 2.5, 17.0, 300.0, -0.5, -3.25, -10.9])
def test_digamma_vs_mpmath(x):
    assert rel(digamma(x), float(mp.digamma(x))) < 1e-12


@pytest.mark.parametrize("s, a", [(0.5, 1.0), (0.5, 0.3027), (2.0, 0.01), (2.0, 57.3),
                                  (1.5, 3.2), (4.5, 0.7), (0.5, 250.0)])
def test_hurwitz_vs_mpmath(s, a):
    ref = float(mp.zeta(s, a))
    ev = hurwitz_zeta_eval(s, a)
    assert abs(ev.value - ref) <= max(ev.abs_err, 1e-13 * abs(ref)) + 1e-15
    assert abs(hurwitz_zeta(s, a) - ref) < 1e-12 * max(1.0, abs(ref))


def test_hurwitz_domain():
    with pytest.raises(DomainError):
        hurwitz_zeta(0.5, 0.0)
    with pytest.raises(PoleError):
        hurwitz_zeta(1.0, 2.0)


@given(st.sampled_from([0.5, 2.0]), st.floats(min_value=0.01, max_value=100))
def test_hurwitz_shift(s, a):
    lhs = hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1)
    assert lhs == pytest.approx(a ** -s, rel=1e-10, abs=1e-12 * abs(hurwitz_zeta(s, a)))


@pytest.mark.parametrize("a, b, x", [(0.5, 1.0, 0.3), (2.7, 1.0, 5.0), (-1.3, 1.0, 2.0),
                                     (0.25, 0.5, 0.8), (-3.5, 0.5, 7.5), (1.0, 1.0, 30.0),
                                     (6.2, 1.0, 0.05), (0.7, 0.5, 20.0)])
def test_hyper_u_vs_mpmath(a, b, x):
    assert rel(hyper_u(a, b, x), float(mp.hyperu(a, b, x))) < 1e-10


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=0.05, max_value=20))
def test_hyper_u_contiguous_b1(a, x):
    um, u0, up = hyper_u(a - 1, 1.0, x), hyper_u(a, 1.0, x), hyper_u(a + 1, 1.0, x)
    scale = max(abs(um), abs((1 - 2 * a - x) * u0), abs(a * a * up))
    assert abs(um + (1 - 2 * a - x) * u0 + a * a * up) <= 1e-9 * scale


@pytest.mark.parametrize("nu, x", [(0.0, 1.0), (2.0, 0.7), (-0.5, 2.0), (3.3, 4.0),
                                   (-4.1, 0.0), (-2.6, 5.5), (7.0, 2.0)])
def test_parabolic_cylinder_vs_mpmath(nu, x):
    assert rel(parabolic_cylinder_d(nu, x), float(mp.pcfd(nu, x))) < 1e-10


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=0.0, max_value=6))
def test_parabolic_cylinder_recurrence(nu, x):
    dp, d0, dm = (parabolic_cylinder_d(nu + 1, x), parabolic_cylinder_d(nu, x),
                  parabolic_cylinder_d(nu - 1, x))
    scale = max(abs(dp), abs(x * d0), abs(nu * dm))
    # rounding floor for points where every term vanishes (e.g. D_1 at x ~ 0)
    floor = 1e-14 * max(1.0, abs(d0))
    assert abs(dp - x * d0 + nu * dm) <= 1e-9 * scale + floor


@pytest.mark.parametrize("x", [1e-4, 0.1, 1.0, 4.0, 25.0])
def test_bessel_vs_mpmath(x):
    assert rel(float(bessel_k0(x)), float(mp.besselk(0, x))) < 1e-12
    assert rel(float(bessel_k1(x)), float(mp.besselk(1, x))) < 1e-12


@given(st.floats(min_value=0.05, max_value=20))
def test_bessel_k0_derivative(x):
    h = 1e-6
    fd = (float(bessel_k0(x + h)) - float(bessel_k0(x - h))) / (2 * h)
    assert fd == pytest.approx(-float(bessel_k1(x)), rel=1e-6, abs=1e-12)


def test_gamma_u_matches_product():
    a = np.array([0.3, 1.7, 12.5, -0.4])
    got = gamma_u(a, 1.0, 0.9)
    ref = [float(mp.gamma(v) * mp.hyperu(v, 1, 0.9)) for v in a]
    assert np.allclose(got, ref, rtol=1e-11)


def test_orthogonal_functions():
    z, y = 0.83, 1.7
    hf = hermite_functions(6, z)
    for n in range(7):
        ref = float(mp.hermite(n, z) * mp.exp(-z * z / 2)
                    / mp.sqrt(2 ** n * mp.factorial(n) * mp.sqrt(mp.pi)))
        assert hf[n] == pytest.approx(ref, rel=1e-13)
        assert hermite(n, z) == pytest.approx(float(mp.hermite(n, z)), rel=1e-13)
        assert hermite_at_zero(n) == pytest.approx(float(mp.hermite(n, 0)), abs=1e-12)
    lf = laguerre_functions(6, y)
    for m in range(7):
        ref = float(mp.laguerre(m, 0, y))
        assert laguerre(m, y) == pytest.approx(ref, rel=1e-13, abs=1e-14)
        assert lf[m] == pytest.approx(math.exp(-y / 2) * ref, rel=1e-13, abs=1e-14)


def test_beta_psi_vs_mpmath():
    for x in (0.3, 2.0, 55.0):
        ref = float((mp.digamma((x + 1) / 2) - mp.digamma(x / 2)) / 2)
        assert rel(beta_psi(x), ref) < 1e-12


def test_gamma_ratio_coeffs_asymptotics():
    # Gamma(z+a)/Gamma(z+b) ~ z^(a-b) sum_j c_j z^-j
    a, b, z = 0.25, 0.75, 40.0
    c = gamma_ratio_coeffs(a, b, 12)
    approx = z ** (a - b) * sum(cj * z ** -j for j, cj in enumerate(c))
    assert rel(approx, float(mp.gamma(z + a) / mp.gamma(z + b))) < 1e-14
