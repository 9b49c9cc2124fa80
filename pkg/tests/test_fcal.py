import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from trapped_pair.core import DomainError, PoleError, Strategy, TrapGeometry
from trapped_pair.fcal import (FContext, auto_strategy, cigar_msum, f_closed_cigar,
                               f_closed_pancake, f_eval, f_integral, f_quasi1d, f_quasi2d,
                               f_recurrence, f_series, f_value, phi_eval)
from trapped_pair.specfun import SQRT_PI, gamma_ratio, hurwitz_zeta

# F(x) at generic anisotropy from an independent 30-digit mpmath quadrature of
# the subtracted integral (with recurrence lifting for x <= 1)
FROZEN_F = [
    (0.7, 1.7, 0.14487034630889042),
    (2.0, 5.0, -0.73732343176642099),
    (1.3, 0.2, -3.4753476732187895),
    (0.4, 2.5, 4.8821546779059794),
    (3.0, 0.37, -5.6830509106916281),
    (-0.3, 1.7, -5.1146051168143174),
    (-1.45, 0.5, 14.248752846114297),
]

# Phi(x) from mpmath quadrature of -ln x - int_0^1 B(x+t, -1/2) dt
FROZEN_PHI = [(1.0, 3.0958776266425922), (0.5, 2.5631048174418381),
              (3.0, 4.7839644933874852), (0.01, 1.9516187138985384)]


def ctx(eta, strategy=None):
    return FContext(TrapGeometry(eta), strategy_override=strategy)


def sphere(x):
    return -2 * SQRT_PI * gamma_ratio(x, x - 0.5)


def near_pole(x, eta, margin=1e-3):
    # x within margin of -(n eta + j)
    n = 0
    while n * eta <= -x + 1:
        r = -x - n * eta
        if r > -margin and abs(r - round(r)) < margin:
            return True
        n += 1
    return False


@pytest.mark.parametrize("x, eta, ref", FROZEN_F)
def test_series_frozen(x, eta, ref):
    assert f_series(x, ctx(eta)).value == pytest.approx(ref, rel=1e-12, abs=1e-13)
    assert f_value(x, eta) == pytest.approx(ref, rel=1e-12, abs=1e-13)


@pytest.mark.parametrize("x, eta, ref", [r for r in FROZEN_F if r[0] > 0])
def test_integral_frozen(x, eta, ref):
    res = f_integral(x, ctx(eta))
    assert res.strategy is Strategy.INTEGRAL
    assert abs(res.value - ref) < 1e-9


def test_dispatch_examples():
    r = f_eval(1.0, ctx(1.0))
    assert r.value == pytest.approx(-2.0, rel=1e-15)
    assert r.strategy is Strategy.CLOSED_CIGAR
    assert auto_strategy(0.25) is Strategy.CLOSED_PANCAKE
    assert auto_strategy(1.7) is Strategy.SERIES
    # at eta = 1 the point x = -1/2 is a zero of F, the nearest pole is x = 0
    assert abs(f_eval(-0.5 + 1e-6, ctx(1.0)).value) < 1e-4
    assert abs(f_eval(1e-6, ctx(1.0)).value) > 1e5


def test_closed_forms_examples():
    assert f_closed_cigar(1.0, 1).value == pytest.approx(-2.0, rel=1e-15)
    assert f_closed_pancake(1.0, 1).value == pytest.approx(-2.0, rel=1e-15)
    assert f_closed_cigar(2.0, 5).value == pytest.approx(f_integral(2.0, ctx(5.0)).value, abs=1e-8)
    assert f_closed_pancake(1.3, 5).value == pytest.approx(f_integral(1.3, ctx(0.2)).value, abs=1e-9)
    assert f_closed_pancake(0.75, 2).value == pytest.approx(f_series(0.75, ctx(0.5)).value, abs=1e-9)
    s, err = cigar_msum(0.5, 2)
    assert abs(s.imag) < 1e-10


def test_poles_raise():
    with pytest.raises(PoleError):
        f_series(-3.0, ctx(1.7))
    with pytest.raises(PoleError):
        f_series(-1.7, ctx(1.7))
    with pytest.raises(PoleError):
        f_closed_pancake(-0.5, 2)
    with pytest.raises(DomainError):
        f_integral(-0.2, ctx(2.0))


@pytest.mark.parametrize("eta", [0.3, 1.7, 4.0])
def test_inverse_vanishes_at_poles(eta):
    for pole in (0.0, -eta, -1.0):
        for d in (1e-4, 1e-7, 1e-10):
            assert abs(1.0 / f_value(pole + d, eta)) < 10 * d / eta + 10 * d


def _q1d_correction(x, eta):
    # next asymptotic order omitted by the quasi-1D forms:
    # Gamma(z)/Gamma(z+1/2) = z^(-1/2) (1 + 1/(8z) + ...) summed over z = x + n*eta
    return SQRT_PI * eta ** -0.5 / 8 * hurwitz_zeta(1.5, x / eta)


def test_quasi1d_error_is_next_order_term():
    eta = 100.0
    exact = f_closed_cigar(100.0, 100).value
    bare = f_quasi1d(100.0, ctx(eta), "Bare").value
    corr = _q1d_correction(100.0, eta)
    assert exact - bare == pytest.approx(corr, rel=2e-3)
    exact5 = f_value(5.0, eta)
    plus = f_quasi1d(5.0, ctx(eta)).value
    assert exact5 - plus == pytest.approx(_q1d_correction(5.0 + eta, eta), rel=5e-2)
    with pytest.raises(PoleError):
        f_quasi1d(-2.0, ctx(eta))
    with pytest.raises(DomainError):
        f_quasi1d(-200.0, ctx(eta))


@pytest.mark.xfail(strict=True, reason="leading-order formula is 2.2e-3 (bare) and 1.03e-3 "
                   "(one recurrence step) away from the exact value; see decisions ledger")
def test_quasi1d_example_tolerance():
    eta = 100.0
    exact = f_closed_cigar(100.0, 100).value
    assert abs(f_quasi1d(100.0, ctx(eta), "Bare").value - exact) / abs(exact) < 1e-3
    exact5 = f_value(5.0, eta)
    assert abs(f_quasi1d(5.0, ctx(eta)).value - exact5) / abs(exact5) < 1e-3


def test_quasi2d_error_is_first_order_in_eta():
    errs = []
    for n in (100, 200, 400):
        exact = f_closed_pancake(1.0, n).value
        errs.append(abs(f_quasi2d(1.0, ctx(1.0 / n)).value - exact) / abs(exact))
    assert errs[0] < 2e-3
    assert errs[1] / errs[0] == pytest.approx(0.5, abs=0.01)
    assert errs[2] / errs[1] == pytest.approx(0.5, abs=0.01)
    assert f_quasi2d(3.0, ctx(0.1)).value == pytest.approx(f_value(3.0, 0.1), rel=1e-2)
    # psi(x/eta) pole dominates as x -> 0+, with the sign of the exact function
    small = f_quasi2d(1e-6, ctx(0.01)).value
    assert small == pytest.approx(0.01 / 1e-6, rel=1e-2)
    assert f_series(1e-6, ctx(0.01)).value > 0


@pytest.mark.xfail(strict=True, reason="O(eta) error is 1.6e-3 at eta = 0.01 and 3.4e-2 at "
                   "eta = 0.1, x = 0.5; see decisions ledger")
def test_quasi2d_example_tolerance():
    exact = f_closed_pancake(1.0, 100).value
    ok_small = abs(f_quasi2d(1.0, ctx(0.01)).value - exact) / abs(exact) < 1e-3
    exact = f_integral(0.5, ctx(0.1)).value
    ok_edge = abs(f_quasi2d(0.5, ctx(0.1)).value - exact) / abs(exact) < 1e-2
    assert ok_small or ok_edge


def test_phi_values():
    assert abs(phi_eval(0.0) - 1.938) < 1e-3
    assert phi_eval(0.0) == pytest.approx(1.9377897837407083, rel=1e-14)
    for x, ref in FROZEN_PHI:
        assert phi_eval(x) == pytest.approx(ref, rel=1e-13)
    with pytest.raises(DomainError):
        phi_eval(-1.0)


@given(st.floats(min_value=-0.95, max_value=20.0))
def test_phi_is_increasing(x):
    assert phi_eval(x + 1e-3) > phi_eval(x)


@given(st.floats(min_value=-6.0, max_value=6.0), st.floats(min_value=0.05, max_value=12.0))
def test_recurrence_identity(x, eta):
    assume(not near_pole(x, eta) and not near_pole(x + eta, eta) and abs(x - round(x)) > 1e-3)
    lhs = f_value(x, eta) - f_value(x + eta, eta)
    rhs = eta * SQRT_PI * gamma_ratio(x, x + 0.5)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@given(st.floats(min_value=-5.0, max_value=5.0))
def test_sphere_reduction(x):
    assume(not near_pole(x, 1.0) and abs(x - 0.5 - round(x - 0.5)) > 1e-3)
    ref = sphere(x)
    assert f_series(x, ctx(1.0 + 0.0)).value == pytest.approx(ref, rel=1e-9, abs=1e-9)


@given(st.floats(min_value=0.2, max_value=6.0), st.sampled_from([1.7, 2.5, 0.37, 3.0, 0.5]))
def test_integral_vs_series(x, eta):
    a = f_integral(x, ctx(eta))
    b = f_series(x, ctx(eta))
    assert abs(a.value - b.value) <= max(a.abs_err_estimate + b.abs_err_estimate, 1e-9)


@given(st.floats(min_value=-4.5, max_value=4.5), st.sampled_from([2, 3, 5]))
def test_cigar_real_and_matches_series(x, n):
    assume(not near_pole(x, n, 1e-2))
    c = f_closed_cigar(x, n)
    s = f_series(x, ctx(float(n)))
    assert abs(c.value - s.value) <= 1e-8 * max(1.0, abs(s.value))


@given(st.floats(min_value=-4.5, max_value=4.5))
def test_recurrence_strategy(x):
    eta = 1.3
    assume(not near_pole(x, eta, 1e-2))
    r = f_recurrence(x, max(1, math.ceil((0.5 - x) / eta)), ctx(eta))
    assert abs(r.value - f_value(x, eta)) <= 1e-8 * max(1.0, abs(r.value))


def test_f_eval_overrides():
    x = 0.9
    vals = [f_eval(x, ctx(3.0, s)).value for s in
            (Strategy.SERIES, Strategy.INTEGRAL, Strategy.RECURRENCE, Strategy.CLOSED_CIGAR)]
    assert np.ptp(vals) < 1e-9
    with pytest.raises(DomainError):
        f_eval(x, ctx(2.5, Strategy.CLOSED_CIGAR))
    with pytest.raises(DomainError):
        f_eval(x, ctx(0.3, Strategy.CLOSED_PANCAKE))
