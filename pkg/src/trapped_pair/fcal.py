"""The spectral function ``F(x)`` and the auxiliary function ``Phi(x)``.

Eigenenergies of the interacting pair satisfy ``-sqrt(pi)/a = F(-E/2)`` with
``E`` the shifted energy. ``F`` has simple poles at ``x = -(n*eta + j)`` and
increases between consecutive poles as ``-E/2`` decreases. Several
representations are provided:

* ``f_integral``: subtracted Laplace-type integral, ``x > 0``;
* ``f_series``: gamma-ratio series with a Hurwitz-zeta tail, any ``x``;
* ``f_recurrence``: shifts ``x`` by multiples of ``eta``;
* ``f_closed_cigar`` and ``f_closed_pancake``: integer and reciprocal-integer
  anisotropy;
* ``f_quasi1d`` and ``f_quasi2d``: limiting forms for ``eta >> 1`` and
  ``eta << 1``.

``f_eval`` picks an exact representation automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import ConvergenceError, DomainError, PoleError, SpectralFunctionResult, Strategy, TrapGeometry
from .quadrature import integrate_semi_infinite
from .specfun import (SQRT_PI, digamma, gamma_ratio, gamma_ratio_coeffs, hurwitz_zeta,
                      hurwitz_zeta_eval)

_EPS = np.finfo(float).eps
# direct summation is carried until the gamma-ratio argument reaches this value
_ASYMPTOTIC_START = 30.0
_N_ASYMPTOTIC = 14
_PHI_SPLIT_FACTOR = 6.0
_MAX_DIRECT_TERMS = 1_000_000


@dataclass(frozen=True)
class FContext:
    """Evaluation settings for ``F``.

    Parameters
    ----------
    trap : TrapGeometry
    strategy_override : Strategy, optional
        Force one representation in ``f_eval``.
    tol : float
        Absolute tolerance handed to quadratures.
    """

    trap: TrapGeometry
    strategy_override: Optional[Strategy] = None
    tol: float = 1e-10

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("FContext.tol must be positive")

    @property
    def eta(self) -> float:
        return self.trap.eta


def context(eta: float, **kw) -> FContext:
    """Shorthand for ``FContext(TrapGeometry(eta), ...)``."""
    return FContext(TrapGeometry(eta), **kw)


def _is_pole_arg(z: float) -> bool:
    return z <= 0 and z == math.floor(z)


def ratio_half(z: float) -> float:
    """``Gamma(z)/Gamma(z + 1/2)``."""
    return gamma_ratio(z, z + 0.5)


def ratio_half_array(z: np.ndarray) -> np.ndarray:
    """Vectorized ``Gamma(z)/Gamma(z + 1/2)`` for arguments off the poles.

    Uses the large-``z`` expansion above 15 and the upward recurrence
    ``R(z) = R(z+1) (z + 1/2)/z`` below.
    """
    z = np.asarray(z, dtype=float)
    c = gamma_ratio_coeffs(0.0, 0.5, _N_ASYMPTOTIC)
    steps = np.maximum(0, np.ceil(15.0 - z)).astype(int)
    zz = z + steps
    w = 1.0 / zz
    acc = np.zeros_like(zz)
    for cj in c[::-1]:
        acc = acc * w + cj
    out = acc / np.sqrt(zz)
    kmax = int(steps.max()) if steps.size else 0
    for i in range(kmax):
        act = steps > i
        zi = z[act] + i
        out[act] *= (zi + 0.5) / zi
    return out


# ---------------------------------------------------------------------------
# Series


def f_series(x: float, ctx: FContext) -> SpectralFunctionResult:
    """``F(x)`` from the gamma-ratio series, valid for every ``x`` off the poles.

    The summand ``Gamma(z)/Gamma(z+1/2)`` with ``z = x + n*eta`` is summed
    directly until ``z`` reaches 30. The rest, together with the subtracted
    ``1/sqrt(eta (n+1))`` terms and the ``zeta(1/2)`` constant, is resummed
    exactly through the asymptotic expansion of the ratio and Hurwitz zeta
    functions.
    """
    eta = ctx.eta
    n_direct = max(0, math.ceil((_ASYMPTOTIC_START - x) / eta))
    if n_direct > _MAX_DIRECT_TERMS:
        raise ConvergenceError(f"f_series would need {n_direct} direct terms")
    z = x + eta * np.arange(n_direct)
    bad = (z <= 0) & (z == np.floor(z))
    if np.any(bad):
        raise PoleError(f"F has a pole at x = {x}", location=x)
    terms = ratio_half_array(z) if n_direct else np.zeros(0)
    direct = float(terms.sum())
    c = gamma_ratio_coeffs(0.0, 0.5, _N_ASYMPTOTIC)
    shift = n_direct + x / eta
    tail = 0.0
    last = 0.0
    for j, cj in enumerate(c):
        last = cj * eta ** (0.5 - j) * hurwitz_zeta(0.5 + j, shift)
        tail += last
    value = SQRT_PI * (eta * direct + tail)
    err = SQRT_PI * (abs(last) + 8 * _EPS * (eta * float(np.abs(terms).sum()) + abs(tail)))
    return SpectralFunctionResult(value, Strategy.SERIES, err)


# ---------------------------------------------------------------------------
# Integral representation


def _ell(u: np.ndarray) -> np.ndarray:
    # log(u / (1 - exp(-u))) without cancellation at small u
    u = np.asarray(u, dtype=float)
    small = u < 0.1
    out = np.empty_like(u)
    us = u[small]
    u2 = us * us
    # u/2 - log(sinh(u/2)/(u/2))
    out[small] = us / 2 - u2 / 24 * (1 - u2 / 120 + u2 * u2 / 7560 - u2 ** 3 / 403200)
    ub = u[~small]
    out[~small] = np.log(ub) - np.log(-np.expm1(-ub))
    return out


def deff_integrand(x: float, eta: float) -> Callable[[np.ndarray], np.ndarray]:
    """Subtracted integrand whose integral over ``(0, inf)`` is ``F(x)``, ``x > 0``.

    ``exp(-x t) eta / (sqrt(1 - e^-t) (1 - e^(-eta t))) - t^(-3/2)``, written as
    ``t^(-3/2) expm1(L(t))`` so that the small-``t`` cancellation is exact.
    """

    def f(t):
        t = np.asarray(t, dtype=float)
        log_ratio = -x * t + 0.5 * _ell(t) + _ell(eta * t)
        return np.expm1(log_ratio) * t ** -1.5

    return f


def f_integral(x: float, ctx: FContext) -> SpectralFunctionResult:
    """``F(x)`` by quadrature of the subtracted integral; requires ``x > 0``."""
    if not x > 0:
        raise DomainError(f"f_integral needs x > 0 (got {x}); use f_series or f_recurrence")
    res = integrate_semi_infinite(deff_integrand(x, ctx.eta), decay_rate=x, tol=ctx.tol)
    return SpectralFunctionResult(float(res.value), Strategy.INTEGRAL, res.abs_err)


def f_recurrence(x: float, steps: int, ctx: FContext) -> SpectralFunctionResult:
    """``F(x) = F(x + steps*eta) + eta sqrt(pi) sum_k Gamma(x+k eta)/Gamma(x+k eta+1/2)``.

    The base value ``F(x + steps*eta)`` comes from the integral representation.
    """
    eta = ctx.eta
    if steps < 1:
        raise DomainError("f_recurrence needs steps >= 1")
    top = x + steps * eta
    if not top > 0:
        raise DomainError(f"x + steps*eta = {top} must be positive")
    base = f_integral(top, ctx)
    acc = 0.0
    for k in range(steps):
        z = x + k * eta
        if _is_pole_arg(z):
            raise PoleError(f"F has a pole at x = {x}", location=x)
        acc += ratio_half(z)
    value = base.value + eta * SQRT_PI * acc
    err = base.abs_err_estimate + 8 * _EPS * eta * SQRT_PI * abs(acc) * steps
    return SpectralFunctionResult(value, Strategy.RECURRENCE, err)


# ---------------------------------------------------------------------------
# Closed forms


def _sphere(x: float) -> float:
    # eta = 1: -2 sqrt(pi) Gamma(x)/Gamma(x - 1/2)
    if _is_pole_arg(x):
        raise PoleError(f"F has a pole at x = {x}", location=x)
    return -2.0 * SQRT_PI * gamma_ratio(x, x - 0.5)


def cigar_msum(x: float, n: int, tol: float = 1e-12) -> tuple[complex, float]:
    """Sum over ``m = 1..n-1`` of the fraction-decomposed integrals for ``eta = n``.

    Each term is ``int_0^inf e^(-x t) / (sqrt(1 - e^-t) (1 - e^(-t - 2 pi i m/n))) dt``.
    Returns the complex sum and its quadrature error; the imaginary part
    vanishes up to that error.
    """
    if not x > 0:
        raise DomainError("cigar_msum needs x > 0")
    total = 0j
    err = 0.0
    for m in range(1, n):
        phase = np.exp(-2j * math.pi * m / n)

        def f(t, phase=phase):
            et = np.exp(-t)
            return np.exp(-x * t) / (np.sqrt(-np.expm1(-t)) * (1.0 - phase * et))

        res = integrate_semi_infinite(f, decay_rate=max(x, 0.05), tol=tol)
        total += res.value
        err += res.abs_err
    return total, err


def f_closed_cigar(x: float, n: int, tol: float = 1e-12) -> SpectralFunctionResult:
    """``F(x)`` for integer anisotropy ``eta = n``.

    For ``x <= 1/2`` the argument is lifted by the recurrence before the
    quadratures are done.
    """
    if n < 1 or int(n) != n:
        raise DomainError("f_closed_cigar needs a positive integer n")
    n = int(n)
    if n == 1:
        v = _sphere(x)
        return SpectralFunctionResult(v, Strategy.CLOSED_CIGAR, 8 * _EPS * abs(v) * (1 + abs(x)))
    lift = 0
    acc = 0.0
    if x <= 0.5:
        lift = math.ceil((0.5 - x) / n)
        for k in range(lift):
            z = x + k * n
            if _is_pole_arg(z):
                raise PoleError(f"F has a pole at x = {x}", location=x)
            acc += ratio_half(z)
    xb = x + lift * n
    msum, err = cigar_msum(xb, n, tol)
    scale = max(1.0, abs(msum))
    if abs(msum.imag) > 1e-9 * scale:
        raise ConvergenceError(f"imaginary residue {msum.imag:g} in cigar closed form",
                               partial=msum.real, abs_err=abs(msum.imag))
    value = _sphere(xb) + msum.real + n * SQRT_PI * acc
    return SpectralFunctionResult(value, Strategy.CLOSED_CIGAR, err + 8 * _EPS * abs(value) * (1 + lift))


def f_closed_pancake(x: float, n: int) -> SpectralFunctionResult:
    """``F(x)`` for ``eta = 1/n``: ``-(2 sqrt(pi)/n) sum_m Gamma(x+m/n)/Gamma(x-1/2+m/n)``."""
    if n < 1 or int(n) != n:
        raise DomainError("f_closed_pancake needs a positive integer n")
    n = int(n)
    acc = 0.0
    mag = 0.0
    for m in range(n):
        z = x + m / n
        if _is_pole_arg(z):
            raise PoleError(f"F has a pole at x = {x}", location=x)
        r = gamma_ratio(z, z - 0.5)
        acc += r
        mag += abs(r)
    value = -2.0 * SQRT_PI / n * acc
    return SpectralFunctionResult(value, Strategy.CLOSED_PANCAKE,
                                  8 * _EPS * 2.0 * SQRT_PI / n * mag * (1 + abs(x)))


# ---------------------------------------------------------------------------
# Limiting forms


def f_quasi1d(x: float, ctx: FContext, order: str = "PlusRecurrence") -> SpectralFunctionResult:
    """Elongated-trap approximation.

    ``order="Bare"`` gives ``sqrt(pi eta) zetaH(1/2, x/eta)`` (needs ``x > 0``).
    ``order="PlusRecurrence"`` applies the recurrence once,
    ``sqrt(pi eta) zetaH(1/2, 1 + x/eta) + eta sqrt(pi) Gamma(x)/Gamma(x+1/2)``,
    valid for ``x > -eta``.
    """
    eta = ctx.eta
    if order == "Bare":
        if not x > 0:
            raise DomainError("bare quasi-1D form needs x > 0")
        h = hurwitz_zeta_eval(0.5, x / eta)
        return SpectralFunctionResult(math.sqrt(math.pi * eta) * h.value, Strategy.QUASI_1D,
                                      math.sqrt(math.pi * eta) * h.abs_err)
    if order != "PlusRecurrence":
        raise DomainError(f"unknown quasi-1D order {order!r}")
    if not x > -eta:
        raise DomainError("quasi-1D form with one recurrence step needs x > -eta")
    if _is_pole_arg(x):
        raise PoleError(f"Gamma pole at x = {x}", location=x)
    h = hurwitz_zeta_eval(0.5, 1.0 + x / eta)
    value = math.sqrt(math.pi * eta) * h.value + eta * SQRT_PI * ratio_half(x)
    return SpectralFunctionResult(value, Strategy.QUASI_1D, math.sqrt(math.pi * eta) * h.abs_err
                                  + 8 * _EPS * abs(value))


def _phi_tail_coeffs(x: float, nterms: int) -> list[float]:
    # expansion of (2/sqrt(pi)) c_k h_k in powers of y = x + k, where
    # c_k = Gamma(k+1/2)/(sqrt(pi) k!) and h_k = 1 - (k+1/2) log(1 + 1/(x+k))
    c = gamma_ratio_coeffs(0.5 - x, 1.0 - x, nterms)
    f = [0.0] * (nterms + 1)
    f[1] = x
    for m in range(2, nterms + 1):
        e_m = (-1) ** m * (1.0 / (m + 1) - 0.5 / m)
        f[m] = x * (-1) ** (m + 1) / m - e_m
    q = [0.0] * (nterms + 1)
    for n in range(1, nterms + 1):
        q[n] = sum(c[j] * f[n - j] for j in range(0, n))
    return q


def phi_eval(x: float) -> float:
    """The function ``Phi(x)`` entering the flattened-trap limit, for ``x > -1``.

    ``Phi(x) = 2 - ln(1+x) + 2 sum_k c_k [(k + 1/2) ln((x+k)/(x+k+1)) + 1]`` with
    ``c_k = (2k)!/(2^k k!)^2``. Terms up to ``k ~ max(30, 6x)`` are summed
    directly, the remainder by an expansion in ``1/(x+k)`` resummed with
    Hurwitz zeta functions. ``Phi(0)`` is about 1.938.
    """
    if not x > -1:
        raise DomainError(f"phi_eval needs x > -1, got {x}")
    # the tail coefficients grow like x**n, so the split must also keep
    # x/(x+k) small
    k_split = max(1, math.ceil(_ASYMPTOTIC_START - x), math.ceil(_PHI_SPLIT_FACTOR * x))
    k = np.arange(1, k_split, dtype=float)
    ck = np.cumprod((k - 0.5) / k)
    acc = math.fsum(ck * (1.0 - (k + 0.5) * np.log1p(1.0 / (x + k))))
    nterms = 12
    q = _phi_tail_coeffs(x, nterms)
    tail = 0.0
    for n in range(1, nterms + 1):
        tail += q[n] * hurwitz_zeta(0.5 + n, k_split + x)
    return 2.0 - math.log1p(x) + 2.0 * acc + 2.0 / SQRT_PI * tail


def f_quasi2d(x: float, ctx: FContext) -> SpectralFunctionResult:
    """Flattened-trap approximation ``F(x) ~ -Phi(x) - ln(eta) - psi(x/eta)``, ``x > -1``."""
    eta = ctx.eta
    if not x > -1:
        raise DomainError("quasi-2D form needs x > -1")
    arg = x / eta
    if _is_pole_arg(arg):
        raise PoleError(f"digamma pole at x = {x}", location=x)
    value = -phi_eval(x) - math.log(eta) - digamma(arg)
    return SpectralFunctionResult(value, Strategy.QUASI_2D, 1e-12 * max(1.0, abs(value)))


# ---------------------------------------------------------------------------
# Dispatcher


def _reciprocal_integer(eta: float) -> int | None:
    if eta >= 1:
        return None
    n = round(1.0 / eta)
    if n <= 1000 and abs(n * eta - 1.0) < 1e-13:
        return n
    return None


def auto_strategy(eta: float) -> Strategy:
    """Representation ``f_eval`` uses for a given anisotropy."""
    if eta == 1.0:
        return Strategy.CLOSED_CIGAR
    if _reciprocal_integer(eta) is not None:
        return Strategy.CLOSED_PANCAKE
    return Strategy.SERIES


def f_value(x: float, eta: float) -> float:
    """Fast exact ``F(x)`` (float only); same dispatch as ``f_eval``."""
    if eta == 1.0:
        return _sphere(x)
    n = _reciprocal_integer(eta)
    if n is not None:
        return f_closed_pancake(x, n).value
    return f_series(x, FContext(TrapGeometry(eta))).value


def f_eval(x: float, ctx: FContext) -> SpectralFunctionResult:
    """Evaluate ``F(x)`` with an exact representation.

    Without an override: the spherical closed form when ``eta = 1``, the
    pancake closed form when ``eta = 1/n``, and the series otherwise. The
    quadrature-based representations and the limiting forms are used only
    on request through ``ctx.strategy_override``.
    """
    s = ctx.strategy_override
    eta = ctx.eta
    if s is None:
        s = auto_strategy(eta)
        if s is Strategy.CLOSED_CIGAR:
            return f_closed_cigar(x, 1)
        if s is Strategy.CLOSED_PANCAKE:
            return f_closed_pancake(x, _reciprocal_integer(eta))
        return f_series(x, ctx)
    if s is Strategy.SERIES:
        return f_series(x, ctx)
    if s is Strategy.INTEGRAL:
        return f_integral(x, ctx)
    if s is Strategy.RECURRENCE:
        steps = max(1, math.ceil((0.5 - x) / eta))
        return f_recurrence(x, steps, ctx)
    if s is Strategy.CLOSED_CIGAR:
        if abs(eta - round(eta)) > 1e-13:
            raise DomainError("ClosedCigar needs integer eta")
        return f_closed_cigar(x, round(eta), tol=ctx.tol)
    if s is Strategy.CLOSED_PANCAKE:
        n = _reciprocal_integer(eta) if eta != 1.0 else 1
        if n is None:
            raise DomainError("ClosedPancake needs eta = 1/n")
        return f_closed_pancake(x, n)
    if s is Strategy.QUASI_1D:
        return f_quasi1d(x, ctx)
    if s is Strategy.QUASI_2D:
        return f_quasi2d(x, ctx)
    raise DomainError(f"unknown strategy {s!r}")
