"""Relative-motion eigenfunctions of the interacting pair.

The (non-normalized) eigenfunction at shifted energy ``E`` is the Green's
function of the trap,

    Psi(r) = sum_{n,k} phi_nk(0) phi_nk(r) / (2 eta n + k - E),

which behaves as ``1/(2 pi r)`` at short distance. Writing each denominator
as ``int_0^inf exp(-(2 eta n + k - E) t) dt`` turns the double sum into

    Psi = int_0^inf exp(E t) K_perp(t) K_z(t) dt,

with ``K_perp`` the Laguerre (2D oscillator) generating function and ``K_z``
the Mehler kernel. Summing the transverse index first and the axial one
analytically gives the axial series (parabolic cylinder functions); the
reverse order gives the radial series (Kummer functions). When a series has
not converged after ``max_terms`` terms, the missing tail is added as the
same integral with the first ``M`` generating-function terms subtracted,
which is exact and converges for any energy below the next excluded pole.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (ConvergenceError, DomainError, PoleError, ShiftedEnergy, TrapGeometry)
from .quadrature import integrate_semi_infinite
from .specfun import (SQRT_PI, bessel_k0, digamma, digamma_shift_coeffs, gamma_ratio,
                      gamma_ratio_coeffs, gamma_u, hermite_functions, hurwitz_zeta,
                      laguerre_functions)

_PI_QUARTER = math.pi ** -0.25
_CHUNK = 64
# direct power-series evaluation of a generating-function tail for q below this
_Q_SWITCH = 0.5
_TAIL_EXTRA = 64
# dimensionless radius below which grid evaluation prefers the axial series
AXIAL_RHO_SCALE = 0.05


class Representation(enum.Enum):
    AXIAL_SERIES = "AxialSeries"
    RADIAL_SERIES = "RadialSeries"
    INTEGRAL = "Integral"
    Q1D_BOUND = "Q1DBound"
    Q2D_BOUND = "Q2DBound"
    Q1D_EXCITED = "Q1DExcited"
    Q2D_EXCITED = "Q2DExcited"


@dataclass(frozen=True)
class WavefunctionEval:
    """Value of the non-normalized eigenfunction at ``(rho, z)``.

    Attributes
    ----------
    rho, z : float
        Position in units of ``d``.
    value : float
    representation : Representation
    abs_err : float
        Estimated absolute error (truncation envelope or quadrature error).
    n_terms : int
        Series terms summed explicitly.
    remainder : float
        Part of ``value`` that came from the integral tail; 0 when the series
        converged on its own.
    """

    rho: float
    z: float
    value: float
    representation: Representation
    abs_err: float = 0.0
    n_terms: int = 0
    remainder: float = 0.0


@dataclass(frozen=True)
class Normalization:
    """``N^-2 = int |Psi|^2 d^3r`` of the non-normalized eigenfunction.

    Attributes
    ----------
    n_inv_sq : float
    n_terms : int
        Terms summed directly before the asymptotic tail.
    tail_bound : float
        Size of the last retained correction in the tail expansion.
    first_term : float
        Contribution of the lowest term of the series (``m = 0`` or ``k = 0``).
    """

    n_inv_sq: float
    n_terms: int
    tail_bound: float
    first_term: float

    def __post_init__(self):
        if not self.n_inv_sq > 0:
            raise ConvergenceError(f"normalization sum is not positive: {self.n_inv_sq}")

    @property
    def factor(self) -> float:
        """The normalization constant ``N``."""
        return self.n_inv_sq ** -0.5

    @property
    def first_term_fraction(self) -> float:
        return self.first_term / self.n_inv_sq


# ---------------------------------------------------------------------------
# imaginary-time kernels (vectorized in t)


def _osc2d_kernel(t: np.ndarray, y: float, eta: float) -> np.ndarray:
    # sum_n phi_n(0) phi_n(rho) exp(-2 eta n t), y = eta rho^2
    one_q = -np.expm1(-2.0 * eta * t)
    with np.errstate(over="ignore", divide="ignore"):
        arg = -0.5 * y * (2.0 - one_q) / one_q if y else 0.0
        return (eta / math.pi) * np.exp(arg) / one_q


def _osc1d_kernel(t: np.ndarray, z: float) -> np.ndarray:
    # Mehler kernel sum_k psi_k(0) psi_k(z) exp(-k t)
    one_w = -np.expm1(-2.0 * t)
    with np.errstate(over="ignore", divide="ignore"):
        arg = -0.5 * z * z * (2.0 - one_w) / one_w if z else 0.0
        return np.exp(arg) / np.sqrt(math.pi * one_w)


def _free1d_kernel(t: np.ndarray, z: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.exp(-0.5 * z * z / t) / np.sqrt(2.0 * math.pi * t)


def _free2d_kernel(t: np.ndarray, rho: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.exp(-0.5 * rho * rho / t) / (2.0 * math.pi * t)


def _tail_sum(t: np.ndarray, energy: float, coef: np.ndarray, start: int, rate: float,
              full: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """``exp(E t) sum_{j >= start} coef[j] exp(-rate j t)``.

    ``full(t)`` is the complete generating function ``sum_j coef[j] q^j``
    with ``q = exp(-rate t)``; ``coef`` must extend ``_TAIL_EXTRA`` entries
    past ``start``.
    """
    q = np.exp(-rate * t)
    out = np.empty_like(t)
    small = q <= _Q_SWITCH
    if np.any(small):
        ts = t[small]
        j = np.arange(start, start + _TAIL_EXTRA)
        expo = (energy - rate * j[None, :]) * ts[:, None]
        out[small] = np.exp(expo) @ coef[start:start + _TAIL_EXTRA]
    big = ~small
    if np.any(big):
        tb = t[big]
        poly = np.polynomial.polynomial.polyval(q[big], coef[:start]) if start else 0.0
        out[big] = np.exp(energy * tb) * (full(tb) - poly)
    return out


def _remainder(integrand: Callable[[np.ndarray], np.ndarray], rate: float, tol: float):
    res = integrate_semi_infinite(integrand, decay_rate=rate, tol=tol, max_evals=2 ** 18)
    return res.value, res.abs_err


# ---------------------------------------------------------------------------
# coefficient tables


@lru_cache(maxsize=8)
def _psi_even_at_zero(kmax: int) -> np.ndarray:
    # psi_{2k}(0) = pi^{-1/4} (-1)^k sqrt(c_k), c_k = (2k)!/(4^k (k!)^2)
    k = np.arange(kmax + 1)
    log_c = np.zeros(kmax + 1)
    if kmax:
        log_c[1:] = np.cumsum(np.log((2.0 * k[1:] - 1.0) / (2.0 * k[1:])))
    return _PI_QUARTER * np.where(k % 2, -1.0, 1.0) * np.exp(0.5 * log_c)


def _even_mehler_coef(kmax: int, z: float) -> np.ndarray:
    # psi_{2k}(0) psi_{2k}(z) for k = 0..kmax
    herm = hermite_functions(2 * kmax, z)
    return _psi_even_at_zero(kmax) * herm[0::2]


def _check_energy(energy: ShiftedEnergy | float) -> float:
    e = energy.value if isinstance(energy, ShiftedEnergy) else float(energy)
    if not math.isfinite(e):
        raise DomainError("energy must be finite")
    return e


def _pole_check(a: np.ndarray, what: str):
    bad = (a <= 0) & (np.abs(a - np.round(a)) < 1e-13)
    if np.any(bad):
        raise PoleError(f"{what}: Gamma pole in a retained term", location=float(a[bad][0]))


# ---------------------------------------------------------------------------
# generic series driver


def _sum_series(term_block: Callable[[int, int], tuple[np.ndarray, np.ndarray]],
                tail_factor: Callable[[int], float], min_terms: int, max_terms: int,
                tol: float) -> tuple[float, int, float, bool]:
    """Sum terms block by block until the envelope tail bound drops below tol.

    ``term_block(lo, hi)`` returns the terms and their envelopes for indices
    ``lo..hi-1``; ``tail_factor(m)`` converts the envelope of term ``m`` into
    a bound on the whole tail from ``m`` on. Returns ``(sum, n_terms,
    tail_bound, converged)``.
    """
    parts: list[float] = []
    n = 0
    bound = math.inf
    block = _CHUNK
    while n < max_terms:
        hi = min(n + block, max_terms)
        terms, env = term_block(n, hi)
        parts.extend(terms.tolist())
        n = hi
        total = math.fsum(parts)
        if n >= min_terms:
            # env[-1] belongs to index n, the first term left out
            bound = float(env[-1]) * tail_factor(n)
            if bound <= tol * abs(total):
                return total, n, bound, True
        block = min(4 * block, 1024)
    total = math.fsum(parts)
    return total, n, bound, False


# ---------------------------------------------------------------------------
# exact representations


def _axial_min_terms(e: float, eta: float) -> int:
    # all retained a_m = eta m - E/2 must exceed 1 before the tail bound applies
    return max(2, int(math.ceil((1.0 + 0.5 * e) / eta)) + 1)


def psi_axial_series(energy: ShiftedEnergy | float, rho: float, z: float, trap: TrapGeometry,
                     tol: float = 1e-12, max_terms: int = 400) -> WavefunctionEval:
    """Eigenfunction from the series over transverse Laguerre states.

    ``Psi = eta/(2 pi^{3/2}) exp(-(eta rho^2 + z^2)/2) sum_m L_m(eta rho^2) G(eta m - E/2, 1/2, z^2)``
    with ``G(a, b, y) = Gamma(a) U(a, b, y)``; each term equals the usual
    ``2^{eta m - E/2} Gamma(eta m - E/2) D_{E - 2 eta m}(|z| sqrt 2)`` product
    but never forms the separately overflowing factors.

    Parameters
    ----------
    energy : ShiftedEnergy or float
        Shifted energy, off the pole lattice.
    rho, z : float
        Position in units of ``d``; ``rho = 0`` is allowed.
    trap : TrapGeometry
    tol : float
        Relative tolerance.
    max_terms : int
        Terms summed before the remaining tail is integrated.
    """
    e = _check_energy(energy)
    eta = trap.eta
    rho = abs(float(rho))
    az = abs(float(z))
    y = eta * rho * rho
    zz = az * az
    pref = eta / (2.0 * math.pi ** 1.5) * math.exp(-0.5 * zz)
    if rho == 0 and az == 0:
        raise DomainError("Psi diverges at r = 0")
    min_terms = _axial_min_terms(e, eta)
    max_terms = max(max_terms, min_terms)
    lag = laguerre_functions(max_terms + _TAIL_EXTRA, y)

    def block(lo, hi):
        a = eta * np.arange(lo, hi + 1) - 0.5 * e
        _pole_check(a, "axial series")
        g = gamma_u(a, 0.5, zz)
        terms = pref * lag[lo:hi] * g[:-1]
        return terms, pref * np.abs(g)

    if az > 0:
        def tail_factor(m):
            a = eta * m - 0.5 * e
            return 1.0 + (math.sqrt(a) / az + 0.5 / zz) / eta
    else:
        def tail_factor(m):
            return math.inf

    total, n, bound, ok = _sum_series(block, tail_factor, min_terms, max_terms, tol)
    if ok:
        return WavefunctionEval(rho, float(z), total, Representation.AXIAL_SERIES, bound, n)

    def integrand(t):
        tail = _tail_sum(t, e, lag, n, 2.0 * eta,
                         lambda tt: _osc2d_kernel(tt, y, eta) * (math.pi / eta))
        return (eta / math.pi) * tail * _osc1d_kernel(t, az)

    rem, err = _remainder(integrand, 2.0 * eta * n - e, 0.1 * tol * max(abs(total), 1e-300))
    return WavefunctionEval(rho, float(z), total + rem, Representation.AXIAL_SERIES, err, n, rem)


def psi_radial_series(energy: ShiftedEnergy | float, rho: float, z: float, trap: TrapGeometry,
                      tol: float = 1e-12, max_terms: int = 400) -> WavefunctionEval:
    """Eigenfunction from the series over even axial Hermite states.

    ``Psi = exp(-(eta rho^2+z^2)/2)/(2 pi^{3/2}) sum_k (-1)^k H_2k(z)/(4^k k!) G((2k - E)/(2 eta), 1, eta rho^2)``.
    The Hermite factor is evaluated through orthonormal Hermite functions,
    which stay bounded for large ``k``. Not valid on the axis ``rho = 0``.
    """
    e = _check_energy(energy)
    eta = trap.eta
    rho = abs(float(rho))
    if rho == 0:
        raise DomainError("the radial series diverges on the axis rho = 0")
    az = abs(float(z))
    y = eta * rho * rho
    pref = math.exp(-0.5 * y) / (2.0 * math.pi)
    min_terms = max(2, int(math.ceil(0.5 * e + eta)) + 1)
    max_terms = max(max_terms, min_terms)
    coef = _even_mehler_coef(max_terms + _TAIL_EXTRA, az)

    def block(lo, hi):
        a = (2.0 * np.arange(lo, hi + 1) - e) / (2.0 * eta)
        _pole_check(a, "radial series")
        g = gamma_u(a, 1.0, y)
        k = np.arange(lo, hi + 1)
        env = pref * _PI_QUARTER * np.abs(_psi_even_at_zero(hi)[k]) * np.abs(g)
        return pref * coef[lo:hi] * g[:-1], env

    def tail_factor(k):
        return 1.0 + math.sqrt(k) / rho + 0.5 / (rho * rho)

    total, n, bound, ok = _sum_series(block, tail_factor, min_terms, max_terms, tol)
    if ok:
        return WavefunctionEval(rho, float(z), total, Representation.RADIAL_SERIES, bound, n)

    def integrand(t):
        tail = _tail_sum(t, e, coef, n, 2.0, lambda tt: _osc1d_kernel(tt, az))
        return tail * _osc2d_kernel(t, y, eta)

    rem, err = _remainder(integrand, 2.0 * n - e, 0.1 * tol * max(abs(total), 1e-300))
    return WavefunctionEval(rho, float(z), total + rem, Representation.RADIAL_SERIES, err, n, rem)


def psi_bound_integral(energy: ShiftedEnergy | float, rho: float, z: float, trap: TrapGeometry,
                       tol: float = 1e-12) -> WavefunctionEval:
    """Bound-state eigenfunction from the imaginary-time integral.

    ``(2 pi)^{-3/2} eta int exp[t E_tot - z^2 coth(t)/2 - eta rho^2 coth(eta t)/2] / (sqrt(sinh t) sinh(eta t)) dt``,
    evaluated as ``int exp(E t) K_perp(t) K_z(t) dt``. Needs ``E < 0``.
    """
    e = _check_energy(energy)
    if not e < 0:
        raise DomainError("the integral representation converges only below E0 (E < 0)")
    eta = trap.eta
    rho = abs(float(rho))
    az = abs(float(z))
    if rho == 0 and az == 0:
        raise DomainError("Psi diverges at r = 0")
    y = eta * rho * rho

    def integrand(t):
        with np.errstate(under="ignore"):
            return np.exp(e * t) * _osc2d_kernel(t, y, eta) * _osc1d_kernel(t, az)

    # rough size of the result, used to turn the relative tolerance absolute
    r = math.hypot(rho, az)
    scale = math.exp(-math.sqrt(-2.0 * e) * r) / (2.0 * math.pi * r) if r > 0 else 1.0
    res = integrate_semi_infinite(integrand, decay_rate=-e, tol=tol * max(scale, 1e-300),
                                  max_evals=2 ** 18)
    return WavefunctionEval(rho, float(z), res.value, Representation.INTEGRAL, res.abs_err,
                            res.n_evals)


# ---------------------------------------------------------------------------
# quasi-1D and quasi-2D forms


def psi_q1d_bound(energy: ShiftedEnergy | float, rho: float, z: float, trap: TrapGeometry,
                  tol: float = 1e-12, max_terms: int = 400,
                  free_threshold: bool = True) -> WavefunctionEval:
    """Elongated-trap bound state: free axial motion in each transverse level.

    ``(eta exp(-eta rho^2/2)/(2 pi)) sum_m L_m(eta rho^2) exp(-2|z| sqrt(a_m))/sqrt(a_m)``
    with ``a_m = m eta - E'/2``. Meant for ``eta >> 1``.

    With free axial motion the continuum starts at ``hbar omega_perp``, so by
    default ``E' = E + 1/2`` is the energy above that threshold and the
    result needs ``E' < 0``. ``free_threshold=False`` uses ``E' = E``.
    """
    e = _check_energy(energy) + (0.5 if free_threshold else 0.0)
    if not e < 0:
        raise DomainError("psi_q1d_bound needs an energy below the free-axial threshold")
    eta = trap.eta
    rho = abs(float(rho))
    az = abs(float(z))
    if rho == 0 and az == 0:
        raise DomainError("Psi diverges at r = 0")
    y = eta * rho * rho
    pref = eta / (2.0 * math.pi)
    lag = laguerre_functions(max_terms + _TAIL_EXTRA, y)

    def block(lo, hi):
        a = eta * np.arange(lo, hi + 1) - 0.5 * e
        g = np.exp(-2.0 * az * np.sqrt(a)) / np.sqrt(a)
        return pref * lag[lo:hi] * g[:-1], pref * g

    if az > 0:
        def tail_factor(m):
            a = eta * m - 0.5 * e
            return 1.0 + (math.sqrt(a) / az + 0.5 / (az * az)) / eta
    else:
        def tail_factor(m):
            return math.inf

    total, n, bound, ok = _sum_series(block, tail_factor, 1, max_terms, tol)
    if ok:
        return WavefunctionEval(rho, float(z), total, Representation.Q1D_BOUND, bound, n)

    def integrand(t):
        tail = _tail_sum(t, e, lag, n, 2.0 * eta,
                         lambda tt: _osc2d_kernel(tt, y, eta) * (math.pi / eta))
        return (eta / math.pi) * tail * _free1d_kernel(t, az)

    rem, err = _remainder(integrand, 2.0 * eta * n - e, 0.1 * tol * max(abs(total), 1e-300))
    return WavefunctionEval(rho, float(z), total + rem, Representation.Q1D_BOUND, err, n, rem)


def psi_q2d_bound(energy: ShiftedEnergy | float, rho: float, z: float, trap: TrapGeometry,
                  tol: float = 1e-12, max_terms: int = 400,
                  free_threshold: bool = True) -> WavefunctionEval:
    """Flattened-trap bound state: free transverse motion in each axial level.

    ``(exp(-z^2/2)/pi^{3/2}) sum_k H_k(0) H_k(z)/(2^k k!) K_0(rho sqrt(2k - 2E'))``,
    only even ``k`` contributing. Meant for ``eta << 1``.

    With free transverse motion the continuum starts at ``hbar omega_z/2``,
    so by default ``E' = E + eta`` is the energy above that threshold and the
    result needs ``E' < 0``. ``free_threshold=False`` uses ``E' = E``.
    """
    e = _check_energy(energy) + (trap.eta if free_threshold else 0.0)
    if not e < 0:
        raise DomainError("psi_q2d_bound needs an energy below the free-transverse threshold")
    rho = abs(float(rho))
    if rho == 0:
        raise DomainError("K_0 diverges logarithmically at rho = 0")
    az = abs(float(z))
    coef = _even_mehler_coef(max_terms + _TAIL_EXTRA, az)

    def block(lo, hi):
        k = np.arange(lo, hi + 1)
        kv = bessel_k0(rho * np.sqrt(4.0 * k - 2.0 * e)) / math.pi
        env = _PI_QUARTER * np.abs(_psi_even_at_zero(hi)[k]) * kv
        return coef[lo:hi] * kv[:-1], env

    def tail_factor(k):
        return 1.0 + math.sqrt(k) / rho + 0.5 / (rho * rho)

    total, n, bound, ok = _sum_series(block, tail_factor, 1, max_terms, tol)
    if ok:
        return WavefunctionEval(rho, float(z), total, Representation.Q2D_BOUND, bound, n)

    def integrand(t):
        tail = _tail_sum(t, e, coef, n, 2.0, lambda tt: _osc1d_kernel(tt, az))
        return tail * _free2d_kernel(t, rho)

    rem, err = _remainder(integrand, 2.0 * n - e, 0.1 * tol * max(abs(total), 1e-300))
    return WavefunctionEval(rho, float(z), total + rem, Representation.Q2D_BOUND, err, n, rem)


def psi_q1d_excited(energy: ShiftedEnergy | float, rho: float, z: float,
                    trap: TrapGeometry) -> WavefunctionEval:
    """Lowest transverse term of the axial series; fails at small ``r``."""
    e = _check_energy(energy)
    eta = trap.eta
    rho = abs(float(rho))
    zz = float(z) ** 2
    a = -0.5 * e
    _pole_check(np.array([a]), "psi_q1d_excited")
    g = float(gamma_u(a, 0.5, zz)[0])
    val = eta / (2.0 * math.pi ** 1.5) * math.exp(-0.5 * (eta * rho * rho + zz)) * g
    return WavefunctionEval(rho, float(z), val, Representation.Q1D_EXCITED, 0.0, 1)


def psi_q2d_excited(energy: ShiftedEnergy | float, rho: float, z: float,
                    trap: TrapGeometry) -> WavefunctionEval:
    """Lowest axial term of the radial series; fails near ``rho = 0``."""
    e = _check_energy(energy)
    eta = trap.eta
    rho = abs(float(rho))
    if rho == 0:
        raise DomainError("U(a, 1, x) diverges at rho = 0")
    y = eta * rho * rho
    a = -e / (2.0 * eta)
    _pole_check(np.array([a]), "psi_q2d_excited")
    g = float(gamma_u(a, 1.0, y)[0])
    val = math.exp(-0.5 * (y + float(z) ** 2)) / (2.0 * math.pi ** 1.5) * g
    return WavefunctionEval(rho, float(z), val, Representation.Q2D_EXCITED, 0.0, 1)


# ---------------------------------------------------------------------------
# normalization


def _beta(x: float) -> float:
    # beta(x) = sum_k (-1)^k/(x+k) = [psi((x+1)/2) - psi(x/2)]/2
    return 0.5 * (digamma(0.5 * (x + 1.0)) - digamma(0.5 * x))


def _ratio_half(a: float) -> float:
    return gamma_ratio(a, a + 0.5)


def _psi_over_gamma(w: float) -> float:
    # psi(w)/Gamma(w) is entire; at w = -j it equals (-1)^(j+1) j!
    if w <= 0 and w == math.floor(w):
        j = int(-w)
        return (-1) ** (j + 1) * math.factorial(j)
    return digamma(w) * gamma_ratio(1.0, w)


def _axial_norm_term(a: float) -> float:
    """``Gamma(a)/Gamma(a+1/2) beta(2a)``, finite at ``a = -1/2 - j``."""
    if a > 0:
        return _ratio_half(a) * _beta(2.0 * a)
    # beta(2a) = [psi(a+1/2) - psi(a)]/2 and R(a) = Gamma(a)/Gamma(a+1/2)
    return 0.5 * (math.gamma(a) * _psi_over_gamma(a + 0.5) - _ratio_half(a) * digamma(a))


def norm_axial(energy: ShiftedEnergy | float, trap: TrapGeometry, tol: float = 1e-12,
               nterms: int = 12) -> Normalization:
    """``N^-2`` from the sum over transverse states.

    ``(eta/(2 pi)) sum_m [Gamma(a_m)/Gamma(a_m + 1/2)] beta(2 a_m)``,
    ``a_m = eta m - E/2``. Terms fall off as ``a^{-3/2}``; past ``a = 30`` the
    tail is summed from its large-``a`` expansion in Hurwitz zeta values.
    """
    e = _check_energy(energy)
    eta = trap.eta
    pref = eta / (2.0 * math.pi)
    m_direct = max(10, int(math.ceil((30.0 + 0.5 * e) / eta)))
    total = 0.0
    first = None
    for m in range(m_direct):
        a = eta * m - 0.5 * e
        if a <= 0 and abs(a - round(a)) < 1e-13:
            raise PoleError("energy on a pole of the axial normalization", location=e)
        term = _axial_norm_term(a)
        total += term
        if first is None:
            first = term
    # R(a) beta(2a) = sum_j e_j a^{-3/2-j}
    c = gamma_ratio_coeffs(0.0, 0.5, nterms)
    d = digamma_shift_coeffs(0.5, nterms + 1)
    ej = [0.5 * sum(c[i] * d[j + 1 - i] for i in range(0, j + 1)) for j in range(nterms)]
    h = -0.5 * e / eta
    tail = 0.0
    last = 0.0
    for j, cj in enumerate(ej):
        last = cj * eta ** (-1.5 - j) * hurwitz_zeta(1.5 + j, m_direct + h)
        tail += last
    total += tail
    return Normalization(pref * total, m_direct, pref * abs(last), pref * first)


def norm_radial(energy: ShiftedEnergy | float, trap: TrapGeometry, tol: float = 1e-12,
                nterms: int = 12) -> Normalization:
    """``N^-2`` from the sum over even axial states.

    ``(1/(4 pi^{3/2} eta)) sum_m [(2m)!/(2^m m!)^2] zetaH(2, (m - E/2)/eta)``.
    The tail is summed from the joint large-``m`` expansion.
    """
    e = _check_energy(energy)
    eta = trap.eta
    pref = 1.0 / (4.0 * math.pi ** 1.5 * eta)
    m_direct = max(10, int(math.ceil(max(30.0, 20.0 * eta) + 0.5 * e)))
    total = 0.0
    first = None
    log_c = 0.0
    for m in range(m_direct):
        if m:
            log_c += math.log((2.0 * m - 1.0) / (2.0 * m))
        arg = (m - 0.5 * e) / eta
        if arg <= 0 and abs(arg - round(arg)) < 1e-13:
            raise PoleError("energy on a pole of the radial normalization", location=e)
        term = math.exp(log_c) * _hurwitz_any(arg)
        total += term
        if first is None:
            first = term
    # c_m = Gamma(u + 1/2 + E/2)/Gamma(u + 1 + E/2)/sqrt(pi), u = m - E/2
    g = gamma_ratio_coeffs(0.5 + 0.5 * e, 1.0 + 0.5 * e, nterms)
    zc = [0.0] * nterms
    zc[0] = 1.0
    if nterms > 1:
        zc[1] = 0.5
    b2k = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)
    for k in range(1, nterms // 2 + 1):
        if 2 * k < nterms and k <= len(b2k):
            zc[2 * k] = b2k[k - 1]
    ej = [sum(g[i] * zc[j - i] * eta ** (j - i + 1) for i in range(j + 1)) / SQRT_PI
          for j in range(nterms)]
    u0 = m_direct - 0.5 * e
    tail = 0.0
    last = 0.0
    for j, cj in enumerate(ej):
        last = cj * hurwitz_zeta(1.5 + j, u0)
        tail += last
    total += tail
    return Normalization(pref * total, m_direct, pref * abs(last), pref * first)


def _hurwitz_any(a: float) -> float:
    # zetaH(2, a) for any real a off the nonpositive integers
    if a > 0:
        return hurwitz_zeta(2.0, a)
    k = int(math.floor(-a)) + 1
    return sum(1.0 / (a + j) ** 2 for j in range(k)) + hurwitz_zeta(2.0, a + k)


# ---------------------------------------------------------------------------
# convenience layer


def psi(energy: ShiftedEnergy | float, rho: float, z: float, trap: TrapGeometry,
        tol: float = 1e-12) -> WavefunctionEval:
    """Evaluate with the representation suited to the point.

    The axial series is used close to the axis (``rho < 0.05/sqrt(eta)``),
    the radial series elsewhere.
    """
    if abs(rho) < AXIAL_RHO_SCALE / math.sqrt(trap.eta):
        return psi_axial_series(energy, rho, z, trap, tol)
    return psi_radial_series(energy, rho, z, trap, tol)


@dataclass
class EigenState:
    """A solved eigenstate with lazily computed normalization.

    Attributes
    ----------
    energy : ShiftedEnergy
    branch : int
    trap : TrapGeometry
    inv_a : float
    """

    energy: ShiftedEnergy
    branch: int
    trap: TrapGeometry
    inv_a: float = math.nan
    _norm: Optional[Normalization] = field(default=None, repr=False)

    @classmethod
    def solve(cls, inv_a: float, branch: int, trap: TrapGeometry) -> "EigenState":
        from .spectrum import solve_branch
        return cls(solve_branch(inv_a, branch, trap), branch, trap, inv_a)

    @property
    def normalization(self) -> Normalization:
        if self._norm is None:
            self._norm = norm_axial(self.energy, self.trap)
        return self._norm

    def __call__(self, rho: float, z: float, normalized: bool = False,
                 tol: float = 1e-12) -> float:
        val = psi(self.energy, rho, z, self.trap, tol).value
        return val * self.normalization.factor if normalized else val

    def grid(self, rho: Sequence[float], z: Sequence[float], normalized: bool = False,
             tol: float = 1e-10) -> np.ndarray:
        """Values on the outer product grid ``rho x z`` (shape ``(len(rho), len(z))``)."""
        out = np.empty((len(rho), len(z)))
        for i, r in enumerate(rho):
            for j, zv in enumerate(z):
                if r == 0 and zv == 0:
                    out[i, j] = math.inf
                    continue
                out[i, j] = psi(self.energy, r, zv, self.trap, tol).value
        return out * self.normalization.factor if normalized else out
