"""Special functions used by the spectral and wavefunction formulas.

Everything here is real-valued and double precision. The second-kind Kummer
function is evaluated through ``G(a, b, y) = Gamma(a) U(a, b, y)``, which is
the combination that actually appears in the wavefunction series and stays
well scaled when ``a`` is large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli, comb

from .core import ConvergenceError, DomainError, PoleError

EULER_GAMMA = 0.57721566490153286061
SQRT_PI = math.sqrt(math.pi)

# B_2, B_4, ..., B_14
_B2K = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)


@dataclass(frozen=True)
class FnEval:
    """Function value with an absolute error estimate."""

    value: float
    abs_err: float


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def sinpi(x: float) -> float:
    """``sin(pi x)`` with exact argument reduction (exact zeros at integers)."""
    r = x - 2.0 * round(0.5 * x)
    if r > 0.5:
        return math.sin(math.pi * (1.0 - r))
    if r < -0.5:
        return -math.sin(math.pi * (1.0 + r))
    return math.sin(math.pi * r)


def cotpi(x: float) -> float:
    """``cot(pi x)`` with exact argument reduction."""
    r = x - round(x)
    return 1.0 / math.tan(math.pi * r)


def _stirling_tail(x: float) -> float:
    # lnGamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2] for x >= 10
    r = 1.0 / x
    r2 = r * r
    return r * (1 / 12 - r2 * (1 / 360 - r2 * (1 / 1260 - r2 * (1 / 1680 - r2 / 1188))))


def _log_gamma_ratio_pos(x: float, y: float) -> float:
    # ln Gamma(x) - ln Gamma(y) for x, y > 0; for large pairs the big
    # (x ln x) pieces are combined before they can cancel
    if x < 10 or y < 10:
        return math.lgamma(x) - math.lgamma(y)
    d = x - y
    return ((x - 0.5) * math.log1p(d / y) + d * math.log(y) - d
            + _stirling_tail(x) - _stirling_tail(y))


def gamma_ratio(x: float, y: float) -> float:
    """Return ``Gamma(x) / Gamma(y)``.

    The ratio is formed in log space with sign tracking, so it stays finite
    whenever the true ratio is representable.

    Parameters
    ----------
    x, y : float
        Arguments. A pole in the denominator gives 0. A pole in the
        numerator alone gives an infinity whose sign is the limit from the
        right. When both are poles the common-limit value
        ``(-1)**(n-m) m!/n!`` for ``x=-n, y=-m`` is returned.

    Returns
    -------
    float
    """
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError(f"gamma_ratio needs finite arguments, got ({x}, {y})")
    px, py = _is_nonpositive_int(x), _is_nonpositive_int(y)
    if px and py:
        n, m = int(-x), int(-y)
        sign = -1.0 if (n - m) % 2 else 1.0
        return sign * math.exp(math.lgamma(m + 1) - math.lgamma(n + 1))
    if py:
        return 0.0
    if px:
        return math.inf if int(-x) % 2 == 0 else -math.inf
    # Gamma(x) = pi / (sin(pi x) Gamma(1-x)) for x < 1/2, with sin(pi x)
    # reduced exactly so that relative accuracy survives next to poles
    sign = 1.0
    lg = 0.0
    if x < 0.5:
        sx = sinpi(x)
        sign *= math.copysign(1.0, sx)
        lg -= math.log(abs(sx))
        x_eff = 1.0 - x
    else:
        x_eff = x
    if y < 0.5:
        sy = sinpi(y)
        sign *= math.copysign(1.0, sy)
        lg += math.log(abs(sy))
        y_eff = 1.0 - y
    else:
        y_eff = y
    if (x < 0.5) == (y < 0.5):
        lg += _log_gamma_ratio_pos(x_eff, y_eff) if x >= 0.5 else _log_gamma_ratio_pos(y_eff, x_eff)
    elif x < 0.5:
        lg += math.log(math.pi) - math.lgamma(x_eff) - math.lgamma(y_eff)
    else:
        lg += math.lgamma(x_eff) + math.lgamma(y_eff) - math.log(math.pi)
    if lg > 709.7:
        return sign * math.inf
    return sign * math.exp(lg)


def digamma(x: float) -> float:
    """Digamma function ``psi(x)``.

    Raises
    ------
    PoleError
        At nonpositive integers.
    """
    if _is_nonpositive_int(x):
        raise PoleError(f"digamma pole at {x}", location=x)
    if x < 0.5:
        # reflection keeps the upward shift short for negative x
        return digamma(1.0 - x) - math.pi * cotpi(x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    r2 = 1.0 / (x * x)
    series = r2 * (_B2K[0] / 2 + r2 * (_B2K[1] / 4 + r2 * (_B2K[2] / 6 + r2 * (
        _B2K[3] / 8 + r2 * (_B2K[4] / 10 + r2 * (_B2K[5] / 12 + r2 * _B2K[6] / 14))))))
    return acc + math.log(x) - 0.5 / x - series


def _hurwitz_core(s: float, a: float) -> tuple[float, float]:
    shift = max(0, math.ceil(20.0 + 2.0 * s - a))
    head = 0.0
    for k in range(shift):
        head += (a + k) ** (-s)
    b = a + shift
    tail = b ** (1.0 - s) / (s - 1.0) + 0.5 * b ** (-s)
    # Euler-Maclaurin corrections B_2k/(2k)! (s)_{2k-1} b^{-s-2k+1}
    poch = s  # (s)_{1}
    fact = 2.0
    term = 0.0
    for j in range(1, 7):
        term = _B2K[j - 1] / fact * poch * b ** (-s - 2 * j + 1)
        tail += term
        poch *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    err = abs(_B2K[6] / fact * poch * b ** (-s - 13)) + 4e-16 * (abs(head) + abs(tail))
    return head + tail, err


def hurwitz_zeta(s: float, a: float) -> float:
    """Hurwitz zeta ``sum_k (k + a)**(-s)`` for ``a > 0`` and ``s != 1``.

    Evaluated by Euler-Maclaurin summation after shifting ``a`` upward.
    """
    return hurwitz_zeta_eval(s, a).value


def hurwitz_zeta_eval(s: float, a: float) -> FnEval:
    """Hurwitz zeta with an explicit remainder bound."""
    if not a > 0:
        raise DomainError(f"hurwitz_zeta needs a > 0, got {a}")
    if s == 1.0:
        raise PoleError("hurwitz_zeta pole at s = 1", location=1.0)
    value, err = _hurwitz_core(s, a)
    return FnEval(value, err)


ZETA_HALF = hurwitz_zeta(0.5, 1.0)


def beta_psi(x: float) -> float:
    """``[psi((x+1)/2) - psi(x/2)]/2`` for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"beta_psi needs x > 0, got {x}")
    z = 0.5 * x
    if z < 20.0:
        return 0.5 * (digamma(z + 0.5) - digamma(z))
    c = digamma_shift_coeffs(0.5, 12)
    return 0.5 * _power_series(c, 1.0 / z)


def _power_series(c: np.ndarray, w: float) -> float:
    # sum_k c[k] w**k, Horner
    acc = 0.0
    for ck in c[::-1]:
        acc = acc * w + ck
    return acc


# ---------------------------------------------------------------------------
# Asymptotic coefficient tables


@lru_cache(maxsize=None)
def _bernoulli_numbers(n: int) -> tuple:
    return tuple(float(b) for b in bernoulli(n))


def bernoulli_poly(n: int, h: float) -> float:
    """Bernoulli polynomial ``B_n(h)``."""
    b = _bernoulli_numbers(max(n, 1))
    return sum(comb(n, i, exact=True) * b[i] * h ** (n - i) for i in range(n + 1))


@lru_cache(maxsize=256)
def _gamma_ratio_coeffs_cached(alpha: float, beta: float, nterms: int) -> tuple:
    # log of the ratio minus (alpha-beta) ln z, as a power series in w = 1/z
    lcoef = [0.0] * (nterms + 1)
    for k in range(1, nterms + 1):
        lcoef[k] = ((-1) ** (k + 1) * (bernoulli_poly(k + 1, alpha) - bernoulli_poly(k + 1, beta))
                    / (k * (k + 1)))
    e = [1.0] + [0.0] * nterms
    for n in range(1, nterms + 1):
        e[n] = sum(k * lcoef[k] * e[n - k] for k in range(1, n + 1)) / n
    return tuple(e)


def gamma_ratio_coeffs(alpha: float, beta: float, nterms: int = 12) -> np.ndarray:
    """Coefficients ``c_j`` of the large-``z`` expansion.

    ``Gamma(z+alpha)/Gamma(z+beta) ~ z**(alpha-beta) * sum_j c_j z**(-j)``.
    """
    return np.array(_gamma_ratio_coeffs_cached(float(alpha), float(beta), int(nterms)))


@lru_cache(maxsize=64)
def _digamma_shift_cached(h: float, nterms: int) -> tuple:
    c = [0.0] * (nterms + 1)
    for k in range(1, nterms + 1):
        c[k] = (-1) ** (k + 1) * (bernoulli_poly(k, h) - bernoulli_poly(k, 0.0)) / k
    return tuple(c)


def digamma_shift_coeffs(h: float, nterms: int = 12) -> np.ndarray:
    """Coefficients of ``psi(z+h) - psi(z) ~ sum_k c_k z**(-k)``."""
    return np.array(_digamma_shift_cached(float(h), int(nterms)))


# ---------------------------------------------------------------------------
# Orthogonal polynomials


def laguerre(n: int, x: float) -> float:
    """Laguerre polynomial ``L_n(x)`` by upward recurrence."""
    if n < 0:
        raise DomainError("laguerre needs n >= 0")
    prev, cur = 0.0, 1.0
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def hermite(k: int, x: float) -> float:
    """Physicists' Hermite polynomial ``H_k(x)`` by upward recurrence."""
    if k < 0:
        raise DomainError("hermite needs k >= 0")
    prev, cur = 0.0, 1.0
    for n in range(k):
        prev, cur = cur, 2 * x * cur - 2 * n * prev
    return cur


def hermite_at_zero(k: int) -> float:
    """``H_k(0)``: zero for odd ``k`` and ``(-2)**m (2m-1)!!`` for ``k = 2m``."""
    if k % 2:
        return 0.0
    m = k // 2
    return (-1) ** m * math.exp(math.lgamma(k + 1) - math.lgamma(m + 1))


def laguerre_functions(nmax: int, y: float) -> np.ndarray:
    """``exp(-y/2) L_m(y)`` for ``m = 0..nmax`` (each bounded by 1 for y >= 0)."""
    out = np.empty(nmax + 1)
    prev, cur = 0.0, 1.0
    scale = math.exp(-0.5 * y)
    out[0] = scale
    for k in range(nmax):
        prev, cur = cur, ((2 * k + 1 - y) * cur - k * prev) / (k + 1)
        out[k + 1] = cur * scale
    return out


def hermite_functions(nmax: int, z: float) -> np.ndarray:
    """Orthonormal Hermite functions ``psi_n(z)`` for ``n = 0..nmax``."""
    out = np.empty(nmax + 1)
    out[0] = math.pi ** -0.25 * math.exp(-0.5 * z * z)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * z * out[0]
    for n in range(1, nmax):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * z * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


# ---------------------------------------------------------------------------
# Second-kind Kummer function


def _gamma_u_large_a(a: np.ndarray, b: float, y: float) -> np.ndarray:
    """``Gamma(a) U(a, b, y)`` for ``a >= 1`` by a peak-centred trapezoid rule.

    Uses ``int exp(a s - y e^s - (a+1-b) log(1+e^s)) ds`` over the real line
    with ``s = s* + sigma sinh(u)``; the trapezoid rule in ``u`` converges
    geometrically and the step is halved until two levels agree.
    """
    a = np.asarray(a, dtype=float)
    c = a + 1.0 - b
    q = 1.0 - b + y
    t = 2.0 * a / (q + np.sqrt(q * q + 4.0 * a * y))
    s0 = np.log(t)
    curv = y * t + c * t / (1.0 + t) ** 2
    sig = 1.0 / np.sqrt(curv)

    ty = y * t
    tq = t / (1.0 + t)
    wide = (t > 1.0)[:, None]
    inv1t = (1.0 / (1.0 + t))[:, None]

    def weights(u):
        # phi(s* + d) - phi(s*) written in increments so that large a does
        # not cancel digits; for t > 1 the log term is split as
        # d + log1p(expm1(-d)/(1+t)) so that a d and c d combine exactly
        sh, ch = np.sinh(u), np.cosh(u)
        d = sig[:, None] * sh[None, :]
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            em = np.expm1(d)
            near = a[:, None] * d - c[:, None] * np.log1p(tq[:, None] * em)
            far = (b - 1.0) * d - c[:, None] * np.log1p(np.expm1(-d) * inv1t)
            dphi = np.where(wide, far, near) - ty[:, None] * em
            w = np.exp(dphi) * (sig[:, None] * ch[None, :])
        return np.nan_to_num(w, nan=0.0, posinf=0.0)

    width = 4.0
    while True:
        edge = weights(np.array([-width, width]))
        if np.all(edge < 1e-20) or width > 9:
            break
        width += 1.0
    h = 0.2
    u = np.arange(-width, width + 0.5 * h, h)
    total = weights(u).sum(axis=1) * h
    for _ in range(8):
        h *= 0.5
        mid = np.arange(-width + h, width, 2 * h)
        new = 0.5 * total + weights(mid).sum(axis=1) * h
        change = np.abs(new - total)
        total = new
        if np.all(change <= 1e-14 * np.abs(new)):
            break
    else:
        if not np.all(change <= 1e-12 * np.abs(total)):
            raise ConvergenceError("trapezoid for Gamma(a)U(a,b,y) did not settle")
    phi0 = np.where(t > 1.0, (b - 1.0) * s0 - c * np.log1p(1.0 / t),
                    a * s0 - c * np.log1p(t)) - ty
    with np.errstate(over="ignore"):
        return total * np.exp(phi0)


def gamma_u(a, b: float, y: float) -> np.ndarray:
    """Vectorized ``G(a, b, y) = Gamma(a) U(a, b, y)``.

    Parameters
    ----------
    a : array_like
        First parameter; nonpositive integers are poles of ``G``.
    b : float
        Second parameter, ``b <= 1``.
    y : float
        Argument, ``y > 0`` (``y = 0`` is allowed for ``b < 1``).

    Returns
    -------
    ndarray
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if b > 1:
        raise DomainError("gamma_u is implemented for b <= 1")
    if y < 0 or (y == 0 and b == 1):
        raise DomainError(f"gamma_u needs y > 0 (or y = 0 with b < 1), got {y}")
    if np.any((a <= 0) & (a == np.floor(a))):
        bad = a[(a <= 0) & (a == np.floor(a))][0]
        raise PoleError(f"Gamma(a) pole at a = {bad}", location=float(bad))
    out = np.empty_like(a)
    if y == 0:
        # U(a, b, 0) = Gamma(1-b)/Gamma(a+1-b)
        g1b = math.gamma(1.0 - b)
        for i, ai in enumerate(a):
            out[i] = g1b * gamma_ratio(ai, ai + 1.0 - b)
        return out
    big = a >= 1.0
    if np.any(big):
        out[big] = _gamma_u_large_a(a[big], b, y)
    small = np.flatnonzero(~big)
    if small.size:
        shift = np.ceil(1.0 - a[small])
        a0 = a[small] + shift
        g0 = _gamma_u_large_a(a0, b, y)
        g1 = _gamma_u_large_a(a0 + 1.0, b, y)
        for idx, k, ga, gb, top in zip(small, shift.astype(int), g0, g1, a0):
            cur, nxt, aa = ga, gb, top
            for _ in range(k):
                # (a-1) G(a-1) + (b-2a-y) G(a) + (a-b+1) G(a+1) = 0
                cur, nxt = -((b - 2 * aa - y) * cur + (aa - b + 1) * nxt) / (aa - 1.0), cur
                aa -= 1.0
            out[idx] = cur
    return out


def hyper_u(a: float, b: float, x: float) -> float:
    """Kummer ``U(a, b, x)`` for ``b <= 1`` and ``x > 0``, any real ``a``."""
    if a >= 1.0:
        return float(gamma_u(a, b, x)[0]) / math.gamma(a) if a < 171 else float(
            gamma_u(a, b, x)[0] * math.exp(-math.lgamma(a)))
    k = math.ceil(1.0 - a)
    a0 = a + k
    g = gamma_u([a0, a0 + 1.0], b, x)
    cur = g[0] / math.gamma(a0)
    nxt = g[1] / math.gamma(a0 + 1.0)
    aa = a0
    for _ in range(k):
        # U(a-1) = -(b-2a-x) U(a) - a(a-b+1) U(a+1)
        cur, nxt = -(b - 2 * aa - x) * cur - aa * (aa - b + 1) * nxt, cur
        aa -= 1.0
    return cur


def hyper_u_b1(a: float, x: float) -> float:
    """``U(a, 1, x)`` for ``x > 0`` and any real ``a``."""
    if not x > 0:
        raise DomainError(f"U(a,1,x) diverges logarithmically at x = {x}")
    return hyper_u(a, 1.0, x)


def parabolic_cylinder_d(nu: float, x: float) -> float:
    """Weber function ``D_nu(x)`` for ``x >= 0`` and any real ``nu``."""
    if x < 0:
        raise DomainError("parabolic_cylinder_d is implemented for x >= 0")
    if x == 0:
        return 2.0 ** (0.5 * nu) * SQRT_PI * gamma_ratio(1.0, 0.5 * (1.0 - nu))
    return 2.0 ** (0.5 * nu) * math.exp(-0.25 * x * x) * hyper_u(-0.5 * nu, 0.5, 0.5 * x * x)


# ---------------------------------------------------------------------------
# Modified Bessel functions of the second kind


def _bessel_k_trapezoid(x: np.ndarray, order: int) -> np.ndarray:
    # K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, trapezoid is spectrally
    # accurate here because the integrand is entire and decays double-exponentially
    h = min(0.1, 0.6 / math.sqrt(float(np.max(x))))
    tmax = math.acosh(1.0 + 50.0 / float(np.min(x)))
    t = np.arange(0.0, tmax + h, h)
    w = np.full(t.shape, h)
    w[0] = 0.5 * h
    f = np.exp(-np.outer(x, np.cosh(t) - 1.0)) * np.cosh(order * t)
    return (f @ w) * np.exp(-x)


def _bessel_k_series(x: np.ndarray, order: int) -> np.ndarray:
    q = 0.25 * x * x
    lg = np.log(0.5 * x)
    if order == 0:
        term = np.ones_like(x)
        i0 = np.zeros_like(x)
        reg = np.zeros_like(x)
        harm = 0.0
        for k in range(30):
            if k:
                term = term * q / (k * k)
                harm += 1.0 / k
            i0 += term
            reg += term * harm
        return -(lg + EULER_GAMMA) * i0 + reg
    # order 1
    term = 0.5 * x
    i1 = np.zeros_like(x)
    reg = np.zeros_like(x)
    for k in range(30):
        if k:
            term = term * q / (k * (k + 1))
        i1 += term
        reg += term * (digamma(k + 1) + digamma(k + 2))
    return 1.0 / x + lg * i1 - 0.5 * reg


def _bessel_k(x, order: int):
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr <= 0):
        raise DomainError("Bessel K needs x > 0")
    out = np.empty_like(arr)
    lo = arr <= 2.0
    if np.any(lo):
        out[lo] = _bessel_k_series(arr[lo], order)
    if np.any(~lo):
        out[~lo] = _bessel_k_trapezoid(arr[~lo], order)
    return float(out[0]) if scalar else out


def bessel_k0(x):
    """Modified Bessel function ``K_0(x)`` for ``x > 0`` (scalar or array)."""
    return _bessel_k(x, 0)


def bessel_k1(x):
    """Modified Bessel function ``K_1(x)`` for ``x > 0`` (scalar or array)."""
    return _bessel_k(x, 1)
