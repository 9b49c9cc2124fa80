"""Effective one- and two-dimensional models of the trapped pair.

In an elongated trap (``eta >> 1``) the transverse motion freezes and the pair
behaves like two particles on a line with a renormalized 1D scattering
length. In a flattened trap (``eta << 1``) the axial motion freezes and a 2D
scattering length takes over. Both effective lengths have energy-dependent
versions that absorb the leading dependence of the transverse (axial) virtual
excitations on the collision energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import DomainError, NoRootError, PoleError, ShiftedEnergy, TrapGeometry
from .fcal import phi_eval, ratio_half
from .spectrum import solve_bracketed, solve_branch
from .specfun import SQRT_PI, ZETA_HALF, digamma, hurwitz_zeta

PHI_ZERO = phi_eval(0.0)
# E0 - E = SHALLOW_2D_PREFACTOR * exp(sqrt(pi)/a) for weakly bound 2D states
SHALLOW_2D_PREFACTOR = 2.0 * math.exp(-PHI_ZERO)
# constant used by an alternative 2D coupling convention, for comparison only
LOG_TWO_PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class A1D:
    """One-dimensional scattering length in units of ``d``."""

    value: float
    energy_dependent: bool = False
    source_energy: Optional[ShiftedEnergy] = None

    def __post_init__(self):
        if self.energy_dependent and self.source_energy is None:
            raise DomainError("energy-dependent A1D needs source_energy")


@dataclass(frozen=True)
class A2D:
    """Two-dimensional scattering length in units of ``d`` (always positive)."""

    value: float
    energy_dependent: bool = False
    source_energy: Optional[ShiftedEnergy] = None

    def __post_init__(self):
        if not self.value > 0:
            raise DomainError("A2D must be positive")
        if self.energy_dependent and self.source_energy is None:
            raise DomainError("energy-dependent A2D needs source_energy")


# ---------------------------------------------------------------------------
# quasi-1D


def a1d_static(a_inv: float, trap: TrapGeometry) -> A1D:
    """``a1D = -1/(2 eta a) - zeta(1/2)/(2 sqrt(eta))`` in units of ``d``."""
    eta = trap.eta
    return A1D(-a_inv / (2.0 * eta) - ZETA_HALF / (2.0 * math.sqrt(eta)))


def _a1d_of_energy(a_inv: float, e: float, eta: float) -> float:
    arg = 1.0 - e / (2.0 * eta)
    if not arg > 0:
        raise PoleError(f"Hurwitz argument {arg} not positive", location=2.0 * eta)
    return -a_inv / (2.0 * eta) - hurwitz_zeta(0.5, arg) / (2.0 * math.sqrt(eta))


def a1d_energy_dependent(a_inv: float, energy: ShiftedEnergy, trap: TrapGeometry) -> A1D:
    """Energy-dependent 1D scattering length.

    ``zeta(1/2)`` of the static form is replaced by
    ``zetaH(1/2, 1 - E/(2 eta))``, ``E`` being the shifted energy, so the
    static value is recovered exactly at ``E = 0``. Defined for
    ``E < 2 eta``.
    """
    return A1D(_a1d_of_energy(a_inv, energy.value, trap.eta), True, energy)


def cir_inverse_a(trap: TrapGeometry) -> float:
    """``d/a`` at which the static ``a1D`` vanishes (confinement-induced resonance)."""
    return -ZETA_HALF * math.sqrt(trap.eta)


def _energy(value: float, e_zero: float) -> Optional[ShiftedEnergy]:
    return None if math.isnan(value) else ShiftedEnergy(value, e_zero)


def _value(e: Optional[ShiftedEnergy]) -> float:
    return math.nan if e is None else e.value


def _poles_1d(count: int, extra: Sequence[float] = ()) -> list[float]:
    poles = sorted(set([2.0 * j for j in range(count)] + list(extra)))
    return poles


def _branch_roots(g: Callable[[float], float], poles: Sequence[float], n_branches: int,
                  lowest_open: bool = True) -> list[float]:
    # one root per interval (-inf, p0), (p0, p1), ...; NaN where none exists
    out = []
    for b in range(n_branches):
        hi = poles[b]
        lo = -math.inf if b == 0 else poles[b - 1]
        if b == 0 and not lowest_open:
            out.append(math.nan)
            continue
        try:
            out.append(solve_bracketed(g, lo, hi))
        except (NoRootError, ArithmeticError, DomainError):
            out.append(math.nan)
    return out


def solve_1d(a1d: A1D | float, n_branches: int = 3, trap: Optional[TrapGeometry] = None,
             tol: float = 1e-12) -> list[Optional[ShiftedEnergy]]:
    """Energies of the 1D harmonic problem with a contact interaction.

    Roots of ``2 a1D = Gamma(-E/2)/Gamma(-E/2 + 1/2)``, one per interval
    between the poles ``E = 2j``. The lowest interval (bound state) has a
    root only for ``a1D > 0``; otherwise its entry is None.
    """
    value = a1d.value if isinstance(a1d, A1D) else float(a1d)
    e_zero = trap.e_zero if trap is not None else 0.5
    if math.isinf(value):
        return [ShiftedEnergy(2.0 * j, e_zero) for j in range(n_branches)]

    def g(e):
        return ratio_half(-0.5 * e) - 2.0 * value

    roots = _branch_roots(g, _poles_1d(n_branches), n_branches, lowest_open=value > 0)
    return [_energy(r, e_zero) for r in roots]


def solve_quasi1d(a_inv: float, trap: TrapGeometry, n_branches: int = 3) -> list[Optional[ShiftedEnergy]]:
    """Self-consistent 1D energies with the energy-dependent ``a1D``.

    The composed residual ``Gamma(-E/2)/Gamma(-E/2+1/2) - 2 a1D(E)`` increases
    between its poles, so each interval is solved directly by bracketing.
    Branches are limited to ``E < 2 eta`` where ``a1D(E)`` is defined.
    """
    eta = trap.eta
    cap = 2.0 * eta
    poles = [p for p in _poles_1d(n_branches + 1) if p < cap] + [cap]

    def g(e):
        return ratio_half(-0.5 * e) - 2.0 * _a1d_of_energy(a_inv, e, eta)

    roots = _branch_roots(g, poles, min(n_branches, len(poles)))
    roots += [math.nan] * (n_branches - len(roots))
    return [_energy(r, trap.e_zero) for r in roots]


def bound_state_q1d(a_inv: float, trap: TrapGeometry, tol: float = 1e-13) -> ShiftedEnergy:
    """Bound state of the elongated trap from ``-d_perp/a = zetaH(1/2, s)``.

    ``s = (eta - E_total)/(2 eta)`` is the binding energy below the transverse
    threshold ``hbar omega_perp`` in units of ``2 hbar omega_perp``; the axial
    motion is treated as free.

    Only ``omega_perp`` enters: the result depends on ``eta`` and ``1/a`` through
    ``E/eta`` and ``a/d_perp``.
    """
    eta = trap.eta
    target = -a_inv / math.sqrt(eta)

    def h(s):
        return hurwitz_zeta(0.5, s) - target

    lo, hi = 0.5, 0.5
    while h(lo) <= 0:
        lo *= 0.25
        if lo < 1e-300:
            raise NoRootError("bound state too close to threshold")
    while h(hi) >= 0:
        hi *= 4.0
        if hi > 1e300:
            raise NoRootError("bound state too deep")
    s = brentq(h, lo, hi, xtol=tol * 1e-3, rtol=4 * np.finfo(float).eps, maxiter=200)
    # with free axial motion the threshold is hbar omega_perp, i.e. E_total = eta
    return ShiftedEnergy.from_total(eta - 2.0 * eta * s, trap)


# ---------------------------------------------------------------------------
# quasi-2D


def a2d_static(a_inv: float) -> A2D:
    """``a2D = exp(Phi(0)/2 - sqrt(pi)/(2a)) / sqrt(2)`` in units of ``d``."""
    return A2D(math.exp(0.5 * PHI_ZERO - 0.5 * SQRT_PI * a_inv) / math.sqrt(2.0))


def a2d_energy_dependent(a_inv: float, energy: ShiftedEnergy, trap: TrapGeometry) -> A2D:
    """Energy-dependent 2D scattering length, ``Phi(0) -> Phi(-E/2)``; needs ``E < 2``."""
    x = -0.5 * energy.value
    if not x > -1:
        raise DomainError("a2D(E) needs E < 2 (Phi defined for x > -1)")
    return A2D(math.exp(0.5 * phi_eval(x) - 0.5 * SQRT_PI * a_inv) / math.sqrt(2.0), True, energy)


def solve_2d(a2d: A2D | float, trap: TrapGeometry, n_branches: int = 3,
             tol: float = 1e-12) -> list[Optional[ShiftedEnergy]]:
    """Energies of the 2D harmonic problem, roots of ``-ln(2 a2D^2 eta) = psi(-E/(2 eta))``.

    The 2D trap frequency is ``omega_perp``, so the poles are at
    ``E = 2 eta j``.
    """
    eta = trap.eta
    value = a2d.value if isinstance(a2d, A2D) else float(a2d)
    lhs = -2.0 * math.log(value) - math.log(2.0 * eta)

    def g(e):
        return lhs - digamma(-e / (2.0 * eta))

    poles = [2.0 * eta * j for j in range(n_branches)]
    return [_energy(r, trap.e_zero) for r in _branch_roots(g, poles, n_branches)]


def quasi2d_residual(e: float, a_inv: float, eta: float) -> float:
    """``sqrt(pi)/a - [ln eta + Phi(-E/2) + psi(-E/(2 eta))]``."""
    return SQRT_PI * a_inv - (math.log(eta) + phi_eval(-0.5 * e) + digamma(-e / (2.0 * eta)))


def solve_quasi2d(a_inv: float, trap: TrapGeometry, n_branches: int = 3) -> list[Optional[ShiftedEnergy]]:
    """Self-consistent 2D energies with the energy-dependent ``a2D``.

    Roots of ``sqrt(pi)/a = ln eta + Phi(-E/2) + psi(-E/(2 eta))`` on the
    intervals between ``E = 2 eta j``; only ``E < 2`` is reachable.
    """
    eta = trap.eta
    poles = [p for p in (2.0 * eta * j for j in range(n_branches)) if p < 2.0]
    if len(poles) < n_branches:
        poles.append(2.0)

    def g(e):
        return quasi2d_residual(e, a_inv, eta)

    roots = _branch_roots(g, poles, min(n_branches, len(poles)))
    roots += [math.nan] * (n_branches - len(roots))
    return [_energy(r, trap.e_zero) for r in roots]


def solve_quasi2d_excited(a_inv: float, trap: TrapGeometry, n_branches: int = 3,
                          tol: float = 1e-12) -> list[Optional[ShiftedEnergy]]:
    """Excited (``E > 0``) branches of ``solve_quasi2d``."""
    return solve_quasi2d(a_inv, trap, n_branches + 1)[1:]


def bound_state_q2d(a_inv: float, trap: Optional[TrapGeometry] = None) -> ShiftedEnergy:
    """Flattened-trap bound state from ``sqrt(pi)/a = Phi(x) + ln x``, ``x = -E/2 > 0``."""
    target = SQRT_PI * a_inv

    def h(x):
        return phi_eval(x) + math.log(x) - target

    lo, hi = 1.0, 1.0
    while h(lo) >= 0:
        lo *= 0.1
        if lo < 1e-300:
            raise NoRootError("2D bound state below float resolution")
    while h(hi) <= 0:
        hi *= 10.0
        if hi > 1e300:
            raise NoRootError("2D bound state too deep")
    x = brentq(h, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=300)
    e_zero = trap.e_zero if trap is not None else 0.5
    return ShiftedEnergy(-2.0 * x, e_zero)


def shallow_bound_2d(a_inv: float) -> float:
    """Binding energy ``E0 - E = 2 exp(-Phi(0)) exp(sqrt(pi)/a)`` (prefactor about 0.288)."""
    return SHALLOW_2D_PREFACTOR * math.exp(SQRT_PI * a_inv)


def g2d_coupling(a_inv: float, k: float) -> float:
    """Two-dimensional coupling constant in units of ``hbar omega_z d^2``.

    ``2 pi / (sqrt(pi)/a - Phi(0) - ln(k^2/2))`` with ``k`` in ``1/d``. Replacing
    ``Phi(0)`` by ``ln(2 pi)`` gives an alternative convention; see
    ``LOG_TWO_PI``.
    """
    if not k > 0:
        raise DomainError("k must be positive")
    den = SQRT_PI * a_inv - PHI_ZERO - math.log(0.5 * k * k)
    if den == 0:
        raise PoleError("2D coupling diverges", location=a_inv)
    return 2.0 * math.pi / den


# ---------------------------------------------------------------------------
# comparison harness


@dataclass(frozen=True)
class LowDimRow:
    inv_a: float
    branch: int
    e_exact: float
    e_static: float
    e_energy: float


def compare_lowdim(inv_a_grid: Sequence[float], trap: TrapGeometry, n_branches: int = 3,
                   model: str = "auto") -> list[LowDimRow]:
    """Exact energies next to both effective-model energies on a ``1/a`` grid.

    ``model`` is ``"1d"``, ``"2d"`` or ``"auto"`` (1D for ``eta >= 1``).
    """
    if model == "auto":
        model = "1d" if trap.eta >= 1 else "2d"
    rows = []
    for ia in inv_a_grid:
        ia = float(ia)
        if model == "1d":
            st = solve_1d(a1d_static(ia, trap), n_branches, trap)
            en = solve_quasi1d(ia, trap, n_branches)
        elif model == "2d":
            st = solve_2d(a2d_static(ia), trap, n_branches)
            en = solve_quasi2d(ia, trap, n_branches)
        else:
            raise DomainError(f"unknown model {model!r}")
        for b in range(n_branches):
            try:
                ex = solve_branch(ia, b, trap).value
            except (NoRootError, ArithmeticError, DomainError):
                ex = math.nan
            rows.append(LowDimRow(ia, b, ex, _value(st[b]), _value(en[b])))
    return rows
