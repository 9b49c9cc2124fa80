"""Energy-dependent scattering length near a magnetic Feshbach resonance.

The contact interaction is replaced by ``a_eff(E)``, built from the
resonance parameters, and the eigenvalue condition
``-sqrt(pi)/a_eff(E) = F(-E/2)`` is solved self-consistently. Here ``E`` in
``a_eff`` is the total relative-motion energy and the argument of ``F`` is
the shifted energy.

Inside the solver the inverse length is written as the Moebius function

    1/a_eff(E) = (B - B*(E)) / (a_bg (B - B0 - dB - E/E'm)),

with ``B*(E) = B0 + E/E'm - dB E/E_b`` the field at which ``a_eff`` diverges.
It is finite where ``a_eff`` diverges and has a single pole where ``a_eff``
vanishes, which becomes one more split point of the root search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.constants import atomic_mass, hbar, physical_constants
from scipy.optimize import brentq

from .core import DomainError, NoRootError, PoleError, ShiftedEnergy, TrapGeometry
from .fcal import f_value
from .specfun import SQRT_PI
from .spectrum import pole_lattice, solve_branch, worker_count

BOHR_MAGNETON = physical_constants["Bohr magneton"][0]
_SCAN = 48


@dataclass(frozen=True)
class FeshbachParams:
    """Resonance parameters in trap units.

    Attributes
    ----------
    a_bg : float
        Background scattering length in units of ``d``; nonzero.
    delta_b : float
        Resonance width ``dB`` in tesla.
    b0 : float
        Resonance position ``B0`` in tesla.
    em_slope : float
        ``E'm = dE_m/dB`` in ``hbar omega_z`` per tesla; nonzero.
    e_b : float, optional
        Background binding energy ``hbar^2/(m a_bg^2)`` in ``hbar omega_z``,
        equal to ``1/(2 a_bg^2)`` in these units. Derived when omitted and
        checked against ``a_bg`` to 1e-12 relative when given.
    """

    a_bg: float
    delta_b: float
    b0: float
    em_slope: float
    e_b: Optional[float] = None

    def __post_init__(self):
        for name in ("a_bg", "delta_b", "b0", "em_slope"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.a_bg == 0:
            raise DomainError("a_bg must be nonzero")
        if self.em_slope == 0:
            raise DomainError("em_slope must be nonzero")
        derived = 0.5 / (self.a_bg * self.a_bg)
        if self.e_b is None:
            object.__setattr__(self, "e_b", derived)
        elif abs(self.e_b - derived) > 1e-12 * derived:
            raise DomainError(f"e_b={self.e_b} is inconsistent with a_bg (expected {derived})")

    @property
    def gamma(self) -> float:
        """Reduced width ``gamma = dB a_bg E'm`` (``hbar omega_z d``)."""
        return self.delta_b * self.a_bg * self.em_slope

    @classmethod
    def from_si(cls, a_bg_m: float, delta_b_t: float, b0_t: float, em_slope_j_per_t: float,
                trap: TrapGeometry) -> "FeshbachParams":
        """Convert laboratory parameters using the trap's physical units.

        ``e_b`` follows from ``a_bg`` and the atom mass ``m = 2 mu``.
        """
        if not trap.has_physical_units:
            raise DomainError("from_si needs a trap with omega_z and reduced_mass")
        d = math.sqrt(hbar / (trap.reduced_mass * trap.omega_z))
        return cls(a_bg_m / d, delta_b_t, b0_t, em_slope_j_per_t / (hbar * trap.omega_z))

    @classmethod
    def from_resonance(cls, a_bg: float, gamma: float, b_res: float, delta_m: float,
                       em_slope: float) -> "FeshbachParams":
        """Build from ``gamma``, ``B_res`` and the shift ``Delta_m`` (trap units).

        ``B0 = B_res - Delta_m/E'm`` and ``dB = gamma/(a_bg E'm)``.
        """
        return cls(a_bg, gamma / (a_bg * em_slope), b_res - delta_m / em_slope, em_slope)


@dataclass(frozen=True)
class PhaseShiftParams:
    """Parameters of the resonant s-wave phase shift.

    The energy width is ``Gamma = 2 gamma k``.
    """

    delta_bg: float
    e_m: float
    delta_m: float
    gamma: float


def phase_shift(params: PhaseShiftParams, energy: float) -> float:
    """``delta_0 = delta_bg - arctan(gamma/(E - E_m - Delta_m))``.

    At ``E = E_m + Delta_m`` the value is the limit from above,
    ``delta_bg - sign(gamma) pi/2``.
    """
    den = energy - params.e_m - params.delta_m
    if den == 0:
        return params.delta_bg - math.copysign(0.5 * math.pi, params.gamma)
    return params.delta_bg - math.atan(params.gamma / den)


def divergence_field(params: FeshbachParams, energy: float) -> float:
    """``B*(E) = B0 + E/E'm - dB E/E_b``, where ``a_eff(E)`` diverges."""
    return params.b0 + energy / params.em_slope - params.delta_b * energy / params.e_b


def divergence_energy(params: FeshbachParams, b_field: float) -> float:
    """Energy at which ``a_eff`` diverges for field ``B`` (inverse of ``divergence_field``)."""
    kappa = 1.0 / params.em_slope - params.delta_b / params.e_b
    if kappa == 0:
        raise PoleError("divergence locus does not depend on energy")
    return (b_field - params.b0) / kappa


def a_eff_of_e(params: FeshbachParams, b_field: float, energy: float) -> float:
    """``a_bg [1 - dB (1 + E/E_b) / (B - B*(E))]`` in units of ``d``.

    Raises
    ------
    PoleError
        When ``B = B*(E)``; ``location`` holds that field value.
    """
    bstar = divergence_field(params, energy)
    den = b_field - bstar
    if den == 0:
        raise PoleError("a_eff diverges", location=bstar)
    return params.a_bg * (1.0 - params.delta_b * (1.0 + energy / params.e_b) / den)


def a_eff_static(params: FeshbachParams, b_field: float) -> float:
    """Zero-energy limit ``a_bg [1 - dB/(B - B0)]``."""
    den = b_field - params.b0
    if den == 0:
        raise PoleError("a diverges at B0", location=params.b0)
    return params.a_bg * (1.0 - params.delta_b / den)


def inverse_a_eff(params: FeshbachParams, b_field: float, energy: float) -> float:
    """``1/a_eff(E)``, finite where ``a_eff`` diverges."""
    num = b_field - divergence_field(params, energy)
    den = params.a_bg * (b_field - params.b0 - params.delta_b - energy / params.em_slope)
    if den == 0:
        return math.copysign(math.inf, num) if num else math.nan
    return num / den


def _zero_energy(params: FeshbachParams, b_field: float) -> Optional[float]:
    # total energy where a_eff(E) = 0, i.e. where 1/a_eff has its pole
    return params.em_slope * (b_field - params.b0 - params.delta_b)


@dataclass(frozen=True)
class FeshbachRoot:
    energy: ShiftedEnergy
    a_eff: float
    residual: float


def _residual_fn(params: FeshbachParams, trap: TrapGeometry, b_field: float):
    e0 = trap.e_zero
    eta = trap.eta

    def g(e_shift: float) -> float:
        return f_value(-0.5 * e_shift, eta) + SQRT_PI * inverse_a_eff(params, b_field, e_shift + e0)

    return g


def _scan_interval(g, lo: float, hi: float) -> list[float]:
    """All sign-change roots of ``g`` on ``(lo, hi)``, both ends singular."""
    width = hi - lo
    # nodes cluster towards both ends so roots hugging a pole are caught
    u = np.linspace(-1.0, 1.0, _SCAN + 1)[1:-1]
    s = 0.5 * (1.0 + np.tanh(3.0 * u) / math.tanh(3.0))
    nodes = lo + width * s
    extra = [lo + width * 10.0 ** (-k) for k in range(3, 15)]
    extra += [hi - width * 10.0 ** (-k) for k in range(3, 15)]
    nodes = np.unique(np.concatenate([nodes, extra]))
    nodes = nodes[(nodes > lo) & (nodes < hi)]
    vals = []
    for x in nodes:
        try:
            vals.append(g(float(x)))
        except (PoleError, ZeroDivisionError):
            vals.append(math.nan)
    roots = []
    for i in range(len(nodes) - 1):
        a, b, fa, fb = float(nodes[i]), float(nodes[i + 1]), vals[i], vals[i + 1]
        if not (math.isfinite(fa) and math.isfinite(fb)):
            continue
        if fa == 0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(brentq(g, a, b, xtol=2e-14, rtol=4 * np.finfo(float).eps, maxiter=200))
    return roots


def _lowest_open_end(g, hi: float) -> float:
    # walk down until g < 0: F -> -inf and 1/a_eff stays bounded as E -> -inf
    lo = hi - 1.0
    while not g(lo) < 0:
        lo = hi - 2.0 * (hi - lo)
        if lo < -1e12:
            raise NoRootError("no sign change below the lowest pole")
    # widen further so a possible deep molecular root is not skipped
    return hi - 4.0 * (hi - lo)


def feshbach_roots(params: FeshbachParams, trap: TrapGeometry, b_field: float,
                   count: int) -> list[FeshbachRoot]:
    """The lowest ``count`` self-consistent energies at field ``B``.

    Split points are the poles of ``F`` and the energy where ``a_eff = 0``;
    each piece is scanned for sign changes of
    ``F(-E/2) + sqrt(pi)/a_eff(E)``.
    """
    g = _residual_fn(params, trap, b_field)
    e0 = trap.e_zero
    n_poles = count + 2
    poles = [p for p, _ in pole_lattice(trap.eta, n_poles)]
    ez = _zero_energy(params, b_field)
    splits = list(poles)
    roots: list[float] = []
    if ez is not None and math.isfinite(ez):
        zs = ez - e0
        hit = [p for p in splits if abs(zs - p) <= 1e-12 * max(1.0, abs(p))]
        if hit:
            # the root normally squeezed between the two singular points
            # collapses onto the shared one
            roots.append(hit[0])
        elif zs < poles[-1]:
            splits.append(zs)
    splits.sort()
    lo = _lowest_open_end(g, splits[0])
    edges = [lo] + splits
    for a, b in zip(edges[:-1], edges[1:]):
        roots.extend(_scan_interval(g, a, b))
        if len(roots) >= count:
            break
    roots.sort()
    out = []
    for r in roots[:count]:
        try:
            ae = a_eff_of_e(params, b_field, r + e0)
        except PoleError:
            ae = math.inf
        try:
            fv = f_value(-0.5 * r, trap.eta)
            res = abs(g(r)) / max(1.0, abs(fv))
        except PoleError:
            res = 0.0
        out.append(FeshbachRoot(ShiftedEnergy(r, e0), ae, res))
    if len(out) < count:
        raise NoRootError(f"found only {len(out)} of {count} roots at B={b_field}")
    return out


def solve_feshbach_spectrum(params: FeshbachParams, trap: TrapGeometry, b_field: float,
                            branch: int, tol: float = 1e-12) -> ShiftedEnergy:
    """Self-consistent energy of ``branch`` (0 = lowest) at field ``B``.

    With ``dB = 0`` the interaction is the constant ``a_bg`` and the call
    goes through ``spectrum.solve_branch`` unchanged.
    """
    if branch < 0:
        raise DomainError("branch must be nonnegative")
    if params.delta_b == 0:
        return solve_branch(1.0 / params.a_bg, branch, trap)
    return feshbach_roots(params, trap, b_field, branch + 1)[branch].energy


@dataclass
class FeshbachSweep:
    """Energies versus magnetic field.

    Attributes
    ----------
    b_grid : ndarray
    energies : list of ndarray
        Total energies per branch (NaN where a point failed).
    a_eff : list of ndarray
        ``a_eff`` at each solved point.
    residuals : list of ndarray
    locus : ndarray
        Total energy at which ``a_eff`` diverges for each field value.
    """

    b_grid: np.ndarray
    energies: list[np.ndarray]
    a_eff: list[np.ndarray]
    residuals: list[np.ndarray]
    locus: np.ndarray
    failures: int = 0


def _sweep_point(args):
    params, eta, b, n = args
    trap = TrapGeometry(eta)
    try:
        roots = feshbach_roots(params, trap, b, n)
    except (NoRootError, DomainError, ArithmeticError, ValueError, RuntimeError):
        return None
    return [(r.energy.total, r.a_eff, r.residual) for r in roots]


def sweep_feshbach(params: FeshbachParams, trap: TrapGeometry, b_grid: Sequence[float],
                   n_branches: int, workers: Optional[int] = None) -> FeshbachSweep:
    """Lowest ``n_branches`` energies for each field in ``b_grid``.

    Points are independent and may be solved in parallel processes; a point
    whose roots cannot all be found is left as NaN in every branch.
    """
    grid = np.asarray(list(b_grid), dtype=float)
    if grid.size == 0:
        raise DomainError("b_grid is empty")
    if np.any(np.diff(grid) < 0):
        raise DomainError("b_grid must be sorted")
    tasks = [(params, trap.eta, float(b), n_branches) for b in grid]
    workers = worker_count(len(tasks)) if workers is None else max(1, workers)
    if workers > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_sweep_point(t) for t in tasks]
    energies = [np.full(grid.size, np.nan) for _ in range(n_branches)]
    aeff = [np.full(grid.size, np.nan) for _ in range(n_branches)]
    res = [np.full(grid.size, np.nan) for _ in range(n_branches)]
    failures = 0
    for i, row in enumerate(results):
        if row is None:
            failures += 1
            continue
        for b, (e, a, r) in enumerate(row):
            energies[b][i], aeff[b][i], res[b][i] = e, a, r
    try:
        locus = np.array([divergence_energy(params, b) for b in grid])
    except PoleError:
        locus = np.full(grid.size, np.nan)
    return FeshbachSweep(grid, energies, aeff, res, locus, failures)


def locus_crossings(sweep: FeshbachSweep) -> list[tuple[int, float, float]]:
    """Points where a branch crosses the divergence locus.

    On the locus ``a_eff`` is infinite, so a crossing must sit at a zero of
    ``F``, i.e. at a unitarity-limit energy. Returns ``(branch, B, E)`` with
    ``B`` and ``E`` linearly interpolated.
    """
    out = []
    for b, e in enumerate(sweep.energies):
        d = e - sweep.locus
        for i in range(len(d) - 1):
            if np.isfinite(d[i]) and np.isfinite(d[i + 1]) and d[i] * d[i + 1] < 0:
                w = d[i] / (d[i] - d[i + 1])
                bb = sweep.b_grid[i] + w * (sweep.b_grid[i + 1] - sweep.b_grid[i])
                ee = e[i] + w * (e[i + 1] - e[i])
                out.append((b, float(bb), float(ee)))
    return out


def rb87_trap(eta: float, omega_z_khz: float) -> TrapGeometry:
    """Trap for two 87Rb atoms; ``omega_z = 2 pi * omega_z_khz`` kHz."""
    mass = 86.909180527 * atomic_mass
    return TrapGeometry(eta, 2.0 * math.pi * 1e3 * omega_z_khz, 0.5 * mass)
