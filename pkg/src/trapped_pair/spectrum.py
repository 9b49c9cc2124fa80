"""Eigenenergies of the interacting pair.

The condition ``-sqrt(pi) inv_a = F(-E/2)`` is solved branch by branch. The
poles of ``F`` sit at ``E = 2(n*eta + j)``. Between two consecutive distinct
poles ``F(-E/2)`` rises monotonically from ``-inf`` to ``+inf``, so every
branch holds exactly one root. Branch 0 lies below the lowest pole ``E = 0``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import DomainError, NoRootError, PoleError, ShiftedEnergy, TrapGeometry
from .fcal import f_value
from .specfun import SQRT_PI

_XTOL = 2e-14
_MAX_ITER = 200


@dataclass(frozen=True)
class EigenBranch:
    """A solved eigenvalue on one branch.

    Attributes
    ----------
    index : int
        Branch number, 0 being the bound-state branch.
    bracket : tuple of float
        Neighbouring poles in the ``x = -E/2`` coordinate, ``(pole_below,
        pole_above)``; branch 0 has ``pole_below = +inf``.
    energy : ShiftedEnergy
    residual : float
        ``|F(-E/2) + sqrt(pi) inv_a| / max(1, |F|)``.
    """

    index: int
    bracket: tuple[float, float]
    energy: ShiftedEnergy
    residual: float


@dataclass
class SpectrumSweep:
    """Branch energies on a grid of ``1/a``; failed points are NaN."""

    inv_a_grid: np.ndarray
    branches: list[np.ndarray]
    eta: float
    residuals: list[np.ndarray] = field(default_factory=list)

    @property
    def e_zero(self) -> float:
        return 0.5 + self.eta


def pole_lattice(eta: float, count: int, rel_tol: float = 1e-12) -> list[tuple[float, int]]:
    """The first ``count`` distinct poles ``E = 2(n*eta + j)`` with multiplicities.

    Poles closer than ``rel_tol`` (relative) are merged, which matters for
    commensurate anisotropies where ``n*eta + j`` values coincide.
    """
    if count < 1:
        return []
    top = 2.0 * (count - 1) * min(1.0, eta) * (1 + 1e-9) + 1e-12
    values = []
    for n in range(int(top / (2 * eta)) + 1):
        for j in range(int((top - 2 * n * eta) / 2) + 1):
            values.append(2.0 * (n * eta + j))
    values.sort()
    merged: list[list] = []
    for v in values:
        if merged and abs(v - merged[-1][0]) <= rel_tol * max(1.0, abs(v)):
            merged[-1][1] += 1
        else:
            merged.append([v, 1])
    return [(v, m) for v, m in merged[:count]]


def branch_bracket(branch: int, eta: float) -> tuple[float, float]:
    """Energy interval ``(E_low, E_high)`` between the poles that bound ``branch``."""
    if branch < 0:
        raise DomainError("branch index must be nonnegative")
    poles = pole_lattice(eta, branch + 1)
    hi = poles[branch][0]
    lo = -math.inf if branch == 0 else poles[branch - 1][0]
    return lo, hi


def _find_side(g: Callable[[float], float], pole: float, other: float, want_negative: bool,
               start: float) -> Optional[float]:
    # walk from ``pole`` towards ``other`` with geometrically shrinking offsets
    # until g has the wanted sign; None when the root hugs the pole
    direction = 1.0 if other > pole else -1.0
    delta = start
    floor = 4e-16 * max(1.0, abs(pole))
    while delta > floor:
        e = pole + direction * delta
        try:
            val = g(e)
        except PoleError:
            val = math.nan
        if (val < 0) if want_negative else (val > 0):
            return e
        delta *= 0.125
    return None


def solve_bracketed(g: Callable[[float], float], lo_pole: float, hi_pole: float,
                    guess: Optional[float] = None) -> float:
    """Root of an increasing function on ``(lo_pole, hi_pole)`` that runs from -inf to +inf.

    ``lo_pole`` may be ``-inf``. A guess, when inside the interval, is used
    to search a narrow bracket first.
    """
    if guess is not None and lo_pole < guess < hi_pole:
        width = 1e-3 * (hi_pole - lo_pole if math.isfinite(lo_pole) else 1.0)
        for _ in range(12):
            a = guess - width
            if math.isfinite(lo_pole):
                a = max(a, 0.5 * (guess + lo_pole))
            b = min(guess + width, 0.5 * (guess + hi_pole))
            try:
                ga, gb = g(a), g(b)
            except PoleError:
                break
            if ga < 0 < gb:
                return brentq(g, a, b, xtol=_XTOL, rtol=4 * np.finfo(float).eps, maxiter=_MAX_ITER)
            if ga == 0:
                return a
            if gb == 0:
                return b
            width *= 8.0
    gap = hi_pole - lo_pole if math.isfinite(lo_pole) else 1.0
    hi = _find_side(g, hi_pole, lo_pole if math.isfinite(lo_pole) else hi_pole - 1.0,
                    want_negative=False, start=0.25 * gap)
    if math.isfinite(lo_pole):
        lo = _find_side(g, lo_pole, hi_pole, want_negative=True, start=0.25 * gap)
        if lo is None:
            return lo_pole
    else:
        lo = hi_pole - 1.0
        while not g(lo) < 0:
            lo = hi_pole - 2.0 * (hi_pole - lo)
            if lo < -1e300:
                raise NoRootError("no sign change found below the lowest pole")
    if hi is None:
        return hi_pole
    if not lo < hi:
        raise NoRootError("inconsistent bracket")
    return brentq(g, lo, hi, xtol=_XTOL, rtol=4 * np.finfo(float).eps, maxiter=_MAX_ITER)


def eigen_residual(e: float, inv_a: float, eta: float) -> float:
    """Scaled residual ``|F(-E/2) + sqrt(pi) inv_a| / max(1, |F|)``."""
    try:
        fv = f_value(-0.5 * e, eta)
    except PoleError:
        return 0.0
    return abs(fv + SQRT_PI * inv_a) / max(1.0, abs(fv))


def solve_eigenbranch(inv_a: float, branch: int, trap: TrapGeometry,
                      guess: Optional[float] = None) -> EigenBranch:
    """Solve one branch and return the full record.

    ``inv_a = +-inf`` (``a = 0``) is handled symbolically: the energies sit
    on the poles, and the bound branch does not exist for ``a -> 0+``.
    """
    eta = trap.eta
    lo, hi = branch_bracket(branch, eta)
    bracket_x = (-0.5 * lo, -0.5 * hi)
    if math.isinf(inv_a):
        if inv_a > 0:
            if branch == 0:
                raise NoRootError("a -> 0+ pushes the bound state to -inf")
            e = lo
        else:
            e = hi
        return EigenBranch(branch, bracket_x, ShiftedEnergy.of(e, trap), 0.0)
    if math.isnan(inv_a):
        raise DomainError("inv_a is NaN")
    target = SQRT_PI * inv_a

    def g(e):
        return f_value(-0.5 * e, eta) + target

    e = solve_bracketed(g, lo, hi, guess)
    return EigenBranch(branch, bracket_x, ShiftedEnergy.of(e, trap), eigen_residual(e, inv_a, eta))


def solve_branch(inv_a: float, branch: int, trap: TrapGeometry, tol: float = 1e-12) -> ShiftedEnergy:
    """Shifted energy of ``branch`` at inverse scattering length ``inv_a``.

    Parameters
    ----------
    inv_a : float
        ``d/a``; ``0`` is the unitarity point, ``+-inf`` means ``a = 0+-``.
    branch : int
        0 for the lowest branch, then one per interval between poles.
    trap : TrapGeometry
    tol : float
        Kept for interface symmetry; brackets are always closed to ~2e-14.

    Returns
    -------
    ShiftedEnergy
    """
    return solve_eigenbranch(inv_a, branch, trap).energy


def _sweep_one_branch(args) -> tuple[np.ndarray, np.ndarray]:
    grid, branch, eta = args
    trap = TrapGeometry(eta)
    energies = np.full(len(grid), np.nan)
    res = np.full(len(grid), np.nan)
    guess = None
    for i, ia in enumerate(grid):
        try:
            sol = solve_eigenbranch(float(ia), branch, trap, guess)
        except (NoRootError, DomainError, ArithmeticError, RuntimeError, ValueError):
            guess = None
            continue
        energies[i] = sol.energy.value
        res[i] = sol.residual
        guess = sol.energy.value if math.isfinite(sol.energy.value) else None
    return energies, res


def worker_count(n_tasks: int) -> int:
    """Parallelism from ``TRAPPED_PAIR_THREADS`` (unset or 0 means all cores)."""
    raw = os.environ.get("TRAPPED_PAIR_THREADS", "0").strip() or "0"
    try:
        want = int(raw)
    except ValueError:
        want = 1
    if want <= 0:
        want = os.cpu_count() or 1
    return max(1, min(want, n_tasks))


def sweep_spectrum(inv_a_grid: Sequence[float], n_branches: int, trap: TrapGeometry,
                   workers: Optional[int] = None) -> SpectrumSweep:
    """Energies of the lowest ``n_branches`` branches over a grid of ``1/a``.

    Points within a branch are solved in grid order, each seeded with its
    neighbour. Branches are independent and may run in parallel processes.
    Points that fail are left as NaN.
    """
    grid = np.asarray(list(inv_a_grid), dtype=float)
    if grid.size and np.any(np.diff(grid) < 0):
        raise DomainError("inv_a grid must be sorted")
    tasks = [(grid, b, trap.eta) for b in range(n_branches)]
    workers = worker_count(len(tasks)) if workers is None else max(1, workers)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_sweep_one_branch, tasks))
    else:
        out = [_sweep_one_branch(t) for t in tasks]
    return SpectrumSweep(grid, [o[0] for o in out], trap.eta, [o[1] for o in out])


@dataclass(frozen=True)
class UnperturbedState:
    """Oscillator eigenstate that the contact interaction leaves untouched.

    Attributes
    ----------
    n, m, k : int
        Radial, azimuthal and axial quantum numbers.
    energy : float
        Total energy ``eta (2n + |m| + 1) + k + 1/2`` in units of ``hbar omega_z``.
    multiplicity : int
        Number of unperturbed states at the same energy.
    kind : str
        ``"m!=0"``, ``"odd-k"`` or ``"s-remnant"``. An ``s-remnant`` stands for
        one of the ``N - 1`` combinations of an ``N``-fold degenerate set of
        ``m = 0``, even-``k`` states that are orthogonal to the interacting
        one. Only their count is meaningful, not the label.
    """

    n: int
    m: int
    k: int
    energy: float
    multiplicity: int
    kind: str


def unperturbed_states(e_max: float, trap: TrapGeometry) -> list[UnperturbedState]:
    """All non-interacting states with total energy at most ``e_max``."""
    eta = trap.eta
    raw: list[tuple[int, int, int, float, str]] = []
    s_groups: dict[float, list[tuple[int, int]]] = {}
    n_max = max(0, int((e_max - 0.5 - eta) / (2 * eta)) + 1)
    for n in range(n_max + 1):
        m_top = int((e_max - 0.5) / eta - 2 * n - 1) + 1 if eta > 0 else 0
        for m in range(-max(m_top, 0), max(m_top, 0) + 1):
            base = eta * (2 * n + abs(m) + 1) + 0.5
            k = 0
            while base + k <= e_max + 1e-12:
                e = base + k
                if m != 0:
                    raw.append((n, m, k, e, "m!=0"))
                elif k % 2:
                    raw.append((n, m, k, e, "odd-k"))
                else:
                    s_groups.setdefault(round(e, 9), []).append((n, k))
                k += 1
    for e_key, members in s_groups.items():
        if len(members) > 1:
            members.sort()
            for n, k in members[1:]:
                raw.append((n, 0, k, eta * (2 * n + 1) + 0.5 + k, "s-remnant"))
    counts: dict[float, int] = {}
    for r in raw:
        counts[round(r[3], 9)] = counts.get(round(r[3], 9), 0) + 1
    raw.sort(key=lambda r: (r[3], r[0], r[1], r[2]))
    return [UnperturbedState(n, m, k, e, counts[round(e, 9)], kind) for n, m, k, e, kind in raw]
