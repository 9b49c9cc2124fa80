"""Domain types, error classes and the dimensionless unit system.

Lengths are measured in the axial oscillator length ``d = sqrt(hbar/(mu*omega_z))``
and energies in ``hbar*omega_z``, where ``mu`` is the reduced mass of the pair.
The anisotropy ``eta = omega_perp/omega_z`` is the only geometric parameter that
survives in these units.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from scipy import constants as _const

HBAR = _const.hbar
ATOMIC_MASS = _const.physical_constants["atomic mass constant"][0]


class TrappedPairError(Exception):
    """Base class for every error raised by this package."""


class UnitError(TrappedPairError):
    """A physical-unit conversion was requested without the needed constants."""


class DomainError(TrappedPairError, ValueError):
    """Argument outside the domain of a function."""


class PoleError(DomainError):
    """Argument sits on (or numerically at) a pole.

    Parameters
    ----------
    message : str
        Human readable description.
    location : float, optional
        Position of the offending pole in the caller's coordinate.
    """

    def __init__(self, message: str, location: float | None = None):
        super().__init__(message)
        self.location = location


class ConvergenceError(TrappedPairError, ArithmeticError):
    """An iterative or series evaluation failed to converge.

    The best available estimate is kept in ``partial`` so that callers can
    decide whether it is good enough.
    """

    def __init__(self, message: str, partial: float | None = None, abs_err: float | None = None):
        super().__init__(message)
        self.partial = partial
        self.abs_err = abs_err


class NoRootError(TrappedPairError):
    """A bracketed eigenvalue search found no root on the requested branch."""


class Axis(enum.Enum):
    AXIAL = "axial"
    TRANSVERSE = "transverse"


class Strategy(enum.Enum):
    """Representation used to evaluate the spectral function ``F``."""

    INTEGRAL = "Integral"
    SERIES = "Series"
    CLOSED_CIGAR = "ClosedCigar"
    CLOSED_PANCAKE = "ClosedPancake"
    QUASI_1D = "Quasi1D"
    QUASI_2D = "Quasi2D"
    RECURRENCE = "Recurrence"


@dataclass(frozen=True)
class TrapGeometry:
    """Axially symmetric harmonic trap.

    Parameters
    ----------
    eta : float
        Anisotropy ``omega_perp / omega_z``.
    omega_z : float, optional
        Axial angular frequency in rad/s. Only needed for physical output.
    reduced_mass : float, optional
        Reduced mass of the pair in kg. Only needed for physical lengths.
    """

    eta: float
    omega_z: Optional[float] = None
    reduced_mass: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise DomainError(f"eta must be positive and finite, got {self.eta!r}")
        for name in ("omega_z", "reduced_mass"):
            val = getattr(self, name)
            if val is not None and not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be positive, got {val!r}")

    @property
    def e_zero(self) -> float:
        """Zero-point energy of the relative motion, ``1/2 + eta``."""
        return 0.5 + self.eta

    @property
    def has_physical_units(self) -> bool:
        return self.omega_z is not None and self.reduced_mass is not None


@dataclass(frozen=True)
class ShiftedEnergy:
    """Energy measured from the zero-point energy, in units of ``hbar*omega_z``.

    Parameters
    ----------
    value : float
        Shifted energy ``E - E0``.
    e_zero : float
        Zero-point energy ``E0 = 1/2 + eta``.
    """

    value: float
    e_zero: float

    def __post_init__(self):
        if not math.isfinite(self.value + self.e_zero):
            raise DomainError("total energy must be finite")

    @classmethod
    def from_total(cls, total: float, trap: TrapGeometry) -> "ShiftedEnergy":
        return cls(total - trap.e_zero, trap.e_zero)

    @classmethod
    def of(cls, value: float, trap: TrapGeometry) -> "ShiftedEnergy":
        return cls(float(value), trap.e_zero)

    @property
    def total(self) -> float:
        return self.value + self.e_zero

    @property
    def is_bound(self) -> bool:
        return self.value < 0

    @property
    def x(self) -> float:
        """Root coordinate ``x = -value/2`` used by the spectral function."""
        return -0.5 * self.value


@dataclass(frozen=True)
class ScatteringLength:
    """Scattering length stored through its inverse, in units of ``1/d``.

    The unitarity point ``a = +-inf`` maps to ``inverse_a = 0``.
    """

    inverse_a: float

    @classmethod
    def from_a(cls, a: float) -> "ScatteringLength":
        if a == 0:
            raise DomainError("a = 0 has no finite inverse; pass inverse_a=+-inf explicitly")
        return cls(1.0 / a)

    @property
    def a(self) -> float:
        return math.inf if self.inverse_a == 0 else 1.0 / self.inverse_a


@dataclass(frozen=True)
class SpectralFunctionResult:
    """Value of ``F(x)`` with the strategy that produced it."""

    value: float
    strategy: Strategy
    abs_err_estimate: float = 0.0
    detail: str = field(default="", compare=False)


def to_physical(energy: ShiftedEnergy, trap: TrapGeometry) -> float:
    """Total energy in joules.

    Parameters
    ----------
    energy : ShiftedEnergy
        Shifted energy in trap units.
    trap : TrapGeometry
        Must carry ``omega_z``.

    Returns
    -------
    float
        ``(value + e_zero) * hbar * omega_z``.
    """
    if trap.omega_z is None:
        raise UnitError("to_physical needs trap.omega_z")
    return (energy.value + energy.e_zero) * HBAR * trap.omega_z


def oscillator_length(trap: TrapGeometry, axis: Axis = Axis.AXIAL, physical: bool = False) -> float:
    """Harmonic oscillator length along ``axis``.

    In dimensionless mode the axial length is 1 and the transverse one is
    ``1/sqrt(eta)``. With ``physical=True`` the result is in meters.
    """
    scale = 1.0 if axis is Axis.AXIAL else 1.0 / math.sqrt(trap.eta)
    if not physical:
        return scale
    if not trap.has_physical_units:
        raise UnitError("physical lengths need both omega_z and reduced_mass")
    return scale * math.sqrt(HBAR / (trap.reduced_mass * trap.omega_z))
