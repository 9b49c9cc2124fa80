"""Two ultracold atoms with a contact interaction in an axially symmetric harmonic trap.

Lengths are in units of the axial oscillator length ``d``, energies in
``hbar omega_z``, and ``eta = omega_perp / omega_z`` sets the anisotropy.
"""

__version__ = "0.1.0"

from .core import (Axis, ConvergenceError, DomainError, NoRootError, PoleError, ScatteringLength,
                   ShiftedEnergy, SpectralFunctionResult, Strategy, TrapGeometry, TrappedPairError,
                   UnitError, oscillator_length, to_physical)
from .fcal import FContext, auto_strategy, f_eval, f_value, phi_eval
from .spectrum import (EigenBranch, SpectrumSweep, UnperturbedState, pole_lattice, solve_branch,
                       solve_eigenbranch, sweep_spectrum, unperturbed_states)
from .lowdim import (a1d_energy_dependent, a1d_static, a2d_energy_dependent, a2d_static,
                     bound_state_q1d, bound_state_q2d, compare_lowdim, solve_1d, solve_2d,
                     solve_quasi1d, solve_quasi2d)
from .wavefun import (EigenState, Normalization, Representation, WavefunctionEval, norm_axial,
                      norm_radial, psi, psi_axial_series, psi_bound_integral, psi_q1d_bound,
                      psi_q1d_excited, psi_q2d_bound, psi_q2d_excited, psi_radial_series)
from .feshbach import (FeshbachParams, FeshbachSweep, a_eff_of_e, a_eff_static,
                       divergence_energy, feshbach_roots, locus_crossings,
                       solve_feshbach_spectrum, sweep_feshbach)

__all__ = [name for name in dir() if not name.startswith("_")]
