import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from trapped_pair.core import DomainError, NoRootError, TrapGeometry
from trapped_pair.fcal import f_value
from trapped_pair.specfun import SQRT_PI
from trapped_pair.spectrum import (branch_bracket, eigen_residual, pole_lattice, solve_branch,
                                   solve_eigenbranch, sweep_spectrum, unperturbed_states)

# shifted energies from 30-digit mpmath root finding on the closed form
# -2 sqrt(pi) Gamma(x)/Gamma(x-1/2) (eta = 1) and on the quadrature oracle (eta = 2)
FROZEN = [
    (1.0, -1.0, [-0.60725595469104738, 1.2546415332793666, 3.2001958259755306]),
    (1.0, 0.3, [-1.1906481495121897, 0.91445696519669201, 2.936293463417931]),
    (1.0, 2.0, [-3.44235869898475, 0.50477558541185639, 2.6134251624150812]),
    (2.0, 0.5, [-2.0724126683128925, 1.1817021791559554, 2.6518382523065941]),
]


@pytest.mark.parametrize("eta, inv_a, energies", FROZEN)
def test_frozen_energies(eta, inv_a, energies):
    trap = TrapGeometry(eta)
    for b, ref in enumerate(energies):
        assert solve_branch(inv_a, b, trap).value == pytest.approx(ref, abs=1e-12)


def test_unitarity_sphere_levels():
    trap = TrapGeometry(1.0)
    got = [solve_branch(0.0, b, trap).value for b in range(4)]
    assert np.allclose(got, [-1.0, 1.0, 3.0, 5.0], atol=1e-12)


def test_pole_lattice_merges_degenerate_poles():
    assert pole_lattice(1.0, 4) == [(0.0, 1), (2.0, 2), (4.0, 3), (6.0, 4)]
    assert [p for p, _ in pole_lattice(1.1, 4)] == pytest.approx([0.0, 2.0, 2.2, 4.0])
    assert all(m == 1 for _, m in pole_lattice(1.1, 6))
    assert branch_bracket(0, 2.0) == (-math.inf, 0.0)
    with pytest.raises(DomainError):
        branch_bracket(-1, 2.0)


def test_oscillator_limit_small_a():
    trap = TrapGeometry(1.0)
    assert solve_branch(1e8, 1, trap).value == pytest.approx(0.0, abs=1e-6)
    assert solve_branch(-1e8, 1, trap).value == pytest.approx(2.0, abs=1e-6)


def test_symbolic_zero_a():
    trap = TrapGeometry(1.7)
    assert solve_branch(-math.inf, 2, trap).value == branch_bracket(2, 1.7)[1]
    assert solve_branch(math.inf, 2, trap).value == branch_bracket(2, 1.7)[0]
    with pytest.raises(NoRootError):
        solve_branch(math.inf, 0, trap)
    with pytest.raises(DomainError):
        solve_branch(math.nan, 0, trap)


def test_deep_bound_asymptote():
    # a = 0.01 d: E_total ~ -1/(2 a^2) in units of hbar omega_z
    trap = TrapGeometry(1.0)
    e = solve_branch(100.0, 0, trap)
    assert e.total == pytest.approx(-0.5 / 0.01 ** 2, rel=1e-2)


def test_fifth_level_spacing_at_eta5():
    trap = TrapGeometry(5.0)
    e = np.array([solve_branch(0.0, b, trap).value for b in range(12)])
    gaps = np.diff(e)[1:]
    # gaps 1..11 between excited levels: every fifth is the largest of its run
    assert np.argmax(gaps[:5]) == 4
    assert np.argmax(gaps[5:10]) == 4


def test_avoided_crossings_eta_1p1():
    # the doubly degenerate pole at E = 2 for eta = 1 splits into 2.0 and 2.2;
    # a narrow, nearly flat branch appears between them and the steep
    # neighbours are repelled from that window
    grid = np.linspace(-3.0, 3.0, 61)
    sw = sweep_spectrum(grid, 4, TrapGeometry(1.1), workers=1)
    narrow = sw.branches[2]
    assert np.all((narrow > 2.0) & (narrow < 2.2))
    assert np.max(np.abs(np.gradient(narrow, grid))) < 0.01
    for b in (1, 3):
        assert np.min(np.abs(np.gradient(sw.branches[b], grid))) > 0.05
        assert not np.any((sw.branches[b] > 2.0) & (sw.branches[b] < 2.2))
    # branch counts below E = 4.5 differ once the degeneracy is lifted
    below = [sum(p < 4.5 for p, _ in pole_lattice(eta, 10)) for eta in (1.0, 1.1)]
    assert below == [3, 6]


@given(st.floats(min_value=0.1, max_value=10.0), st.floats(min_value=-5.0, max_value=5.0),
       st.integers(min_value=0, max_value=6))
def test_residual_and_bracket(eta, inv_a, branch):
    lo, hi = branch_bracket(branch, eta)
    # F changes by ~1/gap^2 per unit energy, so in near-degenerate brackets a
    # root accurate to 1e-14 can still leave a large function residual
    assume(hi - lo > 2e-3)
    trap = TrapGeometry(eta)
    sol = solve_eigenbranch(inv_a, branch, trap)
    e = sol.energy.value
    assert lo < e < hi or e in (lo, hi)
    fv = f_value(-0.5 * e, eta)
    assert abs(fv + SQRT_PI * inv_a) < 1e-8 * max(1.0, abs(fv))
    assert sol.residual == pytest.approx(eigen_residual(e, inv_a, eta))


@given(st.floats(min_value=0.1, max_value=10.0), st.floats(min_value=-5.0, max_value=5.0),
       st.integers(min_value=0, max_value=5))
def test_energy_decreases_with_inverse_a(eta, inv_a, branch):
    trap = TrapGeometry(eta)
    assert solve_branch(inv_a + 0.01, branch, trap).value < solve_branch(inv_a, branch, trap).value


@given(st.floats(min_value=0.1, max_value=10.0), st.integers(min_value=1, max_value=6))
def test_interaction_shifts_sign(eta, branch):
    # weak repulsion sits just above the lower pole, weak attraction just below the upper one
    trap = TrapGeometry(eta)
    lo, hi = branch_bracket(branch, eta)
    up = solve_branch(1e6, branch, trap).value
    down = solve_branch(-1e6, branch, trap).value
    assert lo < up < lo + 0.1 * (hi - lo)
    assert hi - 0.1 * (hi - lo) < down < hi


@given(st.floats(min_value=0.2, max_value=5.0), st.integers(min_value=0, max_value=6))
def test_unitarity_is_continuous(eta, branch):
    trap = TrapGeometry(eta)
    a = solve_branch(1e-10, branch, trap).value
    b = solve_branch(-1e-10, branch, trap).value
    assert abs(a - b) < 1e-8


def test_sweep_matches_pointwise_and_records_gaps():
    grid = np.linspace(-2.0, 2.0, 21)
    trap = TrapGeometry(2.5)
    sw = sweep_spectrum(grid, 3, trap, workers=1)
    assert sw.e_zero == 3.0
    for b in range(3):
        for i in (0, 10, 20):
            assert sw.branches[b][i] == pytest.approx(solve_branch(grid[i], b, trap).value, abs=1e-12)
        assert np.all(np.diff(sw.branches[b]) < 0)
    with pytest.raises(DomainError):
        sweep_spectrum(grid[::-1], 2, trap)


def test_sweep_parallel_equals_serial():
    grid = np.linspace(-1.0, 1.0, 9)
    trap = TrapGeometry(3.3)
    a = sweep_spectrum(grid, 3, trap, workers=1)
    b = sweep_spectrum(grid, 3, trap, workers=2)
    for x, y in zip(a.branches, b.branches):
        assert np.array_equal(x, y)


def test_unperturbed_examples():
    s1 = unperturbed_states(4.0, TrapGeometry(1.0))
    keys = {(u.n, u.m, u.k) for u in s1}
    assert (0, 1, 0) in keys and (0, -1, 0) in keys
    assert (0, 0, 0) not in keys
    assert all(u.energy <= 4.0 for u in s1)
    s5 = unperturbed_states(8.0, TrapGeometry(5.0))
    assert [(u.n, u.m, u.k, u.energy) for u in s5] == [(0, 0, 1, 6.5)]
    s = [u for u in unperturbed_states(5.0, TrapGeometry(1.0)) if abs(u.energy - 4.5) < 1e-9]
    assert s and all(u.multiplicity >= 2 for u in s)


@given(st.sampled_from([0.5, 1.0, 2.0, 3.0]), st.floats(min_value=2.0, max_value=9.0))
def test_unperturbed_remnant_count(eta, e_max):
    # every m = 0 even-k multiplet of size N leaves N - 1 untouched states
    trap = TrapGeometry(eta)
    states = unperturbed_states(e_max, trap)
    levels = {}
    for n in range(20):
        for k in range(0, 20, 2):
            e = eta * (2 * n + 1) + k + 0.5
            if e <= e_max + 1e-12:
                levels[round(e, 9)] = levels.get(round(e, 9), 0) + 1
    remnants = sum(1 for u in states if u.kind == "s-remnant")
    assert remnants == sum(c - 1 for c in levels.values())
    for u in states:
        assert u.m != 0 or u.k % 2 == 1 or u.kind == "s-remnant"
