"""Substance state functions against closed forms and direct-sum oracles."""

import math

import numpy as np
import pytest

from qcycle.errors import ConvergenceError, DomainError
from qcycle.numerics import DEFAULT_POLICY, NumericsPolicy, derivative_centered
from qcycle.substances import (
    GibbsState,
    box,
    beta_for_force,
    cavity_mode,
    energy_level,
    entropy,
    entropy_closed,
    equilibrium_force,
    force,
    force_equilibrium_closed,
    free_energy,
    gibbs_state,
    harmonic,
    heat_capacity,
    internal_energy,
    internal_energy_closed,
    mean_occupation,
    partition_function,
    regime_parameter,
    spin_half,
    vacuum_force,
)

ALL_1D = (box(1), cavity_mode(), harmonic(1), spin_half())


def box_direct(beta, L, n_terms, mass=1.0):
    """Brute-force canonical sums for the 1D box: (Z, U, S)."""
    n = np.arange(1, n_terms + 1, dtype=float)
    e = np.pi**2 * n * n / (2.0 * mass * L * L)
    w = np.exp(-beta * (e - e[0]))
    z_shift = float(w.sum())
    p = w / z_shift
    u = float((p * e).sum())
    s = math.log(z_shift) - beta * e[0] + beta * u
    return z_shift * math.exp(-beta * e[0]), u, s


class TestSpectrum:
    def test_box1d_level(self):
        assert energy_level(box(1), 1, math.pi) == pytest.approx(0.5, rel=1e-15)

    def test_cavity_level(self):
        assert energy_level(cavity_mode(), 0, 2.0) == pytest.approx(0.25, rel=1e-15)

    def test_spin_levels(self):
        assert energy_level(spin_half(), 0, 1.0) == -0.5
        assert energy_level(spin_half(), 1, 1.0) == 0.5

    def test_invalid_indices(self):
        with pytest.raises(ValueError):
            energy_level(box(1), 0, 1.0)
        with pytest.raises(ValueError):
            energy_level(spin_half(), 2, 1.0)
        with pytest.raises(ValueError):
            energy_level(cavity_mode(), -1, 1.0)

    def test_nonpositive_coordinate(self):
        with pytest.raises(ValueError):
            energy_level(box(1), 1, 0.0)

    def test_box2d_flattened_enumeration(self):
        # sums of two squares over n_i >= 1, sorted with multiplicity
        unit = math.pi**2 / 2.0
        values = box(2).level_energies(1.0, 11) / unit
        assert values == pytest.approx([2, 5, 5, 8, 10, 10, 13, 13, 17, 17, 18])

    def test_box3d_ground(self):
        assert box(3).ground_energy(1.0) == pytest.approx(3.0 * math.pi**2 / 2.0)

    def test_harmonic_shell_degeneracy(self):
        # 2D shells have degeneracy N+1, 3D shells (N+1)(N+2)/2
        two = harmonic(2).level_energies(1.0, 6)
        assert two == pytest.approx([1.0, 2.0, 2.0, 3.0, 3.0, 3.0])
        three = harmonic(3).level_energies(1.0, 10)
        assert three == pytest.approx([1.5] + [2.5] * 3 + [3.5] * 6)

    def test_gamma_table(self):
        expected = {
            "box1d": 3.0,
            "box2d": 2.0,
            "box3d": 5.0 / 3.0,
            "harmonic1d": 2.0,
            "harmonic2d": 1.5,
            "harmonic3d": 4.0 / 3.0,
            "cavity": 2.0,
            "spin_half": 2.0,
        }
        models = [box(1), box(2), box(3), harmonic(1), harmonic(2), harmonic(3),
                  cavity_mode(), spin_half()]
        for model in models:
            assert model.gamma == pytest.approx(expected[model.kind], rel=1e-15)

    def test_model_validation(self):
        with pytest.raises(ValueError):
            box(4)
        with pytest.raises(ValueError):
            box(1, mass=-1.0)
        with pytest.raises(ValueError):
            harmonic(1, mode_constant=0.0)


class TestPartitionFunction:
    def test_cavity_closed_geometric(self):
        z, _, bound = partition_function(cavity_mode(), math.log(2.0), 1.0)
        assert z == pytest.approx(math.sqrt(2.0), rel=1e-14)
        assert bound <= DEFAULT_POLICY.series_tol

    def test_spin_high_temperature_limit(self):
        z, used, _ = partition_function(spin_half(), 1e-9, 1.0)
        assert z == pytest.approx(2.0, rel=1e-9)
        assert used == 2

    def test_box_against_direct_sum_oracle(self):
        z, _, _ = partition_function(box(1), 1.0, 1.0)
        oracle, _, _ = box_direct(1.0, 1.0, 10_000)
        assert abs(z - oracle) <= 1e-12 * oracle

    def test_box_theta_duality_identity(self):
        # Z = (1/2) sqrt(pi/c) theta_dual - 1/2 with the dual-series factor
        # theta_dual = 1 + 2 sum_k exp(-pi^2 k^2 / c); the bare classical
        # form (theta_dual -> 1) holds only as c -> 0.
        z, _, _ = partition_function(box(1), 1.0, 1.0)
        c = math.pi**2 / 2.0
        dual = 1.0 + 2.0 * sum(math.exp(-math.pi**2 * k * k / c) for k in range(1, 6))
        closed = 0.5 * math.sqrt(math.pi / c) * dual - 0.5
        assert abs(z - closed) <= 1e-12

    def test_separable_product_box2d(self):
        z2, _, _ = partition_function(box(2), 0.7, 1.3)
        z1, _, _ = partition_function(box(1), 0.7, 1.3)
        assert z2 == pytest.approx(z1 * z1, rel=1e-11)

    def test_separable_product_harmonic3d(self):
        z3, _, _ = partition_function(harmonic(3), 0.9, 1.1)
        z1, _, _ = partition_function(harmonic(1), 0.9, 1.1)
        assert z3 == pytest.approx(z1**3, rel=1e-11)

    def test_level_cap_error(self):
        policy = NumericsPolicy(level_cap=50)
        with pytest.raises(ConvergenceError):
            partition_function(cavity_mode(), 1e-4, 1.0, policy)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            partition_function(box(1), -1.0, 1.0)
        with pytest.raises(ValueError):
            partition_function(box(1), 1.0, 0.0)


class TestGibbsState:
    def test_cavity_geometric_probabilities(self):
        state = gibbs_state(cavity_mode(), math.log(2.0), 1.0)
        expected = 0.5 ** (np.arange(8) + 1)
        assert state.probabilities[:8] == pytest.approx(expected, rel=1e-13)

    def test_spin_ground_state_projection(self):
        state = gibbs_state(spin_half(), 200.0, 1.0)
        assert state.probabilities[0] == pytest.approx(1.0, abs=1e-80)
        assert state.probabilities[1] < 1e-80

    def test_normalization_contract(self):
        for model in ALL_1D + (box(2), harmonic(3)):
            state = gibbs_state(model, 0.9, 1.2)
            total = float(state.probabilities.sum())
            slack = 1e-14  # float rounding of the normalized sum
            assert 1.0 - state.truncation_error_bound - slack <= total <= 1.0 + slack

    def test_boltzmann_ordering(self):
        for model in ALL_1D + (box(2), harmonic(2)):
            state = gibbs_state(model, 1.1, 0.9)
            p = state.probabilities
            assert np.all(np.diff(p) <= 1e-18)

    def test_probabilities_read_only(self):
        state = gibbs_state(cavity_mode(), 1.0, 1.0)
        with pytest.raises(ValueError):
            state.probabilities[0] = 0.3

    def test_log_partition_stable_at_extreme_beta(self):
        state = gibbs_state(spin_half(), 4000.0, 1.0)
        assert state.log_partition == pytest.approx(2000.0, rel=1e-12)
        assert math.isinf(state.partition_value)  # documented overflow


class TestForce:
    def test_cavity_radiation_force(self):
        model = cavity_mode()
        state = gibbs_state(model, math.log(2.0), 1.0)
        assert force(state, model) == pytest.approx(1.5, rel=1e-11)

    def test_spin_ground_state_force(self):
        model = spin_half()
        state = gibbs_state(model, 500.0, 1.0)
        assert force(state, model) == pytest.approx(-0.5, rel=1e-13)

    def test_box_classical_equation_of_state(self):
        model = box(1)
        e1 = model.ground_energy(1.0)
        beta = 1e-6 / e1  # beta E_1 = 1e-6
        # independent oracle: heavily truncated direct sum
        n = np.arange(1.0, 100_001.0)
        w = np.exp(-1e-6 * (n * n - 1.0))
        u_oracle = e1 * float((w * n * n).sum() / w.sum())
        f_oracle = 2.0 * u_oracle / 1.0
        got = equilibrium_force(model, beta, 1.0)
        assert got == pytest.approx(f_oracle, rel=1e-10)
        assert abs(got * 1.0 * beta - 1.0) <= 2e-3

    def test_non_equilibrium_vector(self):
        # inverted two-level population: force follows the occupation, not beta
        model = spin_half()
        state = GibbsState(
            beta=1.0,
            length=2.0,
            probabilities=np.array([0.25, 0.75]),
            partition_value=1.0,
            log_partition=0.0,
            truncation_error_bound=0.0,
        )
        # E = (-1/4, +1/4), dE/dL = (1/8, -1/8); F = -(0.25/8 - 0.75/8)
        assert force(state, model) == pytest.approx(0.0625, rel=1e-15)

    def test_closed_forms(self):
        assert force_equilibrium_closed(box(1), 0.5, 2.0) == pytest.approx(1.0)
        assert force_equilibrium_closed(cavity_mode(), math.log(3.0), 1.0) == (
            pytest.approx(1.0, rel=1e-14)
        )
        # beta -> infinity leaves only the vacuum term kappa / (2 L^2)
        assert force_equilibrium_closed(cavity_mode(), 500.0, 2.0) == pytest.approx(
            1.0 / 8.0, rel=1e-13
        )
        with pytest.raises(ValueError):
            force_equilibrium_closed(box(2), 1.0, 1.0)

    def test_cavity_summed_matches_closed_to_1e12(self):
        tight = NumericsPolicy(series_tol=1e-15)
        for beta in (0.4, 1.0, 2.7):
            for L in (0.7, 1.9):
                summed = equilibrium_force(cavity_mode(), beta, L, tight)
                closed = force_equilibrium_closed(cavity_mode(), beta, L)
                assert summed == pytest.approx(closed, rel=1e-12)

    def test_force_equals_free_energy_gradient(self):
        for model in ALL_1D + (box(2),):
            for beta, L in ((0.6, 1.0), (1.4, 2.2)):
                summed = equilibrium_force(model, beta, L)
                grad = -derivative_centered(
                    lambda x: free_energy(model, beta, x), L
                )
                assert summed == pytest.approx(grad, rel=1e-6)


class TestEquationOfStateLimit:
    def test_classical_convergence_grid(self):
        model = box(1)
        e1 = model.ground_energy(1.0)
        deviations = []
        for c in (1e-4, 1e-6, 1e-8):
            beta = c / e1
            f = equilibrium_force(model, beta, 1.0)
            dev = abs(f * beta - 1.0)
            assert dev <= 3.0 * math.sqrt(c / math.pi)
            deviations.append(dev)
        assert deviations[0] > deviations[1] > deviations[2]


class TestInternalEnergy:
    def test_cavity_mean_photon_form(self):
        model = cavity_mode()
        state = gibbs_state(model, math.log(2.0), 1.0)
        assert internal_energy(state, model) == pytest.approx(1.5, rel=1e-11)

    def test_box_equipartition_limit(self):
        model = box(1)
        beta = 1e-6 / model.ground_energy(1.0)
        state = gibbs_state(model, beta, 1.0)
        assert abs(internal_energy(state, model) * 2.0 * beta - 1.0) <= 2e-3

    def test_spin_ground_energy(self):
        model = spin_half()
        state = gibbs_state(model, 300.0, 1.0)
        assert internal_energy(state, model) == pytest.approx(-0.5, rel=1e-13)

    def test_closed_forms(self):
        assert internal_energy_closed(box(1), 2.5, 7.0) == pytest.approx(0.2)
        assert internal_energy_closed(cavity_mode(), math.log(2.0), 1.0) == (
            pytest.approx(1.5)
        )
        assert internal_energy_closed(spin_half(), 300.0, 1.0) == pytest.approx(
            -0.5, rel=1e-13
        )
        with pytest.raises(ValueError):
            internal_energy_closed(harmonic(2), 1.0, 1.0)


class TestEntropy:
    def test_pure_state_zero(self):
        state = gibbs_state(spin_half(), 2000.0, 1.0)
        assert entropy(state) == pytest.approx(0.0, abs=1e-15)

    def test_cavity_closed_form(self):
        model = cavity_mode()
        state = gibbs_state(model, math.log(2.0), 1.0)
        s = entropy(state)
        assert s == pytest.approx(2.0 * math.log(2.0), rel=1e-10)
        assert s == pytest.approx(entropy_closed(model, math.log(2.0), 1.0), rel=1e-10)

    def test_identity_with_partition_and_energy(self):
        for model in ALL_1D + (harmonic(3),):
            state = gibbs_state(model, 0.8, 1.3)
            identity = state.log_partition + 0.8 * internal_energy(state, model)
            assert entropy(state) == pytest.approx(identity, rel=1e-10)

    def test_box_classical_reference_converges(self):
        # S from Eq-of-state-consistent sums approaches the classical form
        # 1/2 + ln((1/2) sqrt(2 m L^2 / (pi beta))) as beta E_1 -> 0
        model = box(1)
        previous = math.inf
        for L in (math.sqrt(2.0 * math.pi) * 10.0**k for k in (1, 2, 3)):
            state = gibbs_state(model, 1.0, L)
            closed = entropy_closed(model, 1.0, L)
            dev = abs(entropy(state) - closed)
            c = regime_parameter(model, 1.0, L)
            assert dev <= 2.0 * math.sqrt(c / math.pi)
            assert dev < previous
            previous = dev

    def test_closed_form_at_reference_point(self):
        # at L = sqrt(2 pi), beta = 1 the classical formula gives exactly 1/2
        assert entropy_closed(box(1), 1.0, math.sqrt(2.0 * math.pi)) == (
            pytest.approx(0.5, rel=1e-14)
        )


class TestFreeEnergy:
    def test_spin_closed_form(self):
        for beta, L in ((0.5, 1.0), (2.0, 0.7)):
            closed = -math.log(2.0 * math.cosh(0.5 * beta / L)) / beta
            assert free_energy(spin_half(), beta, L) == pytest.approx(closed, rel=1e-13)

    def test_cavity_value(self):
        assert free_energy(cavity_mode(), math.log(2.0), 1.0) == pytest.approx(
            -0.5, rel=1e-13
        )

    def test_ground_state_limit(self):
        assert free_energy(box(1), 500.0, 1.0) == pytest.approx(
            box(1).ground_energy(1.0), rel=1e-12
        )


class TestMeanOccupation:
    def test_unit_occupation(self):
        assert mean_occupation(cavity_mode(), math.log(2.0), 1.0) == pytest.approx(1.0)

    def test_zero_temperature(self):
        assert mean_occupation(cavity_mode(), 200.0, 1.0) < 1e-80

    def test_algebraic_inversion(self):
        beta = math.log(1.0 + 1.0 / 4.0)
        assert mean_occupation(cavity_mode(), beta, 1.0) == pytest.approx(4.0, rel=1e-12)

    def test_wrong_kind(self):
        with pytest.raises(ValueError):
            mean_occupation(harmonic(1), 1.0, 1.0)


class TestHeatCapacity:
    def test_box_classical_constant_coordinate(self):
        model = box(1)
        beta = 1e-6 / model.ground_energy(1.0)
        cv = heat_capacity(model, beta, 1.0, "coordinate")
        assert abs(cv - 0.5) <= 1e-3

    def test_box_classical_ratio(self):
        model = box(1)
        beta = 1e-6 / model.ground_energy(1.0)
        cp = heat_capacity(model, beta, 1.0, "force")
        cv = heat_capacity(model, beta, 1.0, "coordinate")
        assert abs(cp / cv - 3.0) <= 1e-2

    def test_cavity_high_temperature_ratio(self):
        # beta omega ~ 0.05: quantum corrections to C_P/C_V = 2 are O((b w)^2)
        model = cavity_mode()
        beta = beta_for_force(model, 20.0, 1.0)
        cp = heat_capacity(model, beta, 1.0, "force")
        cv = heat_capacity(model, beta, 1.0, "coordinate")
        assert abs(cp / cv - 2.0) <= 1e-2

    def test_invalid_mode(self):
        with pytest.raises(ValueError):
            heat_capacity(box(1), 1.0, 1.0, "volume")


class TestMonotonicity:
    def test_z_and_u_increase_with_temperature(self):
        # positive-spectrum kinds only; the spin's Z decreases with T
        for model in (box(1), box(2), harmonic(1), harmonic(3), cavity_mode()):
            z_prev, u_prev = -math.inf, -math.inf
            for T in np.linspace(0.5, 3.0, 6):
                beta = 1.0 / float(T)
                z, _, _ = partition_function(model, beta, 1.2)
                u = internal_energy(gibbs_state(model, beta, 1.2), model)
                assert z > z_prev
                assert u >= u_prev
                z_prev, u_prev = z, u

    def test_spin_z_decreases_with_temperature(self):
        z_cold, _, _ = partition_function(spin_half(), 4.0, 1.0)
        z_hot, _, _ = partition_function(spin_half(), 1.0, 1.0)
        assert z_hot < z_cold


class TestBetaForForce:
    def test_cavity_closed_inversion(self):
        assert beta_for_force(cavity_mode(), 1.0, 1.0) == pytest.approx(
            math.log(3.0), rel=1e-14
        )

    def test_cavity_vacuum_boundary(self):
        with pytest.raises(DomainError):
            beta_for_force(cavity_mode(), 0.5, 1.0)  # 2 F L^2 = kappa exactly

    def test_box_vacuum_floor(self):
        model = box(1)
        assert vacuum_force(model, 1.0) == pytest.approx(math.pi**2, rel=1e-15)
        with pytest.raises(DomainError):
            beta_for_force(model, math.pi**2, 1.0)

    def test_box_residual_and_classical_limit(self):
        model = box(1)
        f0, L = 10.0, 100.0
        beta = beta_for_force(model, f0, L)
        realized = equilibrium_force(model, beta, L)
        assert abs(realized - f0) <= 1e-10 * f0
        # classical inversion beta = 1/(F L) is approached from above
        c = regime_parameter(model, beta, L)
        assert abs(beta * f0 * L - 1.0) <= 2.0 * math.sqrt(c / math.pi)

    def test_box_quantum_regime_residual(self):
        model = box(1)
        beta = beta_for_force(model, 30.0, 1.0)  # above the pi^2 floor
        assert abs(equilibrium_force(model, beta, 1.0) - 30.0) <= 1e-10 * 30.0

    def test_spin_negative_force_round_trip(self):
        model = spin_half()
        target = -0.2
        beta = beta_for_force(model, target, 1.0)
        assert equilibrium_force(model, beta, 1.0) == pytest.approx(target, rel=1e-12)

    def test_spin_positive_force_unreachable(self):
        with pytest.raises(DomainError):
            beta_for_force(spin_half(), 0.1, 1.0)

    def test_box2d_generic_root_solve(self):
        model = box(2)
        target = vacuum_force(model, 1.0) * 3.0
        beta = beta_for_force(model, target, 1.0)
        assert abs(equilibrium_force(model, beta, 1.0) - target) <= 1e-10 * target
