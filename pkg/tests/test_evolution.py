import numpy as np
import pytest

from app.cavity.services import (
    basis_state,
    build_excitation_number,
    build_hamiltonian,
    build_parity,
    build_qubit_excitation,
    make_initial_state,
)
from app.errors import ContractViolation, InvalidDimensionError, InvalidParameterError
from app.evolution.services import (
    coefficients,
    diagonalize,
    embed_state,
    expectation_series,
    propagate,
    propagate_many,
    propagator_for,
    truncation_check,
)
from app.models import InitialState, OperatorMatrix, StateVector, SubsystemParams
from tests.conftest import random_state, rk4_evolve


def _random_params(rng, model="rabi", n_fock=None):
    return SubsystemParams(
        cavity_freq=float(rng.uniform(0.5, 1.5)),
        qubit_freq=float(rng.uniform(0.5, 1.5)),
        coupling=float(rng.uniform(0.0, 0.4)),
        n_fock=int(n_fock or rng.integers(4, 11)),
        model=model,
    )


def test_eigendecomposition_reconstructs_hamiltonian(rng):
    for _ in range(10):
        p = _random_params(rng)
        h = build_hamiltonian(p).matrix
        prop = diagonalize(build_hamiltonian(p))
        v, lam = prop.eigenvectors, prop.eigenvalues
        rebuilt = v @ np.diag(lam) @ v.conj().T
        assert np.linalg.norm(rebuilt - h) / np.linalg.norm(h) <= 1e-10
        np.testing.assert_allclose(v.conj().T @ v, np.eye(p.dim), atol=1e-12)
        assert np.all(np.diff(lam) >= 0)


def test_diagonal_hamiltonian_skips_lapack():
    p = SubsystemParams(coupling=0.0, n_fock=4)
    prop = propagator_for(p)
    assert set(np.abs(prop.eigenvectors).ravel()) <= {0.0, 1.0}
    np.testing.assert_array_equal(prop.eigenvalues, np.sort(np.real(np.diag(build_hamiltonian(p).matrix))))


def test_non_hermitian_operator_rejected():
    with pytest.raises(ContractViolation):
        diagonalize(OperatorMatrix(np.array([[0, 1], [0, 0]], dtype=complex)))


def test_propagator_is_cached():
    p = SubsystemParams(coupling=0.3, n_fock=6)
    assert propagator_for(p) is propagator_for(SubsystemParams(coupling=0.3, n_fock=6))


def test_propagate_matches_rk4(rng):
    for _ in range(20):
        p = _random_params(rng, model=str(rng.choice(["rabi", "jc"])), n_fock=6)
        psi0 = StateVector(random_state(rng, p.dim), p.n_fock)
        t = float(rng.uniform(0.5, 2.0))
        exact = propagate(propagator_for(p), psi0, t).amplitudes
        oracle = rk4_evolve(build_hamiltonian(p).matrix, psi0.amplitudes, t)
        assert np.max(np.abs(exact - oracle)) <= 1e-6


def test_propagate_at_zero_is_identity(rng):
    p = _random_params(rng)
    psi0 = StateVector(random_state(rng, p.dim), p.n_fock)
    np.testing.assert_allclose(propagate(propagator_for(p), psi0, 0.0).amplitudes, psi0.amplitudes, atol=1e-13)


def test_norm_is_conserved(rng):
    p = _random_params(rng, n_fock=10)
    psi0 = make_initial_state([0, 1], [1, 1, 1, 1], 10)
    amps = propagate_many(propagator_for(p), psi0, np.linspace(0, 100, 401))
    assert np.max(np.abs(np.linalg.norm(amps, axis=1) - 1.0)) <= 1e-10


def test_energy_is_conserved(rng):
    times = np.linspace(0.0, 100.0, 201)
    for _ in range(20):
        p = _random_params(rng, model=str(rng.choice(["rabi", "jc"])))
        psi0 = StateVector(random_state(rng, p.dim), p.n_fock)
        energy = expectation_series(propagator_for(p), psi0, times, build_hamiltonian(p))
        assert np.max(np.abs(energy - energy[0])) <= 1e-10 * max(1.0, abs(energy[0]))


def test_composition_of_propagations(rng):
    p = _random_params(rng)
    prop = propagator_for(p)
    psi0 = StateVector(random_state(rng, p.dim), p.n_fock)
    two_steps = propagate(prop, propagate(prop, psi0, 1.3), 2.1)
    one_step = propagate(prop, psi0, 3.4)
    np.testing.assert_allclose(two_steps.amplitudes, one_step.amplitudes, atol=1e-12)


def test_dimension_mismatch_rejected():
    prop = propagator_for(SubsystemParams(n_fock=4))
    with pytest.raises(InvalidDimensionError):
        propagate(prop, basis_state(0, 0, 5), 1.0)


def test_parity_is_conserved_in_random_rabi_scenarios(rng):
    times = np.linspace(0.0, 100.0, 201)
    for _ in range(100):
        p = _random_params(rng)
        psi0 = StateVector(random_state(rng, p.dim), p.n_fock)
        values = expectation_series(propagator_for(p), psi0, times, build_parity(p.n_fock))
        assert np.max(np.abs(values - values[0])) <= 1e-10


def test_selection_rule_from_excited_vacuum(rng):
    # |down 0> has parity -1: |up even> and |down odd> stay empty
    times = np.linspace(0.0, 100.0, 501)
    for _ in range(10):
        p = _random_params(rng, n_fock=10)
        amps = propagate_many(propagator_for(p), basis_state(1, 0, 10), times).reshape(-1, 2, 10)
        assert np.max(np.abs(amps[:, 0, 0::2])) <= 1e-10
        assert np.max(np.abs(amps[:, 1, 1::2])) <= 1e-10


def test_jc_excitation_number_is_conserved(rng):
    p = _random_params(rng, model="jc", n_fock=8)
    psi0 = StateVector(random_state(rng, p.dim), p.n_fock)
    values = expectation_series(propagator_for(p), psi0, np.linspace(0, 50, 101), build_excitation_number(8))
    assert np.max(np.abs(values - values[0])) <= 1e-10


def test_vacuum_rabi_oscillation():
    g = 0.2
    p = SubsystemParams(coupling=g, n_fock=10, model="jc")
    times = np.linspace(0, 40, 201)
    excited = expectation_series(propagator_for(p), basis_state(1, 0, 10), times, build_qubit_excitation(10))
    np.testing.assert_allclose(excited, np.cos(g * times) ** 2, atol=1e-10)


def test_coefficients_split_rows():
    psi = make_initial_state([1, 1], [1, 0, 1], 4)
    table = coefficients(psi)
    np.testing.assert_allclose(table.a, [0.5, 0, 0.5, 0])
    np.testing.assert_allclose(table.b, [0.5, 0, 0.5, 0])
    assert table.norm_sq == pytest.approx(1.0)
    assert table.low_levels().shape == (2, 2)


def test_embed_state_pads_with_zeros():
    psi = basis_state(1, 2, 4)
    big = embed_state(psi, 8)
    assert big.amplitude(1, 2) == 1
    assert big.norm == pytest.approx(1.0)


def test_truncation_passes_at_default_parameters():
    p = SubsystemParams(n_fock=10, coupling=0.2)
    report = truncation_check(p, InitialState((0, 1), (1,)), 100.0)
    assert report.passed
    assert report.reference_levels == 20
    assert report.min_fidelity > 0.99


def test_small_fock_space_leaks_more_from_excited_vacuum():
    psi0 = InitialState((0, 1), (1,))
    small = truncation_check(SubsystemParams(n_fock=2, coupling=0.2), psi0, 100.0)
    large = truncation_check(SubsystemParams(n_fock=10, coupling=0.2), psi0, 100.0)
    assert small.max_leakage > large.max_leakage
    assert small.max_leakage > 1e-3
    assert large.max_leakage < 1e-6


def test_truncation_fails_when_state_does_not_fit():
    p = SubsystemParams(n_fock=2, coupling=0.2)
    report = truncation_check(p, InitialState((0, 1), (1, 1, 1, 1)), 10.0)
    assert not report.passed
    assert report.max_leakage >= 0.5 - 1e-12


def test_truncation_without_coupling_has_no_leakage():
    p = SubsystemParams(n_fock=4, coupling=0.0)
    report = truncation_check(p, make_initial_state([0, 1], [1, 1], 4), 100.0)
    assert report.max_leakage == 0.0
    assert report.min_fidelity == pytest.approx(1.0)
    assert report.passed


def test_truncation_factor_validated():
    with pytest.raises(InvalidParameterError):
        truncation_check(SubsystemParams(n_fock=4), basis_state(0, 0, 4), 1.0, factor=1)
