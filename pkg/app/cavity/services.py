"""
Cavity services — ladder, Pauli and parity operators, Rabi / Jaynes–Cummings
Hamiltonians and separable initial states of one qubit–cavity subsystem.

Basis convention: index(q, n) = q * n_fock + n, q = 0 for |up> (ground),
q = 1 for |down> (excited).  Full-space operators are kron(qubit, fock).
"""

import logging
import math
from typing import Sequence

import numpy as np

from app.errors import InvalidDimensionError, InvalidParameterError, InvalidStateError
from app.models import OperatorMatrix, StateVector, SubsystemParams

logger = logging.getLogger(__name__)

# Qubit factor, (up, down) ordering.  SIGMA_Z is +1 on the ground state so
# that the parity of |up, 0> is +1; the qubit energy uses -SIGMA_Z.
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |down><up|
SIGMA_MINUS = SIGMA_PLUS.T.copy()
EXCITED_PROJECTOR = SIGMA_PLUS @ SIGMA_MINUS
QUBIT_IDENTITY = np.eye(2, dtype=complex)


def _check_levels(n_fock: int) -> None:
    if int(n_fock) != n_fock or n_fock < 2:
        raise InvalidDimensionError(f"n_fock must be an integer >= 2, got {n_fock}")


# ---------------------------------------------------------------------------
# Mode operators (Fock factor only)
# ---------------------------------------------------------------------------

def build_annihilation(n_fock: int) -> OperatorMatrix:
    """Truncated annihilation operator, <n-1|a|n> = sqrt(n).

    The top level n_fock - 1 has no partner above it, so a^dagger simply
    drops the transition out of it.
    """
    _check_levels(n_fock)
    return OperatorMatrix(np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), 1))


def build_creation(n_fock: int) -> OperatorMatrix:
    return OperatorMatrix(build_annihilation(n_fock).matrix.T)


def build_number(n_fock: int) -> OperatorMatrix:
    _check_levels(n_fock)
    return OperatorMatrix(np.diag(np.arange(n_fock, dtype=float)), hermitian=True)


# ---------------------------------------------------------------------------
# Full-space operators
# ---------------------------------------------------------------------------

def _on_subsystem(qubit_op: np.ndarray, fock_op: np.ndarray) -> np.ndarray:
    return np.kron(qubit_op, fock_op)


def build_hamiltonian(p: SubsystemParams) -> OperatorMatrix:
    """H = H_Q + H_C + H_int on the 2 * n_fock space (hbar = 1).

    H_Q = c Omega with the excited qubit at +c Omega (c = 1/2 or 1 per
    ``p.qubit_convention``), H_C = omega (a^dagger a + 1/2).  The Rabi
    coupling is g sigma_x (a + a^dagger); the JC coupling keeps only
    g (sigma+ a + sigma- a^dagger).
    """
    n = p.n_fock
    a = build_annihilation(n).matrix
    a_dag = a.T
    fock_identity = np.eye(n, dtype=complex)

    h_qubit = -p.qubit_prefactor * p.qubit_freq * _on_subsystem(SIGMA_Z, fock_identity)
    h_cavity = p.cavity_freq * _on_subsystem(QUBIT_IDENTITY, a_dag @ a + 0.5 * fock_identity)

    if p.model == "rabi":
        h_int = p.coupling * _on_subsystem(SIGMA_X, a + a_dag)
    else:
        h_int = p.coupling * (_on_subsystem(SIGMA_PLUS, a) + _on_subsystem(SIGMA_MINUS, a_dag))

    logger.debug("[cavity] Built %s Hamiltonian (%s)", p.model, p.fingerprint())
    return OperatorMatrix(h_qubit + h_cavity + h_int, hermitian=True)


def build_parity(n_fock: int) -> OperatorMatrix:
    """Pi = sigma_z (x) (-1)^{a^dagger a}; conserved by the Rabi Hamiltonian."""
    _check_levels(n_fock)
    photon_parity = np.diag((-1.0) ** np.arange(n_fock))
    return OperatorMatrix(_on_subsystem(SIGMA_Z, photon_parity), hermitian=True)


def build_qubit_excitation(n_fock: int) -> OperatorMatrix:
    _check_levels(n_fock)
    return OperatorMatrix(_on_subsystem(EXCITED_PROJECTOR, np.eye(n_fock)), hermitian=True)


def build_photon_number(n_fock: int) -> OperatorMatrix:
    return OperatorMatrix(_on_subsystem(QUBIT_IDENTITY, build_number(n_fock).matrix), hermitian=True)


def build_excitation_number(n_fock: int) -> OperatorMatrix:
    """sigma+ sigma- (x) 1 + 1 (x) a^dagger a, conserved by the JC Hamiltonian."""
    return OperatorMatrix(
        build_qubit_excitation(n_fock).matrix + build_photon_number(n_fock).matrix,
        hermitian=True,
    )


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

def _normalized_factor(values: Sequence[complex], what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    norm = np.linalg.norm(arr)
    if arr.ndim != 1 or arr.size == 0 or norm == 0:
        raise InvalidStateError(f"{what} amplitudes must contain at least one nonzero value")
    return arr / norm


def make_initial_state(
    qubit_amps: Sequence[complex],
    photon_amps: Sequence[complex],
    n_fock: int,
) -> StateVector:
    """Normalized product state (sum_s gamma_s |s>) (x) (sum_n beta_n |n>)."""
    _check_levels(n_fock)
    if len(qubit_amps) != 2:
        raise InvalidStateError(f"qubit factor needs exactly 2 amplitudes, got {len(qubit_amps)}")
    if len(photon_amps) > n_fock:
        raise InvalidStateError(
            f"photon factor has {len(photon_amps)} amplitudes but only {n_fock} Fock levels are kept"
        )
    gamma = _normalized_factor(qubit_amps, "qubit")
    beta = np.zeros(n_fock, dtype=complex)
    beta[: len(photon_amps)] = _normalized_factor(photon_amps, "photon")
    return StateVector(np.kron(gamma, beta), n_fock)


def basis_state(q: int, n: int, n_fock: int) -> StateVector:
    """|q, n> with q = 0 (up, ground) or 1 (down, excited)."""
    if q not in (0, 1) or not 0 <= n < n_fock:
        raise InvalidStateError(f"no basis state |{q}, {n}> with n_fock={n_fock}")
    qubit = [1, 0] if q == 0 else [0, 1]
    photons = [0] * n + [1]
    return make_initial_state(qubit, photons, n_fock)


# ---------------------------------------------------------------------------
# Physical units
# ---------------------------------------------------------------------------

def coupling_from_physical(current_amp: float, inductance: float, cavity_freq: float) -> float:
    """g = I0 sqrt(omega L / 2) with hbar = 1."""
    if current_amp < 0:
        raise InvalidParameterError(f"current amplitude must be >= 0, got {current_amp}")
    if inductance <= 0:
        raise InvalidParameterError(f"inductance must be > 0, got {inductance}")
    if cavity_freq <= 0:
        raise InvalidParameterError(f"cavity frequency must be > 0, got {cavity_freq}")
    return current_amp * math.sqrt(cavity_freq * inductance / 2.0)
