"""
Evolution services — exact unitary propagation of one qubit–cavity subsystem
through a one-time Hermitian eigendecomposition, coefficient tables and
truncation-adequacy checks.
"""

import hashlib
import logging
from dataclasses import replace
from functools import lru_cache
from typing import Union

import numpy as np
from scipy import linalg

from app.cavity.services import build_hamiltonian, make_initial_state
from app.errors import ContractViolation, InvalidDimensionError, InvalidParameterError
from app.models import (
    HERMITIAN_RTOL,
    CoefficientTable,
    InitialState,
    OperatorMatrix,
    Propagator,
    StateVector,
    SubsystemParams,
    TimeGrid,
    TruncationReport,
    hermiticity_defect,
)

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION_STEP = 0.05
DEFAULT_LEAKAGE_THRESHOLD = 0.01


# ---------------------------------------------------------------------------
# Diagonalization
# ---------------------------------------------------------------------------

def diagonalize(h: OperatorMatrix, fingerprint: str = "") -> Propagator:
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending.

    An already diagonal matrix is not handed to LAPACK: its eigenvectors are
    the identity columns in eigenvalue order, so uncoupled spectra stay exact.
    """
    m = h.matrix
    if hermiticity_defect(m) > HERMITIAN_RTOL:
        raise ContractViolation("cannot diagonalize a non-Hermitian operator")

    if not fingerprint:
        fingerprint = hashlib.sha1(np.ascontiguousarray(m).tobytes()).hexdigest()[:16]

    diagonal = np.real(np.diag(m))
    if not np.any(m - np.diag(np.diag(m))):
        order = np.argsort(diagonal, kind="stable")
        vectors = np.eye(h.dim, dtype=complex)[:, order]
        return Propagator(diagonal[order], vectors, fingerprint)

    eigenvalues, eigenvectors = linalg.eigh(m)
    return Propagator(eigenvalues, eigenvectors, fingerprint)


@lru_cache(maxsize=64)
def propagator_for(params: SubsystemParams) -> Propagator:
    """Diagonalize the subsystem Hamiltonian once per parameter set."""
    prop = diagonalize(build_hamiltonian(params), fingerprint=params.fingerprint())
    logger.debug("[evolution] Diagonalized %s (dim %d)", params.fingerprint(), prop.dim)
    return prop


# ---------------------------------------------------------------------------
# Propagation
# ---------------------------------------------------------------------------

def _check_dim(prop: Propagator, psi0: StateVector) -> None:
    if psi0.dim != prop.dim:
        raise InvalidDimensionError(
            f"state has dimension {psi0.dim} but the propagator acts on {prop.dim}"
        )


def propagate(prop: Propagator, psi0: StateVector, t: float) -> StateVector:
    """|psi(t)> = V e^{-i Lambda t} V^dagger |psi(0)>."""
    _check_dim(prop, psi0)
    amplitudes = prop.evolve(psi0.amplitudes, np.array([t], dtype=float))[0]
    return StateVector(amplitudes, psi0.n_fock)


def propagate_many(prop: Propagator, psi0: StateVector, times: np.ndarray) -> np.ndarray:
    """Amplitudes at every time of *times*, shape (len(times), dim)."""
    _check_dim(prop, psi0)
    return prop.evolve(psi0.amplitudes, np.asarray(times, dtype=float))


def expectation_series(
    prop: Propagator,
    psi0: StateVector,
    times: np.ndarray,
    operator: OperatorMatrix,
) -> np.ndarray:
    """<psi(t)|O|psi(t)> (real part) on a time grid."""
    amps = propagate_many(prop, psi0, times)
    return np.real(np.sum(amps.conj() * (amps @ operator.matrix.T), axis=1))


def coefficients(psi: StateVector) -> CoefficientTable:
    rows = psi.as_matrix()
    return CoefficientTable(rows[0], rows[1])


# ---------------------------------------------------------------------------
# Truncation adequacy
# ---------------------------------------------------------------------------

def embed_state(psi: StateVector, n_fock: int) -> StateVector:
    """Zero-pad *psi* into a space with more Fock levels."""
    if n_fock < psi.n_fock:
        raise InvalidDimensionError(f"cannot embed n_fock={psi.n_fock} into {n_fock} levels")
    padded = np.zeros((2, n_fock), dtype=complex)
    padded[:, : psi.n_fock] = psi.as_matrix()
    return StateVector(padded.reshape(-1), n_fock)


def _restrict(psi: StateVector, n_fock: int) -> StateVector:
    """Keep the lowest *n_fock* levels, renormalized (zero if nothing is left)."""
    kept = np.array(psi.as_matrix()[:, :n_fock])
    norm = np.linalg.norm(kept)
    if norm > 0:
        kept = kept / norm
    return StateVector(kept.reshape(-1), n_fock)


def truncation_check(
    p: SubsystemParams,
    psi0: Union[StateVector, InitialState],
    t_max: float,
    factor: int = 2,
    *,
    step: float = DEFAULT_TRUNCATION_STEP,
    threshold: float = DEFAULT_LEAKAGE_THRESHOLD,
) -> TruncationReport:
    """Compare the n_fock-level evolution with a factor * n_fock reference run.

    Reports the largest population the reference run puts above level
    n_fock - 1 and the smallest fidelity between the two evolutions
    (reference projected on the retained levels).  An ``InitialState`` is
    built directly in the reference space, so a state that does not fit the
    retained levels shows up as leakage at t = 0 instead of an error.
    """
    if int(factor) != factor or factor < 2:
        raise InvalidParameterError(f"truncation factor must be an integer >= 2, got {factor}")

    n = p.n_fock
    big = replace(p, n_fock=factor * n)

    if isinstance(psi0, InitialState):
        psi_big = make_initial_state(psi0.qubit_amps, psi0.photon_amps, big.n_fock)
        psi_small = _restrict(psi_big, n)
    else:
        if psi0.n_fock != n:
            raise InvalidDimensionError(f"state has n_fock={psi0.n_fock}, parameters say {n}")
        psi_small = psi0
        psi_big = embed_state(psi0, big.n_fock)

    times = TimeGrid(0.0, float(t_max), step).times()
    amps_big = propagate_many(propagator_for(big), psi_big, times).reshape(len(times), 2, big.n_fock)
    amps_small = propagate_many(propagator_for(p), psi_small, times).reshape(len(times), 2, n)

    leakage = np.sum(np.abs(amps_big[:, :, n:]) ** 2, axis=(1, 2))
    overlap = np.sum(amps_small.conj() * amps_big[:, :, :n], axis=(1, 2))
    fidelity = np.abs(overlap) ** 2

    report = TruncationReport(
        n_fock=n,
        reference_levels=big.n_fock,
        max_leakage=float(np.max(leakage)),
        min_fidelity=float(np.min(fidelity)),
        threshold=threshold,
    )
    logger.info(
        "[truncation] %s: max leakage %.3e, min fidelity %.6f (%s)",
        p.fingerprint(), report.max_leakage, report.min_fidelity,
        "pass" if report.passed else "FAIL",
    )
    return report
