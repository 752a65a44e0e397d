"""
Swap services — Bell-state measurement on the two photon modes, the
resulting (unnormalized) qubit–qubit state and its pure-state concurrence.

Two-qubit amplitudes are always ordered (up-up, up-down, down-up, down-down).
"""

import logging
import math
from typing import NamedTuple

import numpy as np

from app.cavity.services import SIGMA_Y
from app.errors import ContractViolation
from app.evolution.services import coefficients, propagate
from app.models import BellProjector, CoefficientTable, Propagator, StateVector, TwoQubitState

logger = logging.getLogger(__name__)

DEFAULT_BSM_EPSILON = 1e-9

PSI_MINUS = BellProjector("psi-", [[0, 1], [-1, 0]])
PSI_PLUS = BellProjector("psi+", [[0, 1], [1, 0]])
PHI_PLUS = BellProjector("phi+", [[1, 0], [0, 1]])
PHI_MINUS = BellProjector("phi-", [[1, 0], [0, -1]])
BELL_STATES = {b.name: b for b in (PSI_MINUS, PSI_PLUS, PHI_PLUS, PHI_MINUS)}

# Orthonormal magic basis, rows are e_1..e_4 in the (uu, ud, du, dd) basis
MAGIC_BASIS = np.array(
    [
        [1, 0, 0, 1],
        [1j, 0, 0, -1j],
        [0, 1j, 1j, 0],
        [0, 1, -1, 0],
    ],
    dtype=complex,
) / math.sqrt(2.0)

SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)

_NORMALIZED_ATOL = 1e-10


class SwapOutcome(NamedTuple):
    concurrence: float  # NaN when the BSM outcome is too unlikely to define it
    success_probability: float


# ---------------------------------------------------------------------------
# Bell-state measurement
# ---------------------------------------------------------------------------

def project_levels(levels1: np.ndarray, levels2: np.ndarray, bell: BellProjector = PSI_MINUS) -> np.ndarray:
    """Unnormalized qubit–qubit amplitudes from the Fock-0/1 rows of both subsystems.

    ``levels[..., s, n]`` holds the amplitude of |s n> (s = up/down, n = 0/1);
    leading axes broadcast (one per grid time in a sweep).  Returns shape
    (..., 4) with c[s, s'] = sum_{n,m} w*[n, m] x[s, n] y[s', m].
    """
    x = np.asarray(levels1, dtype=complex)
    y = np.asarray(levels2, dtype=complex)
    c = np.einsum("...sn,nm,...tm->...st", x, bell.weights.conj(), y)
    return c.reshape(c.shape[:-2] + (4,))


def bsm_project(
    c1: CoefficientTable,
    c2: CoefficientTable,
    bell: BellProjector = PSI_MINUS,
) -> tuple[TwoQubitState, float]:
    """Project the photon pair on *bell*; return the unnormalized state and its probability.

    Only Fock levels 0 and 1 of each table enter; for psi- the amplitudes are
    c_uu = a0 a~1 - a1 a~0, c_ud = a0 b~1 - a1 b~0, c_du = b0 a~1 - b1 a~0,
    c_dd = b0 b~1 - b1 b~0, and the success probability is half their norm.
    """
    state = TwoQubitState.from_amplitudes(project_levels(c1.low_levels(), c2.low_levels(), bell))
    return state, 0.5 * state.norm_sq


# ---------------------------------------------------------------------------
# Concurrence
# ---------------------------------------------------------------------------

def concurrence_determinant(amplitudes: np.ndarray) -> np.ndarray:
    """2 |c_uu c_dd - c_ud c_du| along the last axis."""
    amps = np.asarray(amplitudes, dtype=complex)
    return 2.0 * np.abs(amps[..., 0] * amps[..., 3] - amps[..., 1] * amps[..., 2])


def concurrence_magic(s: TwoQubitState) -> float:
    """|sum_i alpha_i^2| with alpha_i the magic-basis components of *s*."""
    alphas = MAGIC_BASIS.conj() @ s.amplitudes
    return float(abs(np.sum(alphas**2)))


def concurrence_spin_flip(s: TwoQubitState) -> float:
    """|<s| sigma_y (x) sigma_y |s*>|."""
    return float(abs(np.vdot(s.amplitudes, SPIN_FLIP @ s.amplitudes.conj())))


def concurrence_pure(s: TwoQubitState) -> float:
    """Wootters concurrence of a normalized pure two-qubit state.

    A null (zero-norm) state has no defined concurrence and yields NaN; any
    other unnormalized input is a caller error.
    """
    if s.is_null:
        return math.nan
    if not s.normalized and abs(float(np.sum(np.abs(s.amplitudes) ** 2)) - 1.0) > _NORMALIZED_ATOL:
        raise ContractViolation("concurrence_pure needs a normalized state; normalize the BSM output first")
    return float(min(concurrence_determinant(s.amplitudes), 1.0))


def concurrence_series(amplitudes: np.ndarray, success: np.ndarray, eps_bsm: float) -> np.ndarray:
    """Vectorized normalize-then-concurrence over rows of unnormalized amplitudes."""
    amps = np.asarray(amplitudes, dtype=complex)
    defined = np.asarray(success) >= eps_bsm
    norm_sq = np.sum(np.abs(amps) ** 2, axis=-1)
    scale = np.sqrt(np.where(defined, norm_sq, 1.0))
    values = np.minimum(concurrence_determinant(amps / scale[..., None]), 1.0)
    return np.where(defined, values, np.nan)


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

def swap_at(
    prop1: Propagator,
    prop2: Propagator,
    psi1: StateVector,
    psi2: StateVector,
    t_prime: float,
    *,
    eps_bsm: float = DEFAULT_BSM_EPSILON,
    bell: BellProjector = PSI_MINUS,
) -> SwapOutcome:
    """Evolve both subsystems to t', measure the photons, return (concurrence, probability)."""
    c1 = coefficients(propagate(prop1, psi1, t_prime))
    c2 = coefficients(propagate(prop2, psi2, t_prime))
    state, success = bsm_project(c1, c2, bell)
    if success < eps_bsm:
        logger.debug("[swap] t'=%g: success probability %.3e below %.1e", t_prime, success, eps_bsm)
        return SwapOutcome(math.nan, success)
    return SwapOutcome(concurrence_pure(state.normalize()), success)
