from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

import numpy as np

from app.errors import (
    ContractViolation,
    InvalidDimensionError,
    InvalidParameterError,
    InvalidStateError,
)

MODELS = ("rabi", "jc")
QUBIT_CONVENTIONS = ("half", "full")

HERMITIAN_RTOL = 1e-12
NORM_ATOL = 1e-10


def _frozen_array(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# Qubit–cavity subsystem
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SubsystemParams:
    """Parameters of one qubit–cavity pair, hbar = 1, frequencies in units of omega_1."""

    cavity_freq: float = 1.0
    qubit_freq: float = 1.0
    coupling: float = 0.2
    n_fock: int = 10
    model: str = "rabi"
    qubit_convention: str = "half"

    def __post_init__(self):
        if not self.cavity_freq > 0:
            raise InvalidParameterError(f"cavity_freq must be > 0, got {self.cavity_freq}")
        if not self.qubit_freq > 0:
            raise InvalidParameterError(f"qubit_freq must be > 0, got {self.qubit_freq}")
        if not self.coupling >= 0:
            raise InvalidParameterError(f"coupling must be >= 0, got {self.coupling}")
        if int(self.n_fock) != self.n_fock or self.n_fock < 2:
            raise InvalidDimensionError(f"n_fock must be an integer >= 2, got {self.n_fock}")
        if self.model not in MODELS:
            raise InvalidParameterError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.qubit_convention not in QUBIT_CONVENTIONS:
            raise InvalidParameterError(
                f"qubit_convention must be one of {QUBIT_CONVENTIONS}, got {self.qubit_convention!r}"
            )

    @property
    def dim(self) -> int:
        return 2 * self.n_fock

    @property
    def qubit_prefactor(self) -> float:
        """c in H_Q = c * Omega * sigma_z."""
        return 0.5 if self.qubit_convention == "half" else 1.0

    def fingerprint(self) -> str:
        return (
            f"{self.model}/{self.qubit_convention}/N={self.n_fock}"
            f"/w={self.cavity_freq!r}/W={self.qubit_freq!r}/g={self.coupling!r}"
        )


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes over |q> (x) |n>, laid out at index q * n_fock + n."""

    amplitudes: np.ndarray
    n_fock: int

    def __post_init__(self):
        arr = _frozen_array(self.amplitudes)
        if arr.ndim != 1 or arr.shape[0] != 2 * self.n_fock:
            raise InvalidDimensionError(
                f"state needs {2 * self.n_fock} amplitudes for n_fock={self.n_fock}, got shape {arr.shape}"
            )
        object.__setattr__(self, "amplitudes", arr)

    @staticmethod
    def index(q: int, n: int, n_fock: int) -> int:
        return q * n_fock + n

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, atol: float = NORM_ATOL) -> bool:
        return abs(self.norm - 1.0) <= atol

    def as_matrix(self) -> np.ndarray:
        """2 x n_fock view: row 0 holds the |up n> amplitudes, row 1 the |down n> ones."""
        return self.amplitudes.reshape(2, self.n_fock)

    def amplitude(self, q: int, n: int) -> complex:
        return complex(self.amplitudes[self.index(q, n, self.n_fock)])

    def expectation(self, operator: "OperatorMatrix") -> float:
        return float(np.real(np.vdot(self.amplitudes, operator.matrix @ self.amplitudes)))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        arr = _frozen_array(self.matrix)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidDimensionError(f"operator must be square, got shape {arr.shape}")
        object.__setattr__(self, "matrix", arr)
        if self.hermitian and hermiticity_defect(arr) > HERMITIAN_RTOL:
            raise ContractViolation("operator flagged hermitian is not")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def hermiticity_defect(matrix: np.ndarray) -> float:
    """max|M - M^dagger| relative to max|M| (0 for the zero matrix)."""
    scale = np.max(np.abs(matrix)) if matrix.size else 0.0
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)) / scale)


# ---------------------------------------------------------------------------
# Evolution
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class Propagator:
    """Eigendecomposition H = V diag(lambda) V^dagger of a subsystem Hamiltonian."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    fingerprint: str = ""

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen_array(self.eigenvalues, dtype=float))
        object.__setattr__(self, "eigenvectors", _frozen_array(self.eigenvectors))

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def evolve(
        self,
        amplitudes: np.ndarray,
        times: np.ndarray,
        rows: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        """Return V e^{-i Lambda t} V^dagger psi for every t, shape (len(times), len(rows)).

        Each output element is computed independently of the other times, so
        chunking a grid never changes a value.
        """
        vecs = self.eigenvectors
        weights = vecs.conj().T @ np.asarray(amplitudes, dtype=complex)
        phases = np.exp(-1j * np.multiply.outer(np.asarray(times, dtype=float), self.eigenvalues))
        selected = vecs if rows is None else vecs[np.asarray(rows)]
        return np.einsum("tk,rk->tr", phases * weights, selected)


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """a_n (|up n>) and b_n (|down n>) of one evolved subsystem."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _frozen_array(self.a)
        b = _frozen_array(self.b)
        if a.shape != b.shape or a.ndim != 1 or a.shape[0] < 2:
            raise InvalidDimensionError(f"coefficient arrays must share a length >= 2, got {a.shape} and {b.shape}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n_fock(self) -> int:
        return self.a.shape[0]

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.a) ** 2) + np.sum(np.abs(self.b) ** 2))

    def low_levels(self) -> np.ndarray:
        """Rows (a, b) restricted to Fock levels 0 and 1: shape (2, 2)."""
        return np.array([self.a[:2], self.b[:2]])

    def truncated(self, levels: int = 2) -> "CoefficientTable":
        a = np.array(self.a)
        b = np.array(self.b)
        a[levels:] = 0
        b[levels:] = 0
        return CoefficientTable(a, b)


# ---------------------------------------------------------------------------
# Swap
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class BellProjector:
    """Bell state on the photon pair over Fock levels {0, 1}^2.

    ``weights[n, m]`` is sqrt(2) times the amplitude of |n m>, kept as exact
    0 / +-1 entries so that projecting onto psi- reproduces the plain
    two-by-two determinants bit for bit.
    """

    name: str
    weights: np.ndarray

    def __post_init__(self):
        weights = _frozen_array(self.weights)
        if weights.shape != (2, 2):
            raise InvalidDimensionError(f"Bell projector needs a 2x2 table, got {weights.shape}")
        if abs(float(np.sum(np.abs(weights) ** 2)) - 2.0) > 1e-12:
            raise InvalidStateError(f"Bell state {self.name!r} is not normalized")
        object.__setattr__(self, "weights", weights)

    @property
    def coefficients(self) -> np.ndarray:
        return self.weights / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Amplitudes ordered (up-up, up-down, down-up, down-down)."""

    amplitudes: np.ndarray
    norm_sq: float
    normalized: bool = False

    def __post_init__(self):
        amps = _frozen_array(self.amplitudes)
        if amps.shape != (4,):
            raise InvalidDimensionError(f"two-qubit state needs 4 amplitudes, got {amps.shape}")
        if self.norm_sq < 0:
            raise InvalidStateError("norm_sq cannot be negative")
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(float(np.sum(np.abs(amps) ** 2)) - 1.0) > 1e-12:
            raise ContractViolation("two-qubit state flagged normalized is not")

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "TwoQubitState":
        amps = np.asarray(amplitudes, dtype=complex)
        return cls(amps, float(np.sum(np.abs(amps) ** 2)))

    @property
    def is_null(self) -> bool:
        return self.norm_sq == 0.0

    @property
    def up_up(self) -> complex:
        return complex(self.amplitudes[0])

    @property
    def up_down(self) -> complex:
        return complex(self.amplitudes[1])

    @property
    def down_up(self) -> complex:
        return complex(self.amplitudes[2])

    @property
    def down_down(self) -> complex:
        return complex(self.amplitudes[3])

    def normalize(self) -> "TwoQubitState":
        """Return the normalized state; a null state comes back unchanged (still unnormalized)."""
        if self.normalized or self.is_null:
            return self
        return TwoQubitState(self.amplitudes / math.sqrt(self.norm_sq), 1.0, normalized=True)


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class InitialState:
    """Separable subsystem state sum_s gamma_s |s> (x) sum_n beta_n |n>."""

    qubit_amps: tuple[complex, complex]
    photon_amps: tuple[complex, ...]

    @property
    def photon_levels(self) -> int:
        return len(self.photon_amps)


@dataclass(frozen=True)
class TimeGrid:
    start: float = 0.0
    stop: float = 100.0
    step: float = 0.05

    def __post_init__(self):
        if not self.step > 0:
            raise InvalidParameterError(f"grid step must be > 0, got {self.step}")
        if self.stop < self.start:
            raise InvalidParameterError(f"grid stop {self.stop} lies before start {self.start}")

    def __len__(self) -> int:
        return int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1

    def times(self) -> np.ndarray:
        # start + i * step (not a running sum) so that halving the step
        # reproduces every original point bit for bit
        return self.start + self.step * np.arange(len(self), dtype=float)

    def with_stop(self, stop: float) -> "TimeGrid":
        return replace(self, stop=stop)


@dataclass(frozen=True)
class Scenario:
    label: str
    params1: SubsystemParams
    params2: SubsystemParams
    state1: InitialState
    state2: InitialState
    grid: TimeGrid = field(default_factory=TimeGrid)

    def snapshot(self) -> dict:
        def _params(p: SubsystemParams) -> dict:
            return {
                "cavity_freq": p.cavity_freq,
                "qubit_freq": p.qubit_freq,
                "coupling": p.coupling,
                "n_fock": p.n_fock,
                "model": p.model,
                "qubit_convention": p.qubit_convention,
            }

        def _state(s: InitialState) -> dict:
            return {
                "qubit_amps": [str(complex(x)) for x in s.qubit_amps],
                "photon_amps": [str(complex(x)) for x in s.photon_amps],
            }

        return {
            "label": self.label,
            "subsystem1": _params(self.params1),
            "subsystem2": _params(self.params2),
            "state1": _state(self.state1),
            "state2": _state(self.state2),
            "grid": {"start": self.grid.start, "stop": self.grid.stop, "step": self.grid.step},
        }


@dataclass(frozen=True, eq=False)
class SweepSeries:
    """Concurrence (NaN where undefined) and BSM success probability on a t' grid."""

    times: np.ndarray
    concurrence: np.ndarray
    success_probability: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        times = _frozen_array(self.times, dtype=float)
        conc = _frozen_array(self.concurrence, dtype=float)
        prob = _frozen_array(self.success_probability, dtype=float)
        if not (times.shape == conc.shape == prob.shape) or times.ndim != 1:
            raise InvalidDimensionError("series columns must be 1-D and of equal length")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ContractViolation("series times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "concurrence", conc)
        object.__setattr__(self, "success_probability", prob)

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.concurrence)

    def points(self) -> Iterator[tuple[float, Optional[float], float]]:
        for t, c, p in zip(self.times, self.concurrence, self.success_probability):
            yield float(t), (None if math.isnan(c) else float(c)), float(p)

    def summary(self) -> dict:
        mask = self.defined
        if not mask.any():
            return {
                "points": len(self),
                "defined_points": 0,
                "max_concurrence": None,
                "t_at_max": None,
                "mean_concurrence": None,
                "mean_success_probability": float(np.mean(self.success_probability)) if len(self) else None,
            }
        defined_conc = np.where(mask, self.concurrence, -np.inf)
        i_max = int(np.argmax(defined_conc))
        return {
            "points": len(self),
            "defined_points": int(mask.sum()),
            "max_concurrence": float(self.concurrence[i_max]),
            "t_at_max": float(self.times[i_max]),
            "mean_concurrence": float(np.mean(self.concurrence[mask])),
            "mean_success_probability": float(np.mean(self.success_probability)),
        }


@dataclass(frozen=True)
class TruncationReport:
    n_fock: int
    reference_levels: int
    max_leakage: float
    min_fidelity: float
    threshold: float = 0.01

    @property
    def passed(self) -> bool:
        return self.max_leakage <= self.threshold

    def worse(self, other: "TruncationReport") -> "TruncationReport":
        return self if self.max_leakage >= other.max_leakage else other
