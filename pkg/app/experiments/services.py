"""
Experiment services — the scenario library (the six initial-state sets and
the figure parameter sets) and the sweep engine producing concurrence
versus measurement time t'.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from app.cavity.services import make_initial_state
from app.errors import InvalidStateError, UnknownScenarioError
from app.evolution.services import propagator_for, truncation_check
from app.models import (
    BellProjector,
    InitialState,
    Scenario,
    StateVector,
    SubsystemParams,
    SweepSeries,
    TimeGrid,
    TruncationReport,
)
from app.swap.services import (
    DEFAULT_BSM_EPSILON,
    PSI_MINUS,
    concurrence_series,
    project_levels,
)
from app.tasks import run_in_order

logger = logging.getLogger(__name__)

DEFAULT_COUPLING = 0.2
DEFAULT_FOCK_LEVELS = 10
DEFAULT_T_STOP = 100.0
DEFAULT_T_STEP = 0.05
DEFAULT_SCAN_T_STOP = 400.0
DEFAULT_CHUNK = 512

_UP = (1, 0)
_DOWN = (0, 1)

# label -> (subsystem 1, subsystem 2); equal weights, normalized at build time
SCENARIO_STATES: dict[str, tuple[InitialState, InitialState]] = {
    "e0g1": (InitialState(_DOWN, (1,)), InitialState(_UP, (0, 1))),
    "e01g01": (InitialState(_DOWN, (1, 1)), InitialState(_UP, (1, 1))),
    "e0123g0123": (InitialState(_DOWN, (1, 1, 1, 1)), InitialState(_UP, (1, 1, 1, 1))),
    "e0e0": (InitialState(_DOWN, (1,)), InitialState(_DOWN, (1,))),
    "e01e01": (InitialState(_DOWN, (1, 1)), InitialState(_DOWN, (1, 1))),
    "e0123e0123": (InitialState(_DOWN, (1, 1, 1, 1)), InitialState(_DOWN, (1, 1, 1, 1))),
}
DIFFERENT_STATE_LABELS = ("e0g1", "e01g01", "e0123g0123")
IDENTICAL_STATE_LABELS = ("e0e0", "e01e01", "e0123e0123")
CUSTOM_LABEL = "custom"

# omega_2 = Omega_2 used by each figure (omega_1 = Omega_1 = 1 throughout)
FIGURE_DETUNINGS = {"fig1": 1.0, "fig2": 1.0, "fig3": 0.95, "fig4": 0.8, "fig5": 0.8}


# ---------------------------------------------------------------------------
# Scenario library
# ---------------------------------------------------------------------------

def known_labels() -> list[str]:
    return list(SCENARIO_STATES) + [CUSTOM_LABEL]


def build_scenario(
    label: str,
    *,
    model: str = "rabi",
    n_fock: int = DEFAULT_FOCK_LEVELS,
    coupling: float = DEFAULT_COUPLING,
    qubit_convention: str = "half",
    omega1: float = 1.0,
    omega2: Optional[float] = None,
    qubit_freq1: Optional[float] = None,
    qubit_freq2: Optional[float] = None,
    figure: Optional[str] = None,
    grid: Optional[TimeGrid] = None,
    state1: Optional[InitialState] = None,
    state2: Optional[InitialState] = None,
) -> Scenario:
    """Return a scenario with the default omega_1 = Omega_1 = 1, g = 0.2.

    *omega2* sets both the cavity and the qubit frequency of subsystem 2;
    *figure* (``"fig1"`` … ``"fig5"``) supplies the figure's omega_2 when
    *omega2* is not given.  The ``custom`` label takes its initial states
    from *state1* / *state2*.
    """
    if label == CUSTOM_LABEL:
        if state1 is None or state2 is None:
            raise InvalidStateError("a custom scenario needs both initial states")
        states = (state1, state2)
    elif label in SCENARIO_STATES:
        if state1 is not None or state2 is not None:
            raise InvalidStateError(f"scenario {label!r} has fixed initial states; use 'custom'")
        states = SCENARIO_STATES[label]
    else:
        raise UnknownScenarioError(
            f"unknown scenario label {label!r} (known: {', '.join(known_labels())})"
        )

    if figure is not None and figure not in FIGURE_DETUNINGS:
        raise UnknownScenarioError(f"unknown figure {figure!r} (known: {', '.join(FIGURE_DETUNINGS)})")
    if omega2 is None:
        omega2 = FIGURE_DETUNINGS[figure] if figure is not None else omega1

    common = dict(coupling=coupling, n_fock=n_fock, model=model, qubit_convention=qubit_convention)
    params1 = SubsystemParams(cavity_freq=omega1, qubit_freq=qubit_freq1 or omega1, **common)
    params2 = SubsystemParams(cavity_freq=omega2, qubit_freq=qubit_freq2 or omega2, **common)

    return Scenario(
        label=label,
        params1=params1,
        params2=params2,
        state1=states[0],
        state2=states[1],
        grid=grid or TimeGrid(0.0, DEFAULT_T_STOP, DEFAULT_T_STEP),
    )


def initial_states(s: Scenario) -> tuple[StateVector, StateVector]:
    return (
        make_initial_state(s.state1.qubit_amps, s.state1.photon_amps, s.params1.n_fock),
        make_initial_state(s.state2.qubit_amps, s.state2.photon_amps, s.params2.n_fock),
    )


def with_model(s: Scenario, model: str) -> Scenario:
    return replace(s, params1=replace(s.params1, model=model), params2=replace(s.params2, model=model))


# ---------------------------------------------------------------------------
# Sweep engine
# ---------------------------------------------------------------------------

def _bsm_rows(n_fock: int) -> np.ndarray:
    """Indices of |up 0>, |up 1>, |down 0>, |down 1>."""
    return np.array([0, 1, n_fock, n_fock + 1])


def sweep(
    s: Scenario,
    *,
    eps_bsm: float = DEFAULT_BSM_EPSILON,
    bell: BellProjector = PSI_MINUS,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> SweepSeries:
    """Concurrence and BSM success probability at every t' of the scenario grid.

    Only the four Fock-0/1 rows of each subsystem are propagated.  Grid
    chunks are evaluated independently (optionally on *workers* threads) and
    reassembled in grid order; values do not depend on the chunking.
    """
    times = s.grid.times()
    prop1 = propagator_for(s.params1)
    prop2 = propagator_for(s.params2)
    psi1, psi2 = initial_states(s)
    rows1 = _bsm_rows(s.params1.n_fock)
    rows2 = _bsm_rows(s.params2.n_fock)

    def _evaluate(chunk: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        levels1 = prop1.evolve(psi1.amplitudes, chunk, rows1).reshape(-1, 2, 2)
        levels2 = prop2.evolve(psi2.amplitudes, chunk, rows2).reshape(-1, 2, 2)
        amps = project_levels(levels1, levels2, bell)
        success = 0.5 * np.sum(np.abs(amps) ** 2, axis=-1)
        return concurrence_series(amps, success, eps_bsm), success

    chunk_size = max(1, int(chunk_size))
    chunks = [times[i: i + chunk_size] for i in range(0, len(times), chunk_size)]
    results = run_in_order(_evaluate, chunks, workers)

    concurrence = np.concatenate([r[0] for r in results])
    success = np.concatenate([r[1] for r in results])

    metadata = s.snapshot()
    metadata.update({"eps_bsm": eps_bsm, "bell_state": bell.name})
    series = SweepSeries(times, concurrence, success, metadata)

    undefined = len(series) - int(series.defined.sum())
    if undefined:
        logger.warning("[sweep] %s: %d point(s) with undefined concurrence", s.label, undefined)
    logger.info("[sweep] %s: %d point(s) on t' in [%g, %g]", s.label, len(series), s.grid.start, s.grid.stop)
    return series


@dataclass(frozen=True)
class ModelComparison:
    rabi: SweepSeries
    jc: SweepSeries
    max_abs_diff: float
    mean_abs_diff: float
    compared_points: int


def compare_models(s: Scenario, **sweep_kwargs) -> ModelComparison:
    """Sweep the scenario under both the Rabi and the JC coupling on the same grid."""
    rabi = sweep(with_model(s, "rabi"), **sweep_kwargs)
    jc = sweep(with_model(s, "jc"), **sweep_kwargs)

    both = rabi.defined & jc.defined
    if both.any():
        diff = np.abs(rabi.concurrence[both] - jc.concurrence[both])
        max_diff, mean_diff = float(diff.max()), float(diff.mean())
    else:
        max_diff = mean_diff = 0.0

    logger.info("[sweep] %s: Rabi vs JC max |diff| %.4f, mean %.4f", s.label, max_diff, mean_diff)
    return ModelComparison(rabi, jc, max_diff, mean_diff, int(both.sum()))


def detuning_scan(
    base: Scenario,
    omega2_values: Sequence[float],
    *,
    t_stop: float = DEFAULT_SCAN_T_STOP,
    **sweep_kwargs,
) -> dict[float, SweepSeries]:
    """One series per omega_2 = Omega_2 value, on the base grid extended to *t_stop*."""
    grid = base.grid.with_stop(t_stop)
    scans: dict[float, SweepSeries] = {}
    for omega2 in omega2_values:
        params2 = replace(base.params2, cavity_freq=float(omega2), qubit_freq=float(omega2))
        scans[float(omega2)] = sweep(replace(base, params2=params2, grid=grid), **sweep_kwargs)
    return scans


def check_scenario_truncation(
    s: Scenario,
    *,
    factor: int = 2,
    threshold: float = 0.01,
    step: float = DEFAULT_T_STEP,
) -> TruncationReport:
    """Truncation check of both subsystems up to the end of the grid; returns the worse one."""
    reports = [
        truncation_check(params, state, s.grid.stop, factor, step=step, threshold=threshold)
        for params, state in ((s.params1, s.state1), (s.params2, s.state2))
    ]
    return reports[0].worse(reports[1])
