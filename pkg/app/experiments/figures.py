"""
Figure catalogue — every curve of the five reference concurrence figures,
with the parameters of the corresponding caption wired in.
"""

from dataclasses import dataclass

from app.errors import UnknownScenarioError
from app.experiments.services import DEFAULT_SCAN_T_STOP, DEFAULT_T_STOP, FIGURE_DETUNINGS, build_scenario
from app.models import Scenario, TimeGrid

FIG3_T_STOP = 200.0


@dataclass(frozen=True)
class Curve:
    figure: int
    name: str
    label: str
    model: str
    t_stop: float
    title: str

    @property
    def omega2(self) -> float:
        return FIGURE_DETUNINGS[f"fig{self.figure}"]

    @property
    def filename(self) -> str:
        return f"fig{self.figure}_{self.name}.csv"


FIGURES: dict[int, tuple[Curve, ...]] = {
    1: (
        Curve(1, "A", "e0g1", "rabi", DEFAULT_T_STOP, "A: |down 0> x |up 1>"),
        Curve(1, "B", "e01g01", "rabi", DEFAULT_T_STOP, "B: (|down 0>+|down 1>) x (|up 0>+|up 1>)"),
        Curve(1, "C", "e0123g0123", "rabi", DEFAULT_T_STOP, "C: sum |down n> x sum |up m>, n,m<=3"),
    ),
    2: (
        Curve(2, "top_A", "e0g1", "jc", DEFAULT_T_STOP, "top A: JC, |down 0> x |up 1>"),
        Curve(2, "top_B", "e0g1", "rabi", DEFAULT_T_STOP, "top B: Rabi, |down 0> x |up 1>"),
        Curve(2, "bottom_A", "e0e0", "jc", DEFAULT_T_STOP, "bottom A: JC, |down 0> x |down 0>"),
        Curve(2, "bottom_B", "e0e0", "rabi", DEFAULT_T_STOP, "bottom B: Rabi, |down 0> x |down 0>"),
    ),
    3: (
        Curve(3, "A", "e0e0", "rabi", FIG3_T_STOP, "A: |down 0> x |down 0>"),
        Curve(3, "B", "e01e01", "rabi", FIG3_T_STOP, "B: (|down 0>+|down 1>) x (|down 0>+|down 1>)"),
        Curve(3, "C", "e0123e0123", "rabi", FIG3_T_STOP, "C: sum |down n> x sum |down m>, n,m<=3"),
    ),
    4: (Curve(4, "A", "e0g1", "rabi", DEFAULT_SCAN_T_STOP, "|down 0> x |up 1>, omega_2 = 0.8"),),
    5: (Curve(5, "A", "e0e0", "rabi", DEFAULT_SCAN_T_STOP, "|down 0> x |down 0>, omega_2 = 0.8"),),
}


def figure_curves(figure_id: int) -> tuple[Curve, ...]:
    try:
        return FIGURES[int(figure_id)]
    except (KeyError, TypeError, ValueError):
        raise UnknownScenarioError(
            f"unknown figure {figure_id!r} (known: {', '.join(str(k) for k in FIGURES)})"
        ) from None


def curve_scenario(curve: Curve, *, step: float, **overrides) -> Scenario:
    """Scenario for one curve; *overrides* may change n_fock or the qubit convention, not the caption."""
    return build_scenario(
        curve.label,
        model=curve.model,
        figure=f"fig{curve.figure}",
        grid=TimeGrid(0.0, curve.t_stop, step),
        **overrides,
    )
