"""
Simulator commands: ``run``, ``figures`` and ``check-truncation``.

Exit codes: 0 success, 1 usage / configuration error, 2 numerical
contract violation (including a failed truncation check).
"""

import functools
import logging
import os
from typing import Any, Mapping, Optional

import click
from flask import current_app

from app.cli import sim_cli
from app.cli.forms import RunConfig, load_run_config
from app.cli.writers import atomic_write, gnuplot_script, series_to_csv, series_to_json
from app.errors import EXIT_NUMERICAL, EXIT_USAGE, ConfigError, SimulationError
from app.experiments.figures import curve_scenario, figure_curves
from app.experiments.services import build_scenario, check_scenario_truncation, detuning_scan, sweep
from app.models import MODELS, QUBIT_CONVENTIONS, Scenario, SweepSeries, TimeGrid
from app.swap.services import BELL_STATES

logger = logging.getLogger(__name__)


def _exit_on_error(f):
    """Turn simulator errors into a diagnostic on stderr and the matching exit code."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except SimulationError as exc:
            logger.error("[cli] %s: %s", type(exc).__name__, exc)
            click.echo(f"Error: {exc}", err=True)
            click.get_current_context().exit(exc.exit_code)
        except OSError as exc:
            logger.error("[cli] I/O error: %s", exc)
            click.echo(f"Error: {exc}", err=True)
            click.get_current_context().exit(EXIT_USAGE)

    return wrapper


def _scenario_options(f):
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="TOML run file."),
        click.option("--scenario", help="Scenario label (e0g1, e0e0, ..., custom)."),
        click.option("--model", type=click.Choice(MODELS)),
        click.option("--n-fock", type=int, help="Fock levels kept per cavity."),
        click.option("--coupling", type=float, help="Coupling g of both subsystems."),
        click.option("--omega1", type=float, help="omega_1 = Omega_1."),
        click.option("--omega2", type=float, help="omega_2 = Omega_2 (defaults to omega_1)."),
        click.option("--qubit-convention", type=click.Choice(QUBIT_CONVENTIONS)),
        click.option("--t-start", type=float),
        click.option("--t-stop", type=float),
        click.option("--t-step", type=float),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _run_config(config_path: Optional[str], flags: Mapping[str, Any]) -> RunConfig:
    overrides = {k: v for k, v in flags.items() if not (v is None or v is False or v == ())}
    return load_run_config(current_app.config, config_path, overrides)


def _scenario_from(cfg: RunConfig) -> Scenario:
    t_stop = cfg.t_stop
    if t_stop is None:
        t_stop = current_app.config["SCAN_T_STOP"] if cfg.detunings else current_app.config["T_STOP"]
    return build_scenario(
        cfg.scenario,
        model=cfg.model,
        n_fock=cfg.n_fock,
        coupling=cfg.coupling,
        qubit_convention=cfg.qubit_convention,
        omega1=cfg.omega1,
        omega2=cfg.omega2,
        grid=TimeGrid(cfg.t_start, t_stop, cfg.t_step),
        state1=cfg.state1,
        state2=cfg.state2,
    )


def _render(series: SweepSeries, output_format: str) -> str:
    if output_format == "json":
        return series_to_json(series, current_app.json)
    return series_to_csv(series, current_app.config["CSV_DIGITS"])


def _scan_path(output: str, omega2: float) -> str:
    stem, ext = os.path.splitext(output)
    return f"{stem}_w{omega2:g}{ext}"


def _summary_lines(series: SweepSeries) -> list[str]:
    s = series.summary()
    if s["max_concurrence"] is None:
        return [f"points: {s['points']}, none with a defined concurrence"]
    return [
        f"points: {s['points']} ({s['defined_points']} defined)",
        f"max concurrence: {s['max_concurrence']:.6f} at t' = {s['t_at_max']:g}",
        f"mean concurrence: {s['mean_concurrence']:.6f}",
        f"mean BSM success probability: {s['mean_success_probability']:.6f}",
    ]


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

@sim_cli.command("run")
@_scenario_options
@click.option("--detuning", "detunings", type=float, multiple=True,
              help="Scan omega_2 = Omega_2 over these values (one output file each).")
@click.option("--output", "-o", help="Output file (stdout when omitted).")
@click.option("--format", "output_format", type=click.Choice(("csv", "json")))
@click.option("--plot-script", is_flag=True, help="Also write a gnuplot script next to the output.")
@click.option("--eps-bsm", type=float, help="Success probability below which concurrence is undefined.")
@click.option("--bell", type=click.Choice(tuple(BELL_STATES)), help="Bell state of the photon measurement.")
@click.option("--workers", type=int, help="Threads used by the sweep.")
@_exit_on_error
def run_cmd(config_path, **flags):
    """Sweep concurrence versus measurement time t' for one scenario."""
    cfg = _run_config(config_path, flags)
    if cfg.plot_script and not cfg.output:
        raise ConfigError("--plot-script needs --output")
    scenario = _scenario_from(cfg)
    sweep_kwargs = dict(
        eps_bsm=cfg.eps_bsm,
        bell=BELL_STATES[cfg.bell],
        workers=cfg.workers,
        chunk_size=current_app.config["SWEEP_CHUNK"],
    )

    if cfg.detunings:
        if not cfg.output:
            raise ConfigError("a detuning scan writes one file per omega_2: --output is required")
        scans = detuning_scan(scenario, cfg.detunings, t_stop=scenario.grid.stop, **sweep_kwargs)
        outputs = [(_scan_path(cfg.output, w), f"omega_2 = {w:g}", series) for w, series in scans.items()]
    else:
        outputs = [(cfg.output, scenario.label, sweep(scenario, **sweep_kwargs))]

    for path, _, series in outputs:
        text = _render(series, cfg.output_format)
        if path is None:
            # stdout carries the data only
            click.echo(text, nl=False)
            for line in _summary_lines(series):
                logger.info("[cli] %s: %s", scenario.label, line)
            continue
        atomic_write(path, text)
        for line in _summary_lines(series):
            click.echo(f"{path}: {line}")

    if cfg.plot_script:
        stem = os.path.splitext(cfg.output)[0]
        if cfg.output_format == "json":
            logger.warning("[cli] plot script expects CSV data; %s is JSON", cfg.output)
        curves = [(os.path.basename(path), label) for path, label, _ in outputs]
        script = gnuplot_script(curves, os.path.basename(stem) + ".png", title=f"{scenario.label} ({cfg.model})")
        atomic_write(stem + ".gp", script)


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def export_figure(
    figure_id: int,
    output_dir: str,
    *,
    app_config: Mapping[str, Any],
    step: Optional[float] = None,
    **overrides,
) -> list[str]:
    """Sweep every curve of a figure; write one CSV per curve plus ``fig{N}.gp``.

    Returns the written paths.
    """
    curves = figure_curves(figure_id)
    step = step or app_config["T_STEP"]
    overrides = {k: v for k, v in overrides.items() if v is not None}

    written = []
    for curve in curves:
        scenario = curve_scenario(curve, step=step, **overrides)
        series = sweep(
            scenario,
            eps_bsm=app_config["BSM_EPSILON"],
            workers=app_config["SWEEP_WORKERS"],
            chunk_size=app_config["SWEEP_CHUNK"],
        )
        path = os.path.join(output_dir, curve.filename)
        atomic_write(path, series_to_csv(series, app_config["CSV_DIGITS"]))
        written.append(path)

    figure_no = curves[0].figure
    script = gnuplot_script(
        [(c.filename, c.title) for c in curves],
        f"fig{figure_no}.png",
        title=f"Figure {figure_no}: omega_2 = Omega_2 = {curves[0].omega2:g}, g = 0.2",
    )
    script_path = os.path.join(output_dir, f"fig{figure_no}.gp")
    atomic_write(script_path, script)
    written.append(script_path)
    logger.info("[cli] figure %d: %d curve(s) in %s", figure_no, len(curves), output_dir)
    return written


@sim_cli.command("figures")
@click.argument("figure_id", type=int)
@click.option("--output-dir", "-o", default="figures", show_default=True, type=click.Path(file_okay=False))
@click.option("--n-fock", type=click.IntRange(min=2))
@click.option("--qubit-convention", type=click.Choice(QUBIT_CONVENTIONS))
@click.option("--step", type=float, help="Grid step of t' (defaults to T_STEP).")
@_exit_on_error
def figures_cmd(figure_id, output_dir, n_fock, qubit_convention, step):
    """Reproduce the data of one figure (1 to 5)."""
    if step is not None and not step > 0:
        raise ConfigError("--step must be greater than 0")
    paths = export_figure(
        figure_id,
        output_dir,
        app_config=current_app.config,
        step=step,
        n_fock=n_fock,
        qubit_convention=qubit_convention,
    )
    for path in paths:
        click.echo(path)


# ---------------------------------------------------------------------------
# check-truncation
# ---------------------------------------------------------------------------

@sim_cli.command("check-truncation")
@_scenario_options
@click.option("--factor", type=int, help="Reference space size, as a multiple of n_fock.")
@click.option("--threshold", type=float, help="Largest tolerated leakage.")
@_exit_on_error
def check_truncation_cmd(config_path, factor, threshold, **flags):
    """Compare the run against a larger Fock space and report the leakage."""
    cfg = _run_config(config_path, flags)
    scenario = _scenario_from(cfg)
    factor = factor or current_app.config["TRUNCATION_FACTOR"]
    threshold = current_app.config["LEAKAGE_THRESHOLD"] if threshold is None else threshold

    report = check_scenario_truncation(scenario, factor=factor, threshold=threshold, step=cfg.t_step)

    click.echo(f"scenario: {scenario.label} ({cfg.model}), t' <= {scenario.grid.stop:g}")
    click.echo(f"fock levels: {report.n_fock} (reference {report.reference_levels})")
    click.echo(f"max leakage: {report.max_leakage:.3e}")
    click.echo(f"min fidelity: {report.min_fidelity:.9f}")
    click.echo(f"threshold: {report.threshold:g}")
    click.echo("PASS" if report.passed else "FAIL")
    if not report.passed:
        click.get_current_context().exit(EXIT_NUMERICAL)
