"""
Run configuration — TOML file + command-line flags merged over the app
config defaults, validated with a WTForms form.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from typing import Any, Mapping, Optional

from werkzeug.datastructures import MultiDict
from wtforms import BooleanField, FloatField, Form, IntegerField, SelectField, StringField
from wtforms.validators import DataRequired, NumberRange, Optional as OptionalValue, ValidationError

from app.errors import ConfigError
from app.experiments.services import CUSTOM_LABEL, known_labels
from app.models import MODELS, QUBIT_CONVENTIONS, InitialState
from app.swap.services import BELL_STATES

OUTPUT_FORMATS = ("csv", "json")

CUSTOM_KEYS = ("qubit1", "photons1", "qubit2", "photons2")
RUN_KEYS = (
    "scenario", "model", "qubit_convention", "n_fock", "coupling", "omega1", "omega2",
    "t_start", "t_stop", "t_step", "detunings", "output", "output_format", "plot_script",
    "eps_bsm", "bell", "workers",
)


def _positive(form, field):
    if field.data is not None and not field.data > 0:
        raise ValidationError("Must be greater than 0.")


class RunConfigForm(Form):
    scenario = StringField("Scenario", validators=[DataRequired(message="A scenario label is required.")])
    model = SelectField("Model", choices=[(m, m) for m in MODELS])
    qubit_convention = SelectField("Qubit convention", choices=[(c, c) for c in QUBIT_CONVENTIONS])
    n_fock = IntegerField("Fock levels", validators=[NumberRange(min=2)])
    coupling = FloatField("Coupling g", validators=[NumberRange(min=0)])
    omega1 = FloatField("omega_1", validators=[_positive])
    omega2 = FloatField("omega_2", validators=[OptionalValue(), _positive])
    t_start = FloatField("t' start", validators=[NumberRange(min=0)])
    t_stop = FloatField("t' stop", validators=[OptionalValue()])
    t_step = FloatField("t' step", validators=[_positive])
    detunings = StringField("omega_2 scan", validators=[OptionalValue()])
    output = StringField("Output path", validators=[OptionalValue()])
    output_format = SelectField("Output format", choices=[(f, f) for f in OUTPUT_FORMATS])
    plot_script = BooleanField("Emit plot script", false_values=("false", "", "0", "no"))
    eps_bsm = FloatField("BSM epsilon", validators=[NumberRange(min=0)])
    bell = SelectField("Bell state", choices=[(b, b) for b in BELL_STATES])
    workers = IntegerField("Workers", validators=[NumberRange(min=1)])

    def validate_scenario(self, field):
        if field.data not in known_labels():
            raise ValidationError(
                f"unknown scenario label {field.data!r} (known: {', '.join(known_labels())})"
            )

    def validate_t_stop(self, field):
        if self.t_start.data is not None and field.data is not None and field.data < self.t_start.data:
            raise ValidationError("Must not lie before t' start.")

    def validate_detunings(self, field):
        try:
            values = _parse_float_list(field.data)
        except ValueError:
            raise ValidationError("Must be a comma-separated list of numbers.") from None
        if any(v <= 0 for v in values):
            raise ValidationError("Every omega_2 must be greater than 0.")


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    model: str
    qubit_convention: str
    n_fock: int
    coupling: float
    omega1: float
    omega2: Optional[float]
    t_start: float
    t_stop: Optional[float]
    t_step: float
    detunings: tuple[float, ...]
    output: Optional[str]
    output_format: str
    plot_script: bool
    eps_bsm: float
    bell: str
    workers: int
    state1: Optional[InitialState] = None
    state2: Optional[InitialState] = None


def _parse_float_list(raw) -> list[float]:
    if not raw:
        return []
    return [float(x) for x in str(raw).replace(";", ",").split(",") if x.strip()]


def _parse_amplitudes(values, key: str) -> tuple[complex, ...]:
    if not isinstance(values, list) or not values:
        raise ConfigError(f"[custom] {key} must be a non-empty list")
    try:
        return tuple(complex(str(v).replace(" ", "")) for v in values)
    except ValueError:
        raise ConfigError(f"[custom] {key} holds a value that is not a number") from None


def _custom_states(section: Mapping[str, Any]) -> tuple[InitialState, InitialState]:
    unknown = set(section) - set(CUSTOM_KEYS)
    missing = [k for k in CUSTOM_KEYS if k not in section]
    if unknown:
        raise ConfigError(f"unknown key(s) in [custom]: {', '.join(sorted(unknown))}")
    if missing:
        raise ConfigError(f"missing key(s) in [custom]: {', '.join(missing)}")
    amps = {k: _parse_amplitudes(section[k], k) for k in CUSTOM_KEYS}
    return (
        InitialState(amps["qubit1"], amps["photons1"]),
        InitialState(amps["qubit2"], amps["photons2"]),
    )


def config_defaults(app_config: Mapping[str, Any]) -> dict[str, Any]:
    return {
        "model": "rabi",
        "qubit_convention": app_config["QUBIT_CONVENTION"],
        "n_fock": app_config["FOCK_LEVELS"],
        "coupling": app_config["COUPLING"],
        "omega1": 1.0,
        "t_start": app_config["T_START"],
        "t_step": app_config["T_STEP"],
        "output_format": "csv",
        "eps_bsm": app_config["BSM_EPSILON"],
        "bell": "psi-",
        "workers": app_config["SWEEP_WORKERS"],
    }


def _as_form_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else ""
    if isinstance(value, (list, tuple)):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_config_file(path: str) -> tuple[dict[str, Any], Optional[dict[str, Any]]]:
    """Return the ``[run]`` and ``[custom]`` sections of a TOML run file."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from None

    unknown_sections = set(data) - {"run", "custom"}
    if unknown_sections:
        raise ConfigError(f"unknown section(s) in {path}: {', '.join(sorted(unknown_sections))}")
    run = dict(data.get("run", {}))
    unknown_keys = set(run) - set(RUN_KEYS)
    if unknown_keys:
        raise ConfigError(f"unknown key(s) in [run]: {', '.join(sorted(unknown_keys))}")
    return run, data.get("custom")


def load_run_config(
    app_config: Mapping[str, Any],
    path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """Merge defaults < file < flags, validate, and return a RunConfig.

    Raises ConfigError listing every invalid field.
    """
    merged = config_defaults(app_config)
    custom = None
    if path:
        run, custom = read_config_file(path)
        merged.update(run)
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    formdata = MultiDict({k: _as_form_value(v) for k, v in merged.items() if v is not None})
    form = RunConfigForm(formdata)
    if not form.validate():
        problems = [f"{name}: {' '.join(errors)}" for name, errors in form.errors.items()]
        raise ConfigError("invalid run configuration: " + "; ".join(problems))

    state1 = state2 = None
    if form.scenario.data == CUSTOM_LABEL:
        if not custom:
            raise ConfigError("scenario 'custom' needs a [custom] section in the config file")
        state1, state2 = _custom_states(custom)
    elif custom:
        raise ConfigError(f"[custom] section given but scenario is {form.scenario.data!r}")

    return RunConfig(
        scenario=form.scenario.data,
        model=form.model.data,
        qubit_convention=form.qubit_convention.data,
        n_fock=form.n_fock.data,
        coupling=form.coupling.data,
        omega1=form.omega1.data,
        omega2=form.omega2.data,
        t_start=form.t_start.data,
        t_stop=form.t_stop.data,
        t_step=form.t_step.data,
        detunings=tuple(_parse_float_list(form.detunings.data)),
        output=form.output.data or None,
        output_format=form.output_format.data,
        plot_script=bool(form.plot_script.data),
        eps_bsm=form.eps_bsm.data,
        bell=form.bell.data,
        workers=form.workers.data,
        state1=state1,
        state2=state2,
    )
