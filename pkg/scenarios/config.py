"""
Run configurations: INI files with a single [settings] section.

    [settings]
    schema_version = 1
    scenario = fig3
    lam = 0.05
    times = pi/4, pi/2, inf

Values are layered preset < file < overrides and validated by RunSpecForm.
"""
import configparser
import logging
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from decouple import RepositoryIni

from floquet.amplitudes import AmplitudeOptions, spectral_grid
from floquet.branch import BranchQuadSpec
from floquet.params import ContinuumSpec, SystemParams, default_truncation

from .forms import SCHEMA_VERSION, RunSpecForm, default_grid
from .presets import PRESETS, expand_scenario

logger = logging.getLogger(__name__)

SECTION = RepositoryIni.SECTION


class ConfigError(ValueError):
    """Unreadable, malformed or invalid run configuration."""


@dataclass(frozen=True)
class GridSpec:
    lower: float
    upper: float
    count: int

    def points(self):
        return spectral_grid(self.lower, self.upper, self.count)

    def refined(self, factor=2):
        return GridSpec(self.lower, self.upper, self.count * factor)

    def as_dict(self):
        return {'lower': self.lower, 'upper': self.upper, 'count': self.count}


@dataclass(frozen=True)
class RunSpec:
    """A fully validated run: physics, numerics and requested outputs."""
    params: SystemParams
    continuum: ContinuumSpec
    truncation: int
    grid: GridSpec
    times: tuple = (math.inf,)
    scenario: str = ''
    branch_term: bool = False
    pole_method: str = 'perturbative'
    self_energy: str = 'dynamical'
    normalization: bool = False
    oracle: bool = False
    oracle_modes: int = 4000
    oracle_dt: float = 0.005
    output_dir: str = ''
    contour: bool = False
    scan_a: tuple = field(default_factory=tuple)

    @property
    def finite_times(self):
        return tuple(t for t in self.times if math.isfinite(t))

    def amplitude_options(self):
        return AmplitudeOptions(
            branch_term=self.branch_term,
            self_energy=self.self_energy,
            normalization=self.normalization,
            quadrature=BranchQuadSpec(),
        )

    def for_drive(self, a):
        """The same run at drive amplitude a with its default truncation and grid."""
        params = self.params.with_changes(a=a)
        return replace(
            self,
            params=params,
            truncation=max(self.truncation, default_truncation(a)),
            grid=GridSpec(*default_grid(params)),
            scan_a=(),
        )

    def as_dict(self):
        return {
            'scenario': self.scenario,
            'params': self.params.as_dict(),
            'continuum': self.continuum.as_dict(),
            'truncation': self.truncation,
            'grid': self.grid.as_dict(),
            # JSON has no infinity
            'times': [t if math.isfinite(t) else 'inf' for t in self.times],
            'branch_term': self.branch_term,
            'pole_method': str(self.pole_method),
            'self_energy': str(self.self_energy),
            'normalization': self.normalization,
            'oracle': self.oracle,
            'oracle_modes': self.oracle_modes,
            'oracle_dt': self.oracle_dt,
            'contour': self.contour,
            'scan_a': list(self.scan_a),
        }


def _line_of(path, key):
    pattern = re.compile(rf'^\s*{re.escape(key)}\s*[=:]', re.IGNORECASE)
    with open(path, encoding='utf-8') as handle:
        for number, line in enumerate(handle, start=1):
            if pattern.match(line):
                return number
    return None


def _parser_error(path, exc):
    line = getattr(exc, 'lineno', None)
    if line is None and getattr(exc, 'errors', None):
        line = exc.errors[0][0]
    message = getattr(exc, 'message', str(exc)).splitlines()[0]
    where = f"{path}, line {line}" if line else str(path)
    return ConfigError(f"{where}: {message}")


def read_config_file(path):
    """Raw key/value strings of the [settings] section."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} not found")
    try:
        repository = RepositoryIni(str(path))
    except configparser.Error as exc:
        raise _parser_error(path, exc) from exc

    sections = repository.parser.sections()
    if SECTION not in sections:
        raise ConfigError(f"{path}: missing [{SECTION}] section")
    extra = [name for name in sections if name != SECTION]
    if extra:
        raise ConfigError(f"{path}: unknown section [{extra[0]}]")

    values = dict(repository.parser.items(SECTION, raw=True))
    unknown = sorted(set(values) - set(RunSpecForm.base_fields))
    if unknown:
        messages = []
        for key in unknown:
            line = _line_of(path, key)
            messages.append(f"{path}, line {line}: unknown key {key!r}" if line else f"{path}: unknown key {key!r}")
        raise ConfigError('; '.join(messages))
    return values


def parse_override(text):
    """'key=value' from the command line."""
    key, sep, value = str(text).partition('=')
    key = key.strip().lower()
    if not sep or not key:
        raise ConfigError(f"override {text!r} must look like KEY=VALUE")
    if key not in RunSpecForm.base_fields:
        raise ConfigError(f"override {text!r}: unknown key {key!r}")
    return key, value.strip()


def merge_values(file_values=None, overrides=None, scenario=None):
    """
    Layer preset, file values and overrides; later layers win. Without a
    file the current schema_version is implied.
    """
    from_file = file_values is not None
    file_values = dict(file_values or {})
    overrides = dict(overrides or {})
    name = overrides.get('scenario') or scenario or file_values.get('scenario')
    values = {} if from_file else {'schema_version': str(SCHEMA_VERSION)}
    if name:
        if name not in PRESETS:
            raise ConfigError(f"unknown scenario {name!r}; choose from {', '.join(PRESETS)}")
        values.update(expand_scenario(name))
    values.update(file_values)
    values.update(overrides)
    if name:
        values['scenario'] = name
    return values


def build_run_spec(values):
    """Validate raw values; every field error is reported."""
    form = RunSpecForm(data=values)
    if not form.is_valid():
        messages = [
            f"{name}: {message}" if name != '__all__' else message
            for name, errors in form.errors.items()
            for message in errors
        ]
        raise ConfigError('invalid run configuration: ' + '; '.join(messages))

    data = form.cleaned_data
    run_spec = RunSpec(
        params=data['params'],
        continuum=data['continuum'],
        truncation=data['truncation'],
        grid=GridSpec(data['grid_min'], data['grid_max'], data['grid_count']),
        times=tuple(data['times']),
        scenario=data['scenario'],
        branch_term=data['branch_term'],
        pole_method=data['pole_method'],
        self_energy=data['self_energy'],
        normalization=data['normalization'],
        oracle=data['oracle'],
        oracle_modes=data['oracle_modes'],
        oracle_dt=data['oracle_dt'],
        output_dir=data['output_dir'],
        contour=data['contour'],
        scan_a=tuple(data['scan_a']),
    )
    run_spec.params.check_weak_coupling()
    logger.debug("validated run configuration %s", run_spec.as_dict())
    return run_spec


def parse_config(path=None, overrides=None, scenario=None):
    """
    RunSpec from a config file, a named scenario, or both. `overrides` is a
    mapping or a sequence of 'KEY=VALUE' strings.
    """
    if path is None and not scenario and not overrides:
        raise ConfigError("either a config file or a scenario is required")
    if overrides and not isinstance(overrides, dict):
        overrides = dict(parse_override(item) for item in overrides)
    file_values = read_config_file(path) if path is not None else None
    return build_run_spec(merge_values(file_values, overrides, scenario))
