"""
Forms for scenario run configurations
"""
import math
import re

from django import forms
from django.conf import settings
from django.core.exceptions import ValidationError

from floquet.params import (
    ContinuumSpec,
    CouplingForm,
    LambShift,
    PoleMethod,
    SelfEnergy,
    SystemParams,
    default_cutoff,
    default_truncation,
)
from oracle.tdse import ResolutionError, check_resolution

from .presets import SCENARIO_CHOICES

SCHEMA_VERSION = 1

PHASE_PATTERN = re.compile(
    r'^(?P<sign>[+-])?\s*'
    r'(?P<coef>(?:\d+(?:\.\d*)?|\.\d+)(?:e[+-]?\d+)?)?\s*\*?\s*'
    r'(?P<pi>pi)?\s*'
    r'(?:/\s*(?P<den>\d+(?:\.\d*)?))?$'
)
INFINITY = {'inf', '+inf', 'infinity'}
SWITCH_VALUES = {
    'yes': True, 'true': True, 'on': True, '1': True,
    'no': False, 'false': False, 'off': False, '0': False,
}

TIME_UNIT_CHOICES = [
    ('phase', 'Drive phase omega*t'),
    ('absolute', 'Absolute time'),
]

GRID_SPAN = 15  # sidebands kept beyond |m| = a on either side
GRID_POINTS_PER_OMEGA = 20


def parse_phase(text):
    """
    Number or multiple of pi: '0.3', 'pi/2', '0.25*pi', '3pi/4', '-pi'.
    """
    cleaned = str(text).strip().lower().replace(' ', '')
    match = PHASE_PATTERN.match(cleaned)
    if not cleaned or not match or (match['coef'] is None and match['pi'] is None):
        raise ValueError(f"{text!r} is not a number or a multiple of pi")
    value = float(match['coef']) if match['coef'] is not None else 1.0
    if match['pi']:
        value *= math.pi
    if match['den'] is not None:
        denominator = float(match['den'])
        if denominator == 0:
            raise ValueError(f"{text!r} divides by zero")
        value /= denominator
    return -value if match['sign'] == '-' else value


def default_grid(params):
    """
    Sideband window delta0 +- (a + 15) omega, snapped to whole omega and
    clipped at zero, with 20 points per omega.
    """
    span = (params.a + GRID_SPAN) * params.omega
    lower = max(0.0, math.floor((params.delta0 - span) / params.omega) * params.omega)
    upper = math.ceil((params.delta0 + span) / params.omega) * params.omega
    count = int(round((upper - lower) / params.omega * GRID_POINTS_PER_OMEGA))
    return lower, upper, count


class PhaseField(forms.Field):
    def to_python(self, value):
        if value in self.empty_values:
            return None
        try:
            return parse_phase(value)
        except ValueError as exc:
            raise ValidationError(str(exc), code='invalid')


class TimeListField(forms.Field):
    """Comma-separated phases or times; 'inf' requests the stationary frame."""

    def to_python(self, value):
        if value in self.empty_values:
            return []
        values = []
        for item in str(value).split(','):
            item = item.strip()
            if not item:
                continue
            if item.lower() in INFINITY:
                values.append(math.inf)
                continue
            try:
                values.append(parse_phase(item))
            except ValueError as exc:
                raise ValidationError(str(exc), code='invalid')
        return values

    def validate(self, value):
        super().validate(value)
        if any(v < 0 for v in value):
            raise ValidationError("times must be >= 0", code='invalid')


class FloatListField(forms.Field):
    def to_python(self, value):
        if value in self.empty_values:
            return []
        try:
            return [float(item) for item in str(value).split(',') if item.strip()]
        except ValueError:
            raise ValidationError(f"{value!r} is not a comma-separated list of numbers", code='invalid')


class SwitchField(forms.Field):
    """
    Strict on/off flag. Django's BooleanField would read any unknown word as
    True, so only yes/no, true/false, on/off and 1/0 are accepted.
    """

    def __init__(self, *args, **kwargs):
        kwargs.setdefault('required', False)
        super().__init__(*args, **kwargs)

    def to_python(self, value):
        if value in self.empty_values:
            return None
        if isinstance(value, bool):
            return value
        key = str(value).strip().lower()
        if key not in SWITCH_VALUES:
            raise ValidationError(f"{value!r} is not one of yes/no, true/false, on/off, 1/0", code='invalid')
        return SWITCH_VALUES[key]


def _choices(text_choices):
    return [('', '')] + list(text_choices.choices)


class RunSpecForm(forms.Form):
    """
    Validates the raw [settings] values of a run configuration and fills
    the documented defaults.
    """
    schema_version = forms.IntegerField()
    scenario = forms.ChoiceField(choices=[('', '')] + SCENARIO_CHOICES, required=False)

    delta0 = forms.FloatField()
    omega = forms.FloatField()
    a = forms.FloatField()
    lam = forms.FloatField()
    theta = PhaseField(required=False)

    cutoff = forms.FloatField(required=False)
    coupling_form = forms.ChoiceField(choices=_choices(CouplingForm), required=False)
    lamb_shift = forms.ChoiceField(choices=_choices(LambShift), required=False)
    truncation = forms.IntegerField(required=False, min_value=0)

    grid_min = forms.FloatField(required=False)
    grid_max = forms.FloatField(required=False)
    grid_count = forms.IntegerField(required=False, min_value=2)
    times = TimeListField(required=False)
    time_unit = forms.ChoiceField(choices=[('', '')] + TIME_UNIT_CHOICES, required=False)

    branch_term = SwitchField()
    pole_method = forms.ChoiceField(choices=_choices(PoleMethod), required=False)
    self_energy = forms.ChoiceField(choices=_choices(SelfEnergy), required=False)
    normalization = SwitchField()

    oracle = SwitchField()
    oracle_modes = forms.IntegerField(required=False, min_value=1)
    oracle_dt = forms.FloatField(required=False)

    output_dir = forms.CharField(required=False)
    contour = SwitchField()
    scan_a = FloatListField(required=False)

    def clean_schema_version(self):
        version = self.cleaned_data.get('schema_version')
        if version != SCHEMA_VERSION:
            raise ValidationError(f"schema_version {SCHEMA_VERSION} required, got {version}")
        return version

    def clean_delta0(self):
        value = self.cleaned_data.get('delta0')
        if not value > 0:
            raise ValidationError("Δ0 > 0 required")
        return value

    def clean_omega(self):
        value = self.cleaned_data.get('omega')
        if not value > 0:
            raise ValidationError("ω > 0 required")
        return value

    def clean_a(self):
        value = self.cleaned_data.get('a')
        if value < 0:
            raise ValidationError("a ≥ 0 required")
        return value

    def clean_lam(self):
        value = self.cleaned_data.get('lam')
        if value < 0:
            raise ValidationError("λ ≥ 0 required")
        return value

    def clean_cutoff(self):
        value = self.cleaned_data.get('cutoff')
        if value is not None and not value > 0:
            raise ValidationError("cutoff > 0 required")
        return value

    def clean_oracle_dt(self):
        value = self.cleaned_data.get('oracle_dt')
        if value is not None and not value > 0:
            raise ValidationError("oracle_dt > 0 required")
        return value

    def clean_scan_a(self):
        values = self.cleaned_data.get('scan_a') or []
        if any(v < 0 for v in values):
            raise ValidationError("scan_a entries must be >= 0")
        return values

    def clean(self):
        cleaned_data = super().clean()
        # field errors already recorded; nothing to cross-check without the physics
        if any(name in self.errors for name in ('delta0', 'omega', 'a', 'lam', 'theta')):
            return cleaned_data

        cleaned_data['theta'] = cleaned_data.get('theta') or 0.0
        params = SystemParams(
            delta0=cleaned_data['delta0'],
            omega=cleaned_data['omega'],
            a=cleaned_data['a'],
            lam=cleaned_data['lam'],
            theta=cleaned_data['theta'],
        )
        cleaned_data['params'] = params

        # Fill the documented defaults
        for name, default in (
            ('coupling_form', CouplingForm.SQRT_OMEGA),
            ('lamb_shift', LambShift.FULL),
            ('time_unit', 'phase'),
            ('pole_method', PoleMethod.PERTURBATIVE),
            ('self_energy', SelfEnergy.DYNAMICAL),
        ):
            if not cleaned_data.get(name):
                cleaned_data[name] = default
        for name in ('branch_term', 'normalization', 'oracle', 'contour'):
            if cleaned_data.get(name) is None:
                cleaned_data[name] = False
        if cleaned_data.get('cutoff') is None:
            cleaned_data['cutoff'] = default_cutoff(params.delta0)
        if cleaned_data.get('truncation') is None:
            cleaned_data['truncation'] = default_truncation(params.a)
        if cleaned_data.get('oracle_modes') is None:
            cleaned_data['oracle_modes'] = getattr(settings, 'ORACLE_MODES', 4000)
        if cleaned_data.get('oracle_dt') is None:
            cleaned_data['oracle_dt'] = getattr(settings, 'ORACLE_DT', 0.005)
        cleaned_data['output_dir'] = cleaned_data.get('output_dir') or ''
        cleaned_data['scenario'] = cleaned_data.get('scenario') or ''

        cutoff = cleaned_data['cutoff']
        self._clean_truncation(cleaned_data, params, cutoff)
        self._clean_grid(cleaned_data, params, cutoff)
        self._clean_times(cleaned_data, params)
        if cleaned_data['oracle']:
            self._clean_oracle(cleaned_data, params, cutoff)
        return cleaned_data

    def _clean_truncation(self, cleaned_data, params, cutoff):
        M = cleaned_data['truncation']
        minimum = default_truncation(params.a)
        if M < minimum:
            self.add_error('truncation', f"truncation must be at least ceil(a) + pad = {minimum}")
            return
        try:
            spec = ContinuumSpec(
                cutoff=cutoff,
                coupling_form=cleaned_data['coupling_form'],
                lamb_shift=cleaned_data['lamb_shift'],
            )
            spec.check_band(params, M)
            for a in cleaned_data.get('scan_a') or []:
                spec.check_band(params.with_changes(a=a), default_truncation(a))
        except ValueError as exc:
            self.add_error('cutoff', str(exc))
            return
        cleaned_data['continuum'] = spec

    def _clean_grid(self, cleaned_data, params, cutoff):
        lower, upper, count = default_grid(params)
        if cleaned_data.get('grid_min') is not None:
            lower = cleaned_data['grid_min']
        if cleaned_data.get('grid_max') is not None:
            upper = cleaned_data['grid_max']
        if cleaned_data.get('grid_count') is not None:
            count = cleaned_data['grid_count']
        if lower < 0:
            self.add_error('grid_min', "grid_min >= 0 required")
        elif not upper > lower:
            self.add_error('grid_max', "grid_max > grid_min required")
        elif upper > cutoff:
            self.add_error('grid_max', "grid_max must not exceed the cutoff")
        cleaned_data['grid_min'], cleaned_data['grid_max'], cleaned_data['grid_count'] = lower, upper, count

    def _clean_times(self, cleaned_data, params):
        values = cleaned_data.get('times') or [math.inf]
        if cleaned_data['time_unit'] == 'phase':
            values = [v if math.isinf(v) else v / params.omega for v in values]
        # keep the requested order, drop repeats
        cleaned_data['times'] = list(dict.fromkeys(values))

    def _clean_oracle(self, cleaned_data, params, cutoff):
        try:
            spacing = check_resolution(params, cutoff, cleaned_data['oracle_modes'])
        except ResolutionError as exc:
            self.add_error('oracle_modes', str(exc))
            return
        horizon = math.pi / spacing
        finite = [t for t in cleaned_data['times'] if math.isfinite(t)]
        if finite and max(finite) >= horizon:
            self.add_error(
                'times',
                f"oracle times must stay below the recurrence time pi/dw = {horizon:.4g}",
            )
