import math
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from floquet.params import LambShift

from .config import ConfigError, merge_values, parse_config, parse_override
from .forms import default_grid, parse_phase
from .presets import PRESETS

MINIMAL = """\
[settings]
schema_version = 1
delta0 = 20
omega = 1
a = 10
lam = 0.06
theta = 0
"""


class ConfigFileMixin:
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, text, name='run.ini'):
        path = Path(self.tmp.name) / name
        path.write_text(text, encoding='utf-8')
        return path


class ParsePhaseTest(SimpleTestCase):
    def test_multiples_of_pi(self):
        self.assertAlmostEqual(parse_phase('pi/2'), math.pi / 2)
        self.assertAlmostEqual(parse_phase('0.25*pi'), math.pi / 4)
        self.assertAlmostEqual(parse_phase('3pi/4'), 0.75 * math.pi)
        self.assertAlmostEqual(parse_phase('-pi'), -math.pi)
        self.assertAlmostEqual(parse_phase(' 2 PI '), 2 * math.pi)

    def test_plain_numbers(self):
        self.assertEqual(parse_phase('0.4'), 0.4)
        self.assertEqual(parse_phase('1e-3'), 1e-3)
        self.assertEqual(parse_phase('7/2'), 3.5)

    def test_rejects_other_text(self):
        for text in ('', 'tau', 'pi/0', '1.2.3'):
            with self.assertRaises(ValueError):
                parse_phase(text)


class DefaultGridTest(SimpleTestCase):
    def test_reference_drive(self):
        params = parse_config(scenario='fig2a').params
        self.assertEqual(default_grid(params), (0.0, 45.0, 900))

    def test_window_tracks_the_drive(self):
        params = parse_config(scenario='fig2a', overrides={'a': '2'}).params
        self.assertEqual(default_grid(params), (3.0, 37.0, 680))


class ParseConfigTest(ConfigFileMixin, SimpleTestCase):
    def test_minimal_config_defaults(self):
        run_spec = parse_config(self.write(MINIMAL))
        self.assertEqual(run_spec.params.delta0, 20.0)
        self.assertEqual(run_spec.continuum.cutoff, 200.0)
        self.assertEqual(run_spec.continuum.lamb_shift, LambShift.FULL)
        self.assertEqual(run_spec.truncation, 30)
        self.assertFalse(run_spec.branch_term)
        self.assertFalse(run_spec.oracle)
        self.assertEqual(run_spec.times, (math.inf,))
        self.assertEqual((run_spec.grid.lower, run_spec.grid.upper, run_spec.grid.count), (0.0, 45.0, 900))

    def test_zero_frequency_is_rejected(self):
        path = self.write(MINIMAL.replace('omega = 1', 'omega = 0'))
        with self.assertRaisesMessage(ConfigError, "ω > 0 required"):
            parse_config(path)

    def test_every_field_error_is_reported(self):
        text = MINIMAL.replace('omega = 1', 'omega = -1').replace('lam = 0.06', 'lam = -0.1')
        with self.assertRaises(ConfigError) as caught:
            parse_config(self.write(text))
        self.assertIn('omega', str(caught.exception))
        self.assertIn('lam', str(caught.exception))

    def test_unknown_key_names_its_line(self):
        path = self.write(MINIMAL + 'lamda = 0.05\n')
        with self.assertRaises(ConfigError) as caught:
            parse_config(path)
        self.assertIn('line 8', str(caught.exception))
        self.assertIn('lamda', str(caught.exception))

    def test_duplicate_key_names_its_line(self):
        path = self.write(MINIMAL + 'a = 3\n')
        with self.assertRaisesMessage(ConfigError, 'line 8'):
            parse_config(path)

    def test_missing_section_header(self):
        path = self.write('delta0 = 20\n')
        with self.assertRaisesMessage(ConfigError, 'line 1'):
            parse_config(path)

    def test_other_sections_are_rejected(self):
        path = self.write(MINIMAL + '[extra]\nfoo = 1\n')
        with self.assertRaisesMessage(ConfigError, 'unknown section'):
            parse_config(path)

    def test_missing_file(self):
        with self.assertRaisesMessage(ConfigError, 'not found'):
            parse_config(Path(self.tmp.name) / 'absent.ini')

    def test_schema_version_is_required(self):
        path = self.write(MINIMAL.replace('schema_version = 1\n', ''))
        with self.assertRaisesMessage(ConfigError, 'schema_version'):
            parse_config(path)
        path = self.write(MINIMAL.replace('schema_version = 1', 'schema_version = 2'))
        with self.assertRaisesMessage(ConfigError, 'schema_version'):
            parse_config(path)

    def test_phase_expressions_and_switches(self):
        text = MINIMAL.replace('theta = 0', 'theta = pi/2') + 'branch_term = yes\ntimes = pi/4, 2pi, inf\n'
        run_spec = parse_config(self.write(text))
        self.assertAlmostEqual(run_spec.params.theta, math.pi / 2)
        self.assertTrue(run_spec.branch_term)
        self.assertEqual(len(run_spec.times), 3)
        self.assertAlmostEqual(run_spec.times[1], 2 * math.pi)
        self.assertTrue(math.isinf(run_spec.times[2]))

    def test_absolute_times(self):
        text = MINIMAL.replace('omega = 1', 'omega = 2') + 'time_unit = absolute\ntimes = 1.5\n'
        self.assertEqual(parse_config(self.write(text)).times, (1.5,))
        text = MINIMAL.replace('omega = 1', 'omega = 2') + 'times = pi\n'
        self.assertAlmostEqual(parse_config(self.write(text)).times[0], math.pi / 2)

    def test_strict_switch_values(self):
        path = self.write(MINIMAL + 'branch_term = maybe\n')
        with self.assertRaisesMessage(ConfigError, 'branch_term'):
            parse_config(path)

    def test_negative_times_are_rejected(self):
        path = self.write(MINIMAL + 'times = -pi\n')
        with self.assertRaisesMessage(ConfigError, 'times'):
            parse_config(path)

    def test_truncation_floor(self):
        path = self.write(MINIMAL + 'truncation = 12\n')
        with self.assertRaisesMessage(ConfigError, 'truncation'):
            parse_config(path)

    def test_cutoff_must_hold_every_sideband(self):
        path = self.write(MINIMAL + 'cutoff = 40\n')
        with self.assertRaisesMessage(ConfigError, 'cutoff'):
            parse_config(path)

    def test_grid_inside_band(self):
        path = self.write(MINIMAL + 'grid_min = 30\ngrid_max = 10\n')
        with self.assertRaisesMessage(ConfigError, 'grid_max'):
            parse_config(path)

    def test_oracle_resolution_is_checked(self):
        path = self.write(MINIMAL + 'oracle = on\noracle_modes = 1000\n')
        with self.assertRaisesMessage(ConfigError, 'omega/20'):
            parse_config(path)

    def test_oracle_recurrence_is_checked(self):
        path = self.write(MINIMAL + 'oracle = on\ntime_unit = absolute\ntimes = 70\n')
        with self.assertRaisesMessage(ConfigError, 'recurrence'):
            parse_config(path)


class PresetTest(ConfigFileMixin, SimpleTestCase):
    def test_fig2a_expands_to_reference_drive(self):
        run_spec = parse_config(scenario='fig2a')
        params = run_spec.params
        self.assertEqual(
            (params.delta0, params.omega, params.a, params.lam, params.theta),
            (20.0, 1.0, 10.0, 0.06, 0.0),
        )
        self.assertEqual(run_spec.continuum.lamb_shift, LambShift.IMAGINARY_ONLY)
        self.assertEqual(run_spec.scenario, 'fig2a')

    def test_fig2b_turns_the_phase(self):
        self.assertAlmostEqual(parse_config(scenario='fig2b').params.theta, math.pi / 2)

    def test_fig3_frames(self):
        times = parse_config(scenario='fig3').times
        np_times = [t / math.pi for t in times[:4]]
        for got, expected in zip(np_times, [0.25, 0.5, 1.0, 2.0]):
            self.assertAlmostEqual(got, expected)
        self.assertTrue(math.isinf(times[-1]))

    def test_fig4_time_series(self):
        run_spec = parse_config(scenario='fig4b')
        self.assertTrue(run_spec.contour)
        self.assertEqual(len(run_spec.finite_times), 49)
        self.assertAlmostEqual(run_spec.finite_times[-1], 6 * math.pi)

    def test_every_preset_validates(self):
        for name in PRESETS:
            with self.subTest(name=name):
                self.assertEqual(parse_config(scenario=name).scenario, name)

    def test_cutoff_scan_amplitudes(self):
        run_spec = parse_config(scenario='cutoff_scan')
        self.assertEqual(run_spec.scan_a, (5.0, 10.0, 15.0))
        wide = run_spec.for_drive(15.0)
        self.assertEqual(wide.truncation, 35)
        self.assertEqual(wide.params.a, 15.0)

    def test_layering(self):
        path = self.write('[settings]\nschema_version = 1\nscenario = fig2a\nlam = 0.05\n')
        self.assertEqual(parse_config(path).params.lam, 0.05)
        self.assertEqual(parse_config(path, overrides=['lam=0.04']).params.lam, 0.04)
        self.assertEqual(parse_config(path).params.a, 10.0)

    def test_unknown_scenario(self):
        with self.assertRaisesMessage(ConfigError, 'unknown scenario'):
            merge_values(scenario='fig9')

    def test_override_syntax(self):
        self.assertEqual(parse_override('LAM = 0.05'), ('lam', '0.05'))
        with self.assertRaises(ConfigError):
            parse_override('lam')
        with self.assertRaisesMessage(ConfigError, 'unknown key'):
            parse_override('gamma=1')

    def test_nothing_to_run(self):
        with self.assertRaises(ConfigError):
            parse_config()
