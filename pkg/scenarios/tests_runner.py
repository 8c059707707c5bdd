import json
import math
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
import numpy as np
import pandas as pd

from floquet.analysis import excited_energy
from oracle.tdse import StepSizeError

from . import export
from .config import parse_config
from .context import run_oracle
from .convergence import (
    Criterion,
    below,
    convergence_report,
    decay_comparison,
    oracle_comparison,
    relative_change,
    truncation_doubling,
    unitarity_grid,
)
from .runner import run_cutoff_scan, run_scenario

LIGHT = {
    'delta0': '20',
    'omega': '1',
    'a': '2',
    'lam': '0.05',
    'times': 'pi, inf',
}


def light_run(**changes):
    return parse_config(overrides={**LIGHT, **changes})


def read_table(path):
    return pd.read_csv(path, comment='#')


def read_header(path):
    header = {}
    with open(path, encoding='utf-8') as handle:
        for line in handle:
            if not line.startswith('# '):
                break
            key, _, value = line[2:].partition(': ')
            header[key] = json.loads(value)
    return header


class OutputDirMixin:
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.out = Path(self.tmp.name)


class ExportTest(OutputDirMixin, SimpleTestCase):
    def test_json_is_deterministic(self):
        data = {'b': math.inf, 'a': np.float64(0.5), 'z': 1 + 2j, 'rows': np.arange(2)}
        text = export.dumps(data)
        self.assertEqual(text, export.dumps(dict(reversed(list(data.items())))))
        loaded = json.loads(text)
        self.assertEqual(loaded['b'], 'inf')
        self.assertEqual(loaded['z'], {'re': 1.0, 'im': 2.0})
        self.assertEqual(loaded['rows'], [0, 1])

    def test_table_header_round_trip(self):
        path = export.write_table(
            self.out / 'table.csv', {'x': [0.5, 1.5], 'y': [1.0, np.nan]}, {'run_spec': {'lam': 0.05}}
        )
        self.assertEqual(read_header(path), {'run_spec': {'lam': 0.05}})
        table = read_table(path)
        self.assertEqual(list(table.columns), ['x', 'y'])
        self.assertTrue(np.isnan(table['y'][1]))


class RunScenarioTest(OutputDirMixin, SimpleTestCase):
    def test_writes_every_output(self):
        run_spec = light_run()
        written = {path.name for path in run_scenario(run_spec, self.out)}
        for name in ('frame_stationary.csv', 'frame_wt_1pi.csv', 'sidebands_stationary.csv',
                     'survival.csv', 'summary.json', 'timing.json'):
            self.assertIn(name, written)

        table = read_table(self.out / 'frame_wt_1pi.csv')
        self.assertEqual(list(table.columns), ['omega_k', 'S', 'S_R', 'S_C', 'S_cross'])
        self.assertEqual(len(table), run_spec.grid.count)
        header = read_header(self.out / 'frame_wt_1pi.csv')
        self.assertEqual(header['run_spec']['params']['delta0'], 20.0)
        self.assertAlmostEqual(header['frame']['omega_t'], math.pi)

    def test_summary(self):
        run_spec = light_run()
        run_scenario(run_spec, self.out)
        summary = json.loads((self.out / 'summary.json').read_text())
        self.assertEqual(summary['truncation'], 22)
        self.assertEqual(len(summary['poles']), 45)
        self.assertTrue(all(pole['im_z'] <= 0 for pole in summary['poles']))
        self.assertTrue(summary['certificates']['truncation_doubling']['passed'])
        self.assertEqual(summary['frames'][-1]['label'], 'stationary')
        self.assertNotIn('seconds', summary)

    def test_sideband_table_sits_on_the_ladder(self):
        run_scenario(light_run(lamb_shift='imaginary_only'), self.out)
        table = read_table(self.out / 'sidebands_stationary.csv')
        strong = table[table['bessel_weight'] > 0.1]
        self.assertTrue(len(strong))
        self.assertTrue((strong['located'] == 1).all())
        self.assertLess(np.max(np.abs(strong['center'] - (20.0 + strong['m']))), 0.25)

    def test_reruns_are_byte_identical(self):
        first, second = self.out / 'first', self.out / 'second'
        run_scenario(light_run(), first)
        run_scenario(light_run(), second)
        for name in ('summary.json', 'frame_stationary.csv', 'frame_wt_1pi.csv', 'survival.csv'):
            self.assertEqual((first / name).read_bytes(), (second / name).read_bytes())

    def test_contour_table(self):
        run_spec = light_run(times='0, pi/2, pi', contour='on', branch_term='on')
        run_scenario(run_spec, self.out)
        table = read_table(self.out / 'contour.csv')
        self.assertEqual(list(table.columns), ['t', 'omega_t', 'omega_k', 'S', 'E_e'])
        self.assertEqual(len(table), 3 * run_spec.grid.count)
        late = table[table['t'] == table['t'].max()]
        self.assertAlmostEqual(late['E_e'].iloc[0], excited_energy(math.pi, run_spec.params))

    def test_survival_curve(self):
        run_scenario(light_run(), self.out)
        table = read_table(self.out / 'survival.csv')
        self.assertEqual(list(table.columns), ['t', 'omega_t', 'survival'])
        self.assertAlmostEqual(table['survival'].iloc[0], 1.0, delta=1e-12)
        self.assertTrue((np.diff(table['survival']) < 1e-9).all())

    def test_cutoff_grows_linearly_with_amplitude(self):
        result, _ = run_cutoff_scan(parse_config(scenario='cutoff_scan'), self.out, {})
        cutoffs = [row['cutoff_index'] for row in result['rows']]
        self.assertEqual(cutoffs, sorted(cutoffs))
        self.assertGreaterEqual(result['slope'], 0.8)
        self.assertLessEqual(result['slope'], 1.3)
        self.assertGreater(result['r_squared'], 0.95)
        self.assertTrue(result['linear_preferred'])

    def test_oracle_columns(self):
        run_spec = light_run(times='pi', cutoff='60', oracle='on', oracle_modes='2000', oracle_dt='0.0025')
        run_scenario(run_spec, self.out)
        table = read_table(self.out / 'frame_wt_1pi.csv')
        self.assertIn('S_oracle', table.columns)
        self.assertTrue(np.isfinite(table['S_oracle']).all())
        survival = read_table(self.out / 'survival.csv')
        self.assertIn('oracle', survival.columns)
        summary = json.loads((self.out / 'summary.json').read_text())
        self.assertLess(summary['oracle']['norm_drift'], 1e-8)
        self.assertEqual(summary['oracle']['n_modes'], 2000)


class ConvergenceTest(OutputDirMixin, SimpleTestCase):
    def test_relative_change(self):
        self.assertEqual(relative_change([1.0, 2.0], [1.0, 2.0]), 0.0)
        self.assertAlmostEqual(relative_change([1.0, 2.0], [1.1, 2.0]), 0.1)
        self.assertEqual(relative_change([0.0, 0.0], [0.0, 0.0]), 0.0)

    def test_criterion_threshold(self):
        self.assertTrue(below('x', 1e-7, 1e-6).passed)
        self.assertFalse(below('x', 1e-5, 1e-6).passed)
        self.assertFalse(below('x', math.nan, 1e-6).passed)

    def test_unitarity_grid_avoids_thresholds(self):
        grid = unitarity_grid(light_run().params, 200.0, 0.3)
        self.assertEqual(len(grid), 200 * 34)
        self.assertGreater(np.min(np.abs(grid - np.round(grid))), 1e-3)

    def test_truncation_doubling(self):
        criterion = truncation_doubling(light_run())
        self.assertIsInstance(criterion, Criterion)
        self.assertTrue(criterion.passed)
        self.assertLess(criterion.measured, 1e-6)

    def test_truncation_doubling_outside_the_band(self):
        criterion = truncation_doubling(light_run(cutoff='50'))
        self.assertFalse(criterion.passed)
        self.assertFalse(criterion.certifying)

    def test_uncoupled_run_is_trivial(self):
        path, report = convergence_report(light_run(lam='0'), self.out)
        self.assertTrue(path.exists())
        self.assertTrue(report['trivial'])
        self.assertTrue(report['certified'])
        self.assertEqual([c['name'] for c in report['criteria']], ['uncoupled_spectra_vanish'])

    def test_report_lists_each_criterion(self):
        _, report = convergence_report(light_run(), self.out)
        names = [c['name'] for c in report['criteria']]
        for name in ('truncation_doubling', 'grid_doubling', 'unitarity', 'cancellation_t0', 'envelope_correlation'):
            self.assertIn(name, names)
        self.assertFalse(report['trivial'])


class ReferenceOracleTest(SimpleTestCase):
    """Oracle checks on the decay preset at the reference drive"""

    def setUp(self):
        self.run_spec = parse_config(scenario='decay')

    def test_preset_step_certifies(self):
        trajectory = run_oracle(self.run_spec).trajectory
        self.assertLess(trajectory.step_change, 1e-8)
        self.assertLess(trajectory.norm_drift, 1e-8)

    def test_decay_rates_match_the_poles(self):
        criteria = decay_comparison(self.run_spec)
        self.assertEqual([c.name for c in criteria], ['decay_rate_a0', 'decay_rate_a10'])
        for criterion in criteria:
            self.assertTrue(criterion.passed, criterion.note)

    def test_spectrum_comparison_covers_each_time(self):
        criteria = {c.name: c for c in oracle_comparison(self.run_spec)}
        for label in ('wt_1pi', 'wt_2pi', 'wt_4pi'):
            measured = criteria[f'oracle_spectrum_{label}'].measured
            self.assertTrue(np.isfinite(measured))
        self.assertTrue(criteria['oracle_norm_drift'].passed)
        self.assertIn('oracle_mode_doubling', criteria)


class CommandTest(OutputDirMixin, SimpleTestCase):
    def write_config(self):
        lines = ['[settings]', 'schema_version = 1'] + [f'{k} = {v}' for k, v in LIGHT.items()]
        path = self.out / 'light.ini'
        path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
        return path

    def test_runs_a_config(self):
        stdout = StringIO()
        call_command('run_scenario', '--config', str(self.write_config()), '--out', str(self.out / 'run'), stdout=stdout)
        self.assertIn('files written', stdout.getvalue())
        self.assertTrue((self.out / 'run' / 'summary.json').exists())

    def test_missing_source_is_a_config_error(self):
        with self.assertRaises(CommandError) as caught:
            call_command('run_scenario')
        self.assertEqual(caught.exception.returncode, 2)

    def test_invalid_override_is_a_config_error(self):
        with self.assertRaises(CommandError) as caught:
            call_command('run_scenario', '--scenario', 'fig2a', '--override', 'omega=0')
        self.assertEqual(caught.exception.returncode, 2)
        self.assertIn('ω > 0 required', str(caught.exception))

    def test_numerical_failure(self):
        with mock.patch(
            'scenarios.management.commands.run_scenario.run_scenario',
            side_effect=StepSizeError("halving dt changed c_d"),
        ):
            with self.assertRaises(CommandError) as caught:
                call_command('run_scenario', '--config', str(self.write_config()))
        self.assertEqual(caught.exception.returncode, 3)

    def test_uncertified_convergence(self):
        report = {'certified': False, 'criteria': [{'name': 'unitarity', 'certifying': True, 'passed': False}]}
        with mock.patch('scenarios.management.commands.run_scenario.run_scenario', return_value=[]), \
                mock.patch('scenarios.management.commands.run_scenario.convergence_report',
                           return_value=(self.out / 'convergence_report.json', report)):
            with self.assertRaises(CommandError) as caught:
                call_command('convergence_report', '--config', str(self.write_config()), '--out', str(self.out))
        self.assertEqual(caught.exception.returncode, 3)
        self.assertIn('unitarity', str(caught.exception))

    def test_unwritable_output(self):
        blocker = self.out / 'blocker'
        blocker.write_text('not a directory')
        with self.assertRaises(CommandError) as caught:
            call_command('run_scenario', '--config', str(self.write_config()), '--out', str(blocker))
        self.assertEqual(caught.exception.returncode, 4)
