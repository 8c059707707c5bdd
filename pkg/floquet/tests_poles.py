from unittest import mock

from django.test import SimpleTestCase
import numpy as np

from .bessel import bessel_row
from .continuum import dyn_self_energy
from .params import ContinuumSpec, LambShift, PoleMethod, Sheet, SystemParams, reference_params
from .poles import PoleConvergenceError, pole_ladder, pole_residue, resonance_pole


class ResonancePoleTest(SimpleTestCase):
    def setUp(self):
        self.params = reference_params()
        self.spec = ContinuumSpec(cutoff=200.0)
        self.row = bessel_row(self.params.a, 30)

    def test_uncoupled_pole(self):
        params = self.params.with_changes(lam=0.0)
        pole = resonance_pole(0, params, self.spec, self.row)
        self.assertEqual(pole.z, 20.0)
        self.assertEqual(pole.gamma, 0.0)

    def test_undriven_golden_rule_rate(self):
        """With a = 0 and the imaginary-only shift the rate is 2 pi lam^2 delta0"""
        params = self.params.with_changes(a=0.0)
        spec = self.spec.with_changes(lamb_shift=LambShift.IMAGINARY_ONLY)
        pole = resonance_pole(0, params, spec, bessel_row(0.0, 20))
        self.assertAlmostEqual(pole.gamma / (2 * np.pi * 0.06 ** 2 * 20), 1.0, delta=1e-12)
        self.assertAlmostEqual(pole.gamma, 0.45239, places=4)
        self.assertEqual(pole.z.real, 20.0)

    def test_decay_rate_is_non_negative(self):
        for a in (0.0, 2.5, 10.0):
            params = self.params.with_changes(a=a)
            pole = resonance_pole(0, params, self.spec, bessel_row(a))
            self.assertLessEqual(pole.z.imag, 0.0)
            self.assertGreater(pole.gamma, 0.0)

    def test_rate_is_continuous_in_amplitude(self):
        rates = [
            resonance_pole(0, self.params.with_changes(a=a), self.spec, bessel_row(a, 25)).gamma
            for a in (0.0, 1e-4, 2e-4)
        ]
        self.assertAlmostEqual(rates[1], rates[0], delta=1e-6)
        self.assertAlmostEqual(rates[2], rates[1], delta=1e-6)

    def test_self_consistent_is_close_to_perturbative(self):
        """Without the real shift the two pole methods agree to within a percent"""
        spec = self.spec.with_changes(lamb_shift=LambShift.IMAGINARY_ONLY)
        perturbative = resonance_pole(0, self.params, spec, self.row)
        converged = resonance_pole(0, self.params, spec, self.row, PoleMethod.SELF_CONSISTENT)
        self.assertEqual(converged.method, PoleMethod.SELF_CONSISTENT)
        self.assertLess(abs(converged.gamma / perturbative.gamma - 1.0), 0.01)

    def test_full_shift_moves_the_rate_with_the_line(self):
        """
        With the real shift the self-consistent rate follows the shifted line
        position, Gamma ~ 2 pi lam^2 Re z, so it sits below the golden-rule
        value by the relative Lamb shift.
        """
        perturbative = resonance_pole(0, self.params, self.spec, self.row)
        converged = resonance_pole(0, self.params, self.spec, self.row, PoleMethod.SELF_CONSISTENT)
        shift = (self.params.delta0 - converged.z.real) / self.params.delta0
        self.assertGreater(shift, 0.03)
        self.assertAlmostEqual(converged.gamma / perturbative.gamma, 1.0 - shift, delta=0.01)

        fixed = dyn_self_energy(0, converged.z, self.params, self.spec, Sheet.SECOND, self.row)
        self.assertLess(abs(fixed - converged.z), 1e-10)

    def test_non_convergence_reports_last_iterate(self):
        with mock.patch('floquet.poles.NEWTON_MAX_ITERATIONS', 0):
            with self.assertRaises(PoleConvergenceError) as caught:
                resonance_pole(0, self.params, self.spec, self.row, PoleMethod.SELF_CONSISTENT)
        self.assertIsInstance(caught.exception.last_iterate, complex)
        self.assertGreaterEqual(caught.exception.residual, 0.0)

    def test_row_must_cover_the_padding(self):
        with self.assertRaises(ValueError):
            resonance_pole(0, self.params, self.spec, bessel_row(self.params.a, 15))


class PoleLadderTest(SimpleTestCase):
    def setUp(self):
        self.params = reference_params()
        self.spec = ContinuumSpec(cutoff=200.0)
        self.row = bessel_row(self.params.a, 30)
        self.ladder = pole_ladder(self.params, self.spec, self.row)

    def test_covers_the_truncation(self):
        self.assertEqual([p.n for p in self.ladder], list(range(-30, 31)))

    def test_origin_matches_direct_pole(self):
        origin = next(p for p in self.ladder if p.n == 0)
        self.assertEqual(origin.z, resonance_pole(0, self.params, self.spec, self.row).z)

    def test_translation(self):
        by_index = {p.n: p for p in self.ladder}
        self.assertAlmostEqual(by_index[3].z - by_index[0].z, 3 * self.params.omega, delta=1e-13)
        self.assertEqual(len({p.z.imag for p in self.ladder}), 1)

    def test_custom_range(self):
        ladder = pole_ladder(self.params, self.spec, self.row, range(-2, 3))
        self.assertEqual(len(ladder), 5)

    def test_residue_is_near_one_at_weak_coupling(self):
        residue = pole_residue(self.ladder[0], self.params, self.spec, self.row)
        self.assertLess(abs(residue - 1.0), 0.05)
        params = SystemParams(delta0=20.0, omega=1.0, a=10.0, lam=0.0)
        self.assertEqual(pole_residue(self.ladder[0], params, self.spec, self.row), 1.0)
