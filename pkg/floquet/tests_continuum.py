from django.test import SimpleTestCase
import numpy as np
from scipy.integrate import quad
from scipy.special import jv

from .bessel import bessel_row
from .continuum import (
    SingularInputError,
    coupling_sq,
    coupling_sq_continued,
    dyn_self_energy,
    sigma_plus,
    sigma_plus_derivative,
)
from .params import ContinuumSpec, LambShift, Sheet, SystemParams


class CouplingTest(SimpleTestCase):
    def setUp(self):
        self.spec = ContinuumSpec(cutoff=200.0)

    def test_support(self):
        self.assertEqual(coupling_sq(-1.0, self.spec), 0.0)
        self.assertEqual(coupling_sq(20.0, self.spec), 20.0)
        self.assertEqual(coupling_sq(200.0001, self.spec), 0.0)

    def test_continued_coupling_lives_on_the_strip(self):
        self.assertEqual(coupling_sq_continued(20 - 1j, self.spec), 20 - 1j)
        self.assertEqual(coupling_sq_continued(-3 - 1j, self.spec), 0)
        self.assertEqual(coupling_sq_continued(250 - 1j, self.spec), 0)


class SigmaPlusTest(SimpleTestCase):
    def setUp(self):
        self.spec = ContinuumSpec(cutoff=200.0)
        self.rng = np.random.default_rng(7)

    def test_plemelj_imaginary_part(self):
        eps = np.linspace(0.5, 199.5, 50)
        values = sigma_plus(eps, self.spec)
        np.testing.assert_allclose(values.imag, -np.pi * coupling_sq(eps, self.spec), rtol=1e-12)
        self.assertAlmostEqual(sigma_plus(20.0, self.spec).imag, -20 * np.pi, places=10)

    def test_real_part_matches_principal_value(self):
        # PV of int_0^L w / (eps - w) dw = - PV int w / (w - eps)
        principal, _ = quad(lambda w: w, 0.0, 200.0, weight='cauchy', wvar=20.0)
        self.assertAlmostEqual(sigma_plus(20.0, self.spec).real / -principal, 1.0, delta=1e-8)

    def test_outside_support_is_real(self):
        self.assertEqual(sigma_plus(-5.0, self.spec).imag, 0.0)
        self.assertEqual(sigma_plus(250.0, self.spec).imag, 0.0)

    def test_sheet_jump(self):
        z = self.rng.uniform(1, 199, 20) - 1j * self.rng.uniform(0.01, 30, 20)
        jump = sigma_plus(z, self.spec, Sheet.SECOND) - sigma_plus(z, self.spec, Sheet.FIRST)
        np.testing.assert_allclose(jump, -2j * np.pi * coupling_sq_continued(z, self.spec), atol=1e-10)

    def test_second_sheet_is_first_sheet_off_the_strip(self):
        z = np.array([-4 - 2j, 230 - 5j, 50 + 3j])
        np.testing.assert_array_equal(
            sigma_plus(z, self.spec, Sheet.SECOND), sigma_plus(z, self.spec, Sheet.FIRST)
        )

    def test_schwarz_reflection(self):
        z = self.rng.uniform(-50, 250, 20) + 1j * self.rng.uniform(0.01, 30, 20)
        np.testing.assert_allclose(
            sigma_plus(np.conj(z), self.spec), np.conj(sigma_plus(z, self.spec)), rtol=1e-12
        )

    def test_matches_direct_quadrature(self):
        """Closed form against int_0^L w / (z - w) dw for random upper half-plane z"""
        z_values = self.rng.uniform(-20, 220, 50) + 1j * self.rng.uniform(0.5, 40, 50)
        for z in z_values:
            real, _ = quad(lambda w: (w / (z - w)).real, 0.0, 200.0, limit=400, epsabs=0, epsrel=1e-12)
            imag, _ = quad(lambda w: (w / (z - w)).imag, 0.0, 200.0, limit=400, epsabs=0, epsrel=1e-12)
            expected = real + 1j * imag
            self.assertLess(abs(sigma_plus(z, self.spec) - expected) / abs(expected), 1e-8)

    def test_continuity_across_the_real_axis_from_above(self):
        eps = 37.25
        above = sigma_plus(eps + 1e-10j, self.spec)
        self.assertAlmostEqual(abs(above - sigma_plus(eps, self.spec)), 0.0, delta=1e-7)

    def test_band_edges(self):
        with self.assertRaises(SingularInputError):
            sigma_plus(0.0, self.spec)
        with self.assertRaises(SingularInputError):
            sigma_plus(200.0, self.spec)
        self.assertEqual(sigma_plus(0.0, self.spec, allow_threshold=True), -200.0)
        with self.assertRaises(SingularInputError):
            sigma_plus(200.0, self.spec, allow_threshold=True)

    def test_imaginary_only_mode(self):
        spec = ContinuumSpec(cutoff=200.0, lamb_shift=LambShift.IMAGINARY_ONLY)
        value = sigma_plus(20.0, spec)
        self.assertEqual(value.real, 0.0)
        self.assertAlmostEqual(value.imag, -20 * np.pi, places=10)

    def test_derivative_matches_finite_difference(self):
        h = 1e-6
        for sheet in (Sheet.FIRST, Sheet.SECOND):
            for z in (20 - 0.3j, 150 + 2j, -10 - 1j):
                numeric = (sigma_plus(z + h, self.spec, sheet) - sigma_plus(z - h, self.spec, sheet)) / (2 * h)
                analytic = sigma_plus_derivative(z, self.spec, sheet)
                self.assertLess(abs(numeric - analytic), 1e-6 * max(1.0, abs(analytic)))


class DynamicalSelfEnergyTest(SimpleTestCase):
    def setUp(self):
        self.spec = ContinuumSpec(cutoff=200.0)
        self.params = SystemParams(delta0=20.0, omega=1.0, a=10.0, lam=0.06)
        self.row = bessel_row(10.0, 30)

    def test_uncoupled(self):
        params = self.params.with_changes(lam=0.0)
        self.assertEqual(dyn_self_energy(3, 25.5, params, self.spec, row=self.row), 23.0)

    def test_undriven_reduces_to_scalar_self_energy(self):
        params = self.params.with_changes(a=0.0)
        row = bessel_row(0.0, 20)
        value = dyn_self_energy(0, 20.0 - 0.1j, params, self.spec, Sheet.SECOND, row)
        expected = 20.0 + 0.06 ** 2 * sigma_plus(20.0 - 0.1j, self.spec, Sheet.SECOND)
        self.assertAlmostEqual(abs(value - expected), 0.0, delta=1e-13)

    def test_term_by_term_sum(self):
        # 1. Independent Bessel values, one channel at a time
        expected = 20.0 + 0j
        for l in range(-30, 31):
            argument = 20.0 + l
            if argument == 0.0:
                term = -200.0
            else:
                term = sigma_plus(argument, self.spec)
            expected += 0.06 ** 2 * jv(l, 10.0) ** 2 * term

        # 2. Vectorized evaluation
        value = dyn_self_energy(0, 20.0, self.params, self.spec, Sheet.SECOND, self.row)
        self.assertAlmostEqual(abs(value - expected), 0.0, delta=1e-12)

    def test_mode_translation(self):
        base = dyn_self_energy(0, 19.7 - 0.2j, self.params, self.spec, Sheet.SECOND, self.row)
        shifted = dyn_self_energy(4, 23.7 - 0.2j, self.params, self.spec, Sheet.SECOND, self.row)
        self.assertAlmostEqual(abs(shifted - 4.0 - base), 0.0, delta=1e-12)

    def test_requires_bessel_row(self):
        with self.assertRaises(ValueError):
            dyn_self_energy(0, 20.0, self.params, self.spec)
