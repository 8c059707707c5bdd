from django.test import SimpleTestCase
import numpy as np

from .amplitudes import (
    AmplitudeOptions,
    DegenerateResonanceError,
    amplitude,
    s_branch,
    s_continuum,
    s_resonance,
    spectral_grid,
    stationary_spectrum,
    survival_amplitude,
    temporal_spectrum,
)
from .analysis import excited_energy, plateau_mask, spectral_weight
from .bessel import bessel_row
from .params import ContinuumSpec, LambShift, SelfEnergy, SystemParams, reference_params
from .poles import pole_ladder


class AmplitudeTestMixin:
    """Mild drive so every test stays quick."""

    def build(self, params=None, spec=None, M=None):
        self.params = params or SystemParams(delta0=20.0, omega=1.0, a=2.0, lam=0.05)
        self.spec = spec or ContinuumSpec(cutoff=200.0)
        self.row = bessel_row(self.params.a, M)
        self.poles = pole_ladder(self.params, self.spec, self.row)
        self.gamma = self.poles[0].gamma


class GridTest(SimpleTestCase):
    def test_midpoint_offsets(self):
        grid = spectral_grid(10.0, 30.0, 400)
        self.assertEqual(len(grid), 400)
        self.assertAlmostEqual(grid[0], 10.025)
        # no point lands on an integer sideband center
        self.assertGreater(np.min(np.abs(grid - np.round(grid))), 0.01)

    def test_rejects_empty_range(self):
        with self.assertRaises(ValueError):
            spectral_grid(5.0, 5.0, 10)


class ResonanceTermTest(AmplitudeTestMixin, SimpleTestCase):
    def setUp(self):
        self.build()
        self.grid = spectral_grid(10.0, 30.0, 400)

    def test_uncoupled_terms_vanish(self):
        params = self.params.with_changes(lam=0.0)
        poles = pole_ladder(params, self.spec, self.row)
        np.testing.assert_array_equal(s_resonance(self.grid, 1.0, params, self.spec, poles, self.row), 0)
        np.testing.assert_array_equal(s_continuum(self.grid, 1.0, params, self.spec, self.row), 0)

    def test_undamped_pole_on_the_grid_is_degenerate(self):
        params = self.params.with_changes(lam=0.0)
        poles = pole_ladder(params, self.spec, self.row)
        with self.assertRaises(DegenerateResonanceError):
            s_resonance(np.array([21.0]), 0.0, params, self.spec, poles, self.row)

    def test_exponential_decay(self):
        t = 50.0 / self.gamma
        late = np.abs(s_resonance(self.grid, t, self.params, self.spec, self.poles, self.row))
        # envelope: lam C sum_m |J_m / (w - z_m)|
        z = np.array([p.z for p in self.poles])
        bound = 0.05 * np.sqrt(self.grid) * np.sum(
            np.abs(self.row.values / (self.grid[:, None] - z)), axis=1
        )
        self.assertTrue(np.all(late <= np.exp(-25.0) * bound * (1 + 1e-9)))

    def test_normalization_scales_by_the_residue(self):
        plain = s_resonance(self.grid, 0.3, self.params, self.spec, self.poles, self.row)
        scaled = s_resonance(self.grid, 0.3, self.params, self.spec, self.poles, self.row, normalization=True)
        ratio = scaled / plain
        np.testing.assert_allclose(ratio, ratio[0], rtol=1e-10)
        self.assertLess(abs(ratio[0] - 1.0), 0.05)


class ContinuumTermTest(AmplitudeTestMixin, SimpleTestCase):
    def setUp(self):
        self.build()
        self.grid = spectral_grid(10.0, 30.0, 400)

    def test_modulus_is_time_independent(self):
        early = s_continuum(self.grid, 0.0, self.params, self.spec, self.row)
        late = s_continuum(self.grid, 7.3, self.params, self.spec, self.row)
        np.testing.assert_allclose(np.abs(late), np.abs(early), rtol=1e-13)

    def test_pole_self_energy_option(self):
        values = s_continuum(
            self.grid, 0.0, self.params, self.spec, self.row, self.poles, SelfEnergy.POLE
        )
        dynamical = s_continuum(self.grid, 0.0, self.params, self.spec, self.row)
        # the two options agree to O(lam^2) near the lines
        peak = np.argmax(np.abs(dynamical))
        self.assertLess(abs(values[peak] - dynamical[peak]) / abs(dynamical[peak]), 0.1)
        with self.assertRaises(ValueError):
            s_continuum(self.grid, 0.0, self.params, self.spec, self.row, None, SelfEnergy.POLE)

    def test_phase_period(self):
        shifted = self.params.with_changes(theta=self.params.theta + 2 * np.pi)
        base = amplitude(self.grid, 2.0, self.params, self.spec, self.poles, self.row).total
        turned = amplitude(self.grid, 2.0, shifted, self.spec, self.poles, self.row).total
        np.testing.assert_allclose(turned, base, rtol=1e-9, atol=1e-14)

    def test_half_turn_keeps_peak_heights(self):
        """theta -> theta + pi leaves |s_C| at strong sideband centers nearly unchanged"""
        params = self.params.with_changes(lam=0.03)
        row = self.row
        flipped = params.with_changes(theta=np.pi)
        poles = {p.n: p.z.real for p in pole_ladder(params, self.spec, row)}
        strong = [int(m) for m in row.orders if row(m) ** 2 > 0.1]
        centers = np.array([poles[m] for m in strong])
        base = np.abs(s_continuum(centers, 0.0, params, self.spec, row))
        turned = np.abs(s_continuum(centers, 0.0, flipped, self.spec, row))
        np.testing.assert_allclose(turned, base, rtol=0.05)


class UndrivenLineTest(AmplitudeTestMixin, SimpleTestCase):
    def setUp(self):
        self.build(params=SystemParams(delta0=20.0, omega=1.0, a=0.0, lam=0.06))

    def test_single_lorentzian_line(self):
        spec = ContinuumSpec(cutoff=200.0, lamb_shift=LambShift.IMAGINARY_ONLY)
        poles = pole_ladder(self.params, spec, self.row)
        grid = spectral_grid(15.0, 25.0, 2000)
        frame = stationary_spectrum(grid, self.params, spec, self.row, poles)
        peak = np.argmax(frame.S)
        self.assertLess(abs(grid[peak] - 20.0), 0.01)

        # half maximum at w = delta0 +- gamma / 2
        gamma = poles[0].gamma
        half = np.interp(20.0 + gamma / 2, grid, frame.S) / frame.S[peak]
        self.assertAlmostEqual(half, 0.5, delta=0.05)

    def test_unitarity_budget(self):
        grid = spectral_grid(0.0, 200.0, 10000)
        frame = stationary_spectrum(grid, self.params, self.spec, self.row)
        self.assertAlmostEqual(spectral_weight(frame), 1.0, delta=0.02)


class TemporalSpectrumTest(AmplitudeTestMixin, SimpleTestCase):
    def setUp(self):
        self.build()
        self.grid = spectral_grid(10.0, 30.0, 400)

    def test_completeness_at_time_zero(self):
        options = AmplitudeOptions(branch_term=True)
        frame = temporal_spectrum(self.grid, 0.0, self.params, self.spec, self.poles, self.row, options)
        self.assertLess(np.max(frame.S), 1e-12)

        branch, error = s_branch(self.grid, 0.0, self.params, self.spec, self.row, poles=self.poles)
        direct = amplitude(self.grid, 0.0, self.params, self.spec, self.poles, self.row)
        np.testing.assert_allclose(branch, -(direct.s_R + direct.s_C), atol=1e-15)
        self.assertEqual(error, 0.0)

    def test_spectrum_grows_continuously_from_zero(self):
        options = AmplitudeOptions(branch_term=True)
        stationary = stationary_spectrum(self.grid, self.params, self.spec, self.row)
        early = [
            temporal_spectrum(self.grid, t, self.params, self.spec, self.poles, self.row, options).S.max()
            for t in (1e-3, 1e-2)
        ]
        self.assertLess(early[0], 1e-4 * stationary.S.max())
        self.assertLess(early[0], early[1])

    def test_branch_term_is_small_after_half_a_period(self):
        options = AmplitudeOptions(branch_term=True)
        parts = amplitude(self.grid, np.pi, self.params, self.spec, self.poles, self.row, options)
        frame = temporal_spectrum(self.grid, np.pi, self.params, self.spec, self.poles, self.row, options)
        mask = plateau_mask(frame, self.params)
        ratio = np.abs(parts.s_BR[mask]) ** 2 / frame.S[mask]
        self.assertLess(np.max(ratio), 1e-2)

    def test_time_zero_without_branch_term_warns(self):
        with self.assertLogs('floquet.amplitudes', level='WARNING'):
            temporal_spectrum(self.grid, 0.0, self.params, self.spec, self.poles, self.row)

    def test_uncoupled_branch_term_vanishes(self):
        params = self.params.with_changes(lam=0.0)
        branch, _ = s_branch(self.grid, 1.0, params, self.spec, self.row, poles=self.poles)
        np.testing.assert_array_equal(branch, 0)

    def test_components_add_up(self):
        frame = temporal_spectrum(self.grid, 3.0, self.params, self.spec, self.poles, self.row)
        total = frame.components['S_R'] + frame.components['S_C'] + frame.components['S_cross']
        np.testing.assert_allclose(total, frame.S, rtol=1e-12, atol=1e-18)
        self.assertTrue(np.all(frame.S >= 0))

    def test_late_frame_approaches_stationary(self):
        t = 40 * np.pi / self.params.omega
        frame = temporal_spectrum(self.grid, t, self.params, self.spec, self.poles, self.row)
        stationary = stationary_spectrum(self.grid, self.params, self.spec, self.row)
        mask = plateau_mask(stationary, self.params)
        relative = np.abs(frame.S[mask] / stationary.S[mask] - 1.0)
        self.assertLess(np.max(relative), 0.01)


class ReferenceDriveTest(AmplitudeTestMixin, SimpleTestCase):
    def setUp(self):
        self.build(params=reference_params())
        self.grid = spectral_grid(8.0, 32.0, 480)

    def test_phase_changes_the_spectrum(self):
        quarter = self.params.with_changes(theta=np.pi / 2)
        base = stationary_spectrum(self.grid, self.params, self.spec, self.row).S
        turned = stationary_spectrum(self.grid, quarter, self.spec, self.row).S
        mask = base > 0.01 * base.max()
        self.assertGreater(np.max(np.abs(turned[mask] / base[mask] - 1.0)), 0.1)

    def test_early_spectrum_follows_the_excited_level(self):
        """
        The early argmax lies in the band swept by E_e since t = 0 and moves
        down with it.
        """
        options = AmplitudeOptions(branch_term=True)
        peaks = []
        for phase in (np.pi / 4, np.pi / 2):
            t = phase / self.params.omega
            frame = temporal_spectrum(self.grid, t, self.params, self.spec, self.poles, self.row, options)
            peak = self.grid[np.argmax(frame.S)]
            self.assertGreaterEqual(peak, excited_energy(t, self.params) - 1.0)
            self.assertLessEqual(peak, excited_energy(0.0, self.params) + 1.0)
            peaks.append(peak)
        self.assertLess(peaks[1], peaks[0])

    def test_stroboscopic_frames_relax_to_stationary(self):
        """
        At whole periods s_R = e^{-Gamma t/2} s_R(0) and |s_R(0)| ~ |s_C|, so
        the frame departs from S_inf by about 2 e^{-Gamma t/2}.
        """
        stationary = stationary_spectrum(self.grid, self.params, self.spec, self.row)
        mask = plateau_mask(stationary, self.params)
        for periods in (3, 5):
            t = 2 * np.pi * periods / self.params.omega
            frame = temporal_spectrum(self.grid, t, self.params, self.spec, self.poles, self.row)
            relative = np.max(np.abs(frame.S[mask] / stationary.S[mask] - 1.0))
            self.assertLess(relative, 2 * np.exp(-self.gamma * t / 2) + 0.01)
        self.assertLess(relative, np.exp(-self.gamma * t) + 0.01)


class SurvivalAmplitudeTest(AmplitudeTestMixin, SimpleTestCase):
    def setUp(self):
        self.build(params=SystemParams(delta0=20.0, omega=1.0, a=3.0, lam=0.05, theta=0.7))

    def test_initial_value(self):
        value = survival_amplitude(0.0, self.params, self.spec, self.poles, self.row)
        self.assertAlmostEqual(abs(value - 1.0), 0.0, delta=1e-12)

    def test_uncoupled_modulus(self):
        params = self.params.with_changes(lam=0.0)
        poles = pole_ladder(params, self.spec, self.row)
        values = survival_amplitude(np.linspace(0, 20, 50), params, self.spec, poles, self.row)
        np.testing.assert_allclose(np.abs(values), 1.0, atol=1e-12)

    def test_decay_rate(self):
        t = np.array([1.0, 3.0]) / self.gamma
        probability = np.abs(survival_amplitude(t, self.params, self.spec, self.poles, self.row)) ** 2
        slope = -np.log(probability[1] / probability[0]) / (t[1] - t[0])
        self.assertAlmostEqual(slope / self.gamma, 1.0, delta=0.03)
