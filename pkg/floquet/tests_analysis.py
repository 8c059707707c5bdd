import math

from django.test import SimpleTestCase
import numpy as np

from .amplitudes import spectral_grid, stationary_spectrum
from .analysis import (
    SidebandPeak,
    cutoff_index,
    cutoff_scaling,
    envelope_correlation,
    excited_energy,
    plateau_mask,
    sideband_peaks,
    spectral_weight,
)
from .bessel import bessel_row
from .frames import SpectrumFrame
from .params import ContinuumSpec, LambShift, SystemParams, reference_params


def lorentzian_frame(params, heights, width=0.02):
    grid = spectral_grid(params.delta0 - 20, params.delta0 + 20, 8000)
    S = np.zeros_like(grid)
    for m, height in heights.items():
        center = params.delta0 + m * params.omega
        S += height * width ** 2 / ((grid - center) ** 2 + width ** 2)
    return SpectrumFrame(t=math.inf, grid=grid, S=S, metadata={'params': params.as_dict()})


class ExcitedEnergyTest(SimpleTestCase):
    def test_follows_the_drive(self):
        params = SystemParams(delta0=20.0, omega=1.0, a=10.0, lam=0.06)
        self.assertEqual(excited_energy(0.0, params), 30.0)
        self.assertAlmostEqual(excited_energy(math.pi, params), 10.0)
        quarter = params.with_changes(theta=math.pi / 2)
        self.assertAlmostEqual(excited_energy(0.0, quarter), 20.0)


class SyntheticPeakTest(SimpleTestCase):
    def setUp(self):
        self.params = SystemParams(delta0=20.0, omega=1.0, a=3.0, lam=0.05)
        self.heights = {m: 10.0 ** (-abs(m)) for m in range(-6, 7)}
        self.frame = lorentzian_frame(self.params, self.heights)

    def test_locates_every_sideband(self):
        peaks = {p.m: p for p in sideband_peaks(self.frame, self.params, orders=range(-6, 7))}
        self.assertEqual(sorted(peaks), list(range(-6, 7)))
        for m, peak in peaks.items():
            self.assertTrue(peak.located)
            self.assertLess(abs(peak.center - (20.0 + m)), 0.05)
        self.assertAlmostEqual(peaks[0].bessel_weight, bessel_row(3.0)(0) ** 2)

    def test_missing_sideband_is_not_located(self):
        frame = lorentzian_frame(self.params, {0: 1.0})
        peaks = {p.m: p for p in sideband_peaks(frame, self.params, orders=range(-2, 3))}
        self.assertTrue(peaks[0].located)
        self.assertFalse(peaks[2].located)

    def test_cutoff_index(self):
        peaks = [
            SidebandPeak(m=m, center=20.0 + m, height=h, bessel_weight=0.0, located=True)
            for m, h in self.heights.items()
        ]
        # plateau median over |m| <= 3 is 1e-2, threshold 1e-6
        self.assertEqual(cutoff_index(peaks, self.params), 5)

    def test_envelope_correlation(self):
        peaks = [
            SidebandPeak(m=m, center=20.0 + m, height=2.0 * w, bessel_weight=w, located=True)
            for m, w in enumerate([0.3, 0.1, 0.02, 0.004])
        ]
        self.assertAlmostEqual(envelope_correlation(peaks, plateau=10), 1.0)
        self.assertTrue(math.isnan(envelope_correlation(peaks[:2], plateau=10)))

    def test_spectral_weight(self):
        frame = SpectrumFrame(t=math.inf, grid=spectral_grid(0.0, 2.0, 100), S=np.ones(100))
        self.assertAlmostEqual(spectral_weight(frame), 2.0)

    def test_plateau_mask(self):
        mask = plateau_mask(self.frame, self.params)
        self.assertTrue(np.all(np.abs(self.frame.grid[mask] - 20.0) <= 3.0))
        self.assertTrue(np.any(mask))


class CutoffScalingTest(SimpleTestCase):
    def test_linear_cutoffs(self):
        scaling = cutoff_scaling([5, 10, 15], [5, 10, 15])
        self.assertAlmostEqual(scaling.slope, 1.0)
        self.assertAlmostEqual(scaling.r_squared, 1.0)
        self.assertTrue(scaling.linear_preferred)

    def test_quadratic_cutoffs(self):
        scaling = cutoff_scaling([5, 10, 15], [2.5, 10, 22.5])
        self.assertFalse(scaling.linear_preferred)

    def test_offset_cutoffs(self):
        scaling = cutoff_scaling([5, 10, 15], [9, 15, 21])
        self.assertAlmostEqual(scaling.slope, 1.2)
        self.assertAlmostEqual(scaling.intercept, 3.0)
        self.assertAlmostEqual(scaling.r_squared, 1.0)
        self.assertTrue(scaling.linear_preferred)


class StationaryLadderTest(SimpleTestCase):
    """Sideband ladder of the reference drive with the imaginary-only shift"""

    def setUp(self):
        self.params = reference_params()
        self.spec = ContinuumSpec(cutoff=200.0, lamb_shift=LambShift.IMAGINARY_ONLY)
        self.row = bessel_row(self.params.a)
        grid = spectral_grid(0.0, 40.0, 1600)
        self.frame = stationary_spectrum(grid, self.params, self.spec, self.row)
        self.peaks = {p.m: p for p in sideband_peaks(self.frame, self.params, orders=range(-19, 20))}

    def test_strong_sidebands_sit_on_the_ladder(self):
        strong = [m for m in range(-10, 11) if self.row(m) ** 2 > 0.04]
        self.assertTrue(strong)
        for m in strong:
            peak = self.peaks[m]
            self.assertTrue(peak.located)
            self.assertLess(abs(peak.center - (20.0 + m)), 0.25)

    def test_plateau_exceeds_beyond_cutoff(self):
        plateau = max(self.peaks[m].height for m in range(-10, 11))
        for m in (-17, 17):
            self.assertGreater(plateau, 10.0 * self.peaks[m].height)

    def test_interference_valley_between_like_signed_sidebands(self):
        """
        Neighbours with J_m J_{m+1} > 0 interfere destructively between their
        centers, giving an asymmetric dip well below either peak.
        """
        grid, S = self.frame.grid, self.frame.S
        valleys = []
        for m in range(1, 10):
            if self.row(m) * self.row(m + 1) <= 0 or min(self.row(m) ** 2, self.row(m + 1) ** 2) < 0.04:
                continue
            left, right = 20.0 + m, 21.0 + m
            between = (grid > left) & (grid < right)
            peaks = np.interp([left, right], grid, S)
            valleys.append(S[between].min() / peaks.min())
        self.assertGreaterEqual(len(valleys), 3)
        self.assertLess(min(valleys), 0.25)
