from django.test import SimpleTestCase
import numpy as np

from floquet.amplitudes import AmplitudeOptions, temporal_spectrum
from floquet.bessel import bessel_row
from floquet.params import ContinuumSpec, PoleMethod, SystemParams, reference_params
from floquet.poles import pole_ladder, resonance_pole

from .tdse import (
    FitWindowError,
    OracleTrajectory,
    ResolutionError,
    StepSizeError,
    discretize,
    fit_decay,
    fit_window,
    initial_state,
    integrate,
    oracle_spectrum,
    propagate,
)


class DiscretizeTest(SimpleTestCase):
    def setUp(self):
        self.params = SystemParams(delta0=20.0, omega=1.0, a=10.0, lam=0.06)

    def test_spacing(self):
        model = discretize(self.params, 200.0, 4000)
        self.assertAlmostEqual(model.spacing, 0.05)
        self.assertAlmostEqual(model.frequencies[0], 0.025)

    def test_riemann_sum_of_couplings(self):
        model = discretize(self.params, 200.0, 4000)
        ratio = np.sum(model.couplings ** 2) / (0.06 ** 2 * 200.0 ** 2 / 2)
        self.assertAlmostEqual(ratio, 1.0, delta=1e-3)

    def test_uncoupled_modes(self):
        model = discretize(self.params.with_changes(lam=0.0), 200.0, 4000)
        self.assertFalse(np.any(model.couplings))

    def test_sideband_resolution(self):
        with self.assertRaisesMessage(ResolutionError, 'omega/20'):
            discretize(self.params, 200.0, 1000)

    def test_linewidth_resolution(self):
        params = self.params.with_changes(lam=0.02)
        with self.assertRaisesMessage(ResolutionError, 'gamma/8'):
            discretize(params, 200.0, 4000)

    def test_marginal_linewidth_warns(self):
        with self.assertLogs('oracle.tdse', level='WARNING'):
            discretize(self.params, 200.0, 4000)


class IntegrateTest(SimpleTestCase):
    def setUp(self):
        self.params = SystemParams(delta0=5.0, omega=1.0, a=2.0, lam=0.08, theta=0.4)
        self.model = discretize(self.params, 20.0, 1000)

    def test_uncoupled_phase(self):
        params = self.params.with_changes(lam=0.0)
        model = discretize(params, 20.0, 400)
        traj = integrate(model, 5.0, dt=0.01, save_every=5, certify=False)
        self.assertTrue(np.allclose(np.abs(traj.c_d), 1.0, atol=1e-12))
        t = traj.times
        phase = -5.0 * t - 2.0 * (np.sin(t + 0.4) - np.sin(0.4))
        np.testing.assert_allclose(traj.c_d, np.exp(1j * phase), atol=1e-10)

    def test_norm_conservation(self):
        traj = integrate(self.model, 10.0, dt=0.01, save_every=10, certify=False)
        self.assertLess(traj.norm_drift, 1e-8)
        self.assertLess(abs(traj.c_d[-1]), 1.0)

    def test_snapshots(self):
        traj = integrate(self.model, 4.0, dt=0.01, save_times=[1.0, 2.5], certify=False)
        np.testing.assert_allclose(traj.snapshot_times, [1.0, 2.5, 4.0])
        self.assertEqual(traj.photons.shape, (3, 1000))
        frame = oracle_spectrum(traj, traj.snapshot_index(2.5))
        self.assertEqual(frame.t, 2.5)
        np.testing.assert_allclose(frame.S, np.abs(traj.photons[1]) ** 2 / self.model.spacing)
        with self.assertRaises(KeyError):
            traj.snapshot_index(3.3)

    def test_time_reversal(self):
        start = initial_state(self.model)
        forward = propagate(self.model, start, 0.0, 6.0, 0.01)
        back = propagate(self.model, forward, 6.0, 0.0, 0.01)
        self.assertLess(np.max(np.abs(back - start)), 1e-6)

    def test_step_certification(self):
        traj = integrate(self.model, 2.0, dt=0.01, certify=True, tolerance=1e-6)
        self.assertLess(traj.step_change, 1e-6)
        with self.assertRaises(StepSizeError):
            integrate(self.model, 2.0, dt=0.5, certify=True, tolerance=1e-14)

    def test_recurrence_guard(self):
        with self.assertRaisesMessage(ResolutionError, 'recurrence'):
            integrate(self.model, 200.0, dt=0.01)


class DecayFitTest(SimpleTestCase):
    def synthetic(self, t_end):
        times = np.linspace(0.0, t_end, 4001)
        return OracleTrajectory(times=times, c_d=np.exp(-0.2 * times / 2), norm=np.ones_like(times))

    def test_exact_exponential(self):
        fit = fit_decay(self.synthetic(40.0))
        self.assertFalse(fit.rejected)
        self.assertFalse(fit.stroboscopic)
        self.assertAlmostEqual(fit.gamma, 0.2, delta=1e-6)

    def test_constant_amplitude_is_rejected(self):
        times = np.linspace(0.0, 10.0, 100)
        traj = OracleTrajectory(times=times, c_d=np.ones(100, dtype=complex), norm=np.ones(100))
        fit = fit_decay(traj)
        self.assertTrue(fit.rejected)
        self.assertEqual(fit.gamma, 0.0)

    def test_short_trajectory(self):
        with self.assertRaises(FitWindowError):
            fit_decay(self.synthetic(8.0))

    def test_driven_window_spans_whole_periods(self):
        params = SystemParams(delta0=20.0, omega=1.0, a=10.0, lam=0.06)
        start, stop = fit_window(0.43, params)
        self.assertAlmostEqual(start, 0.5 / 0.43)
        self.assertAlmostEqual((stop - start) / (2 * np.pi), 3.0)
        self.assertEqual(fit_window(0.43), (0.5 / 0.43, 3.0 / 0.43))

    def test_rate_ripple_is_sampled_out(self):
        """log |c_d|^2 rippling with the drive still yields the mean rate"""
        params = SystemParams(delta0=20.0, omega=1.0, a=10.0, lam=0.06)
        model = discretize(params, 200.0, 4000)
        times = np.linspace(0.0, 30.0, 6001)
        ripple = 2 * np.pi * 0.06 ** 2 * 10.0 * np.sin(times)
        c_d = np.exp(-(0.43 * times + ripple) / 2) * np.exp(-20j * times)
        traj = OracleTrajectory(times=times, c_d=c_d, norm=np.ones_like(times), model=model)

        fit = fit_decay(traj, expected_gamma=0.45)
        self.assertTrue(fit.stroboscopic)
        self.assertAlmostEqual(fit.gamma, 0.43, delta=1e-5)

        undriven = OracleTrajectory(times=times, c_d=c_d, norm=np.ones_like(times))
        self.assertGreater(abs(fit_decay(undriven, expected_gamma=0.45).gamma - 0.43), 0.005)


class PoleCrossCheckTest(SimpleTestCase):
    """Oracle decay rate against the resonance pole"""

    def test_undriven_decay_rate(self):
        params = SystemParams(delta0=20.0, omega=1.0, a=0.0, lam=0.06)
        spec = ContinuumSpec(cutoff=80.0)
        pole = resonance_pole(0, params, spec, bessel_row(0.0), PoleMethod.SELF_CONSISTENT)

        model = discretize(params, 80.0, 1600)
        traj = integrate(model, 9.0, dt=0.01, save_every=2, certify=False)
        fit = fit_decay(traj, expected_gamma=pole.gamma)
        self.assertAlmostEqual(fit.gamma / pole.gamma, 1.0, delta=0.03)

    def test_reference_rates(self):
        """Both reference amplitudes decay at the self-consistent pole rate within a percent"""
        spec = ContinuumSpec(cutoff=200.0)
        for a in (0.0, 10.0):
            params = reference_params().with_changes(a=a)
            pole = resonance_pole(0, params, spec, bessel_row(a, 30), PoleMethod.SELF_CONSISTENT)
            model = discretize(params, 200.0, 4000)
            t_end = fit_window(0.9 * pole.gamma, params)[1]
            traj = integrate(model, t_end, dt=0.001, save_every=10, certify=False)
            fit = fit_decay(traj, expected_gamma=pole.gamma)
            self.assertEqual(fit.stroboscopic, a > 0)
            self.assertLess(abs(fit.gamma / pole.gamma - 1.0), 0.01)


class SpectrumCrossCheckTest(SimpleTestCase):
    """Analytic temporal spectrum against the oracle"""

    def test_undriven_line(self):
        params = SystemParams(delta0=20.0, omega=1.0, a=0.0, lam=0.06)
        spec = ContinuumSpec(cutoff=80.0)
        row = bessel_row(0.0)
        poles = pole_ladder(params, spec, row, method=PoleMethod.SELF_CONSISTENT)

        model = discretize(params, 80.0, 1600)
        t = np.pi
        traj = integrate(model, t, dt=0.002, save_every=100, certify=False)
        oracle = oracle_spectrum(traj, traj.snapshot_index(t))

        line = np.flatnonzero(oracle.S >= 0.1 * oracle.S.max())
        options = AmplitudeOptions(branch_term=True, normalization=True)
        analytic = temporal_spectrum(model.frequencies[line], t, params, spec, poles, row, options)
        np.testing.assert_allclose(analytic.S, oracle.S[line], rtol=0.05)

    def test_strong_sidebands(self):
        params = SystemParams(delta0=20.0, omega=1.0, a=2.0, lam=0.04)
        spec = ContinuumSpec(cutoff=80.0)
        row = bessel_row(params.a)
        poles = pole_ladder(params, spec, row, method=PoleMethod.SELF_CONSISTENT)

        model = discretize(params, 80.0, 3200)
        t = 4 * np.pi
        traj = integrate(model, t, dt=0.005, save_every=50, certify=False)
        oracle = oracle_spectrum(traj, traj.snapshot_index(t))

        strong = [p for p in poles if row(p.n) ** 2 > 0.1]
        indices = [int(np.argmin(np.abs(model.frequencies - p.z.real))) for p in strong]
        grid = model.frequencies[indices]
        options = AmplitudeOptions(normalization=True)
        analytic = temporal_spectrum(grid, t, params, spec, poles, row, options)
        np.testing.assert_allclose(analytic.S, oracle.S[indices], rtol=0.05)
