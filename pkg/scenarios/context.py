"""
Per-run evaluation context shared by the runner and the convergence report
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from floquet.amplitudes import stationary_spectrum, survival_amplitude, temporal_spectrum
from floquet.bessel import bessel_row
from floquet.branch import BranchQuadrature
from floquet.poles import pole_ladder
from oracle.tdse import (
    FitWindowError,
    discretize,
    fit_decay,
    fit_window,
    golden_rule_rate,
    integrate,
    oracle_spectrum,
)

logger = logging.getLogger(__name__)

ORACLE_SAMPLES = 2000
RECURRENCE_MARGIN = 0.45  # fraction of the recurrence time an oracle run may use


@dataclass
class ScenarioContext:
    """Everything a run evaluates once: Bessel row, pole ladder, grid, quadrature."""
    run_spec: object
    row: object
    poles: list
    grid: np.ndarray
    quadrature: BranchQuadrature = None

    @property
    def params(self):
        return self.run_spec.params

    @property
    def continuum(self):
        return self.run_spec.continuum

    @property
    def gamma(self):
        return self.poles[len(self.poles) // 2].gamma

    @classmethod
    def build(cls, run_spec):
        params, continuum = run_spec.params, run_spec.continuum
        row = bessel_row(params.a, run_spec.truncation)
        poles = pole_ladder(params, continuum, row, method=run_spec.pole_method)
        context = cls(run_spec=run_spec, row=row, poles=poles, grid=run_spec.grid.points())
        if run_spec.branch_term and params.lam > 0:
            context.quadrature = BranchQuadrature(
                params, continuum, row, context.gamma, run_spec.amplitude_options().quadrature
            )
        return context

    def frame(self, t):
        """Stationary frame for t = inf, temporal frame otherwise."""
        run_spec = self.run_spec
        if math.isinf(t):
            return stationary_spectrum(
                self.grid, self.params, self.continuum, self.row, self.poles, run_spec.self_energy
            )
        return temporal_spectrum(
            self.grid, t, self.params, self.continuum, self.poles, self.row,
            run_spec.amplitude_options(), self.quadrature,
        )

    def survival(self, times):
        return survival_amplitude(
            times, self.params, self.continuum, self.poles, self.row, self.run_spec.normalization
        )


@dataclass
class OracleRun:
    trajectory: object
    decay: dict = field(default_factory=dict)

    def spectrum_on(self, grid, t):
        """Oracle S interpolated onto `grid` at snapshot time t (nan outside the modes)."""
        if t == 0:
            return np.zeros_like(grid)
        frame = oracle_spectrum(self.trajectory, self.trajectory.snapshot_index(t))
        return np.interp(grid, frame.grid, frame.S, left=np.nan, right=np.nan)

    def survival_on(self, times):
        traj = self.trajectory
        probability = np.abs(traj.c_d) ** 2
        return np.interp(times, traj.times, probability, left=np.nan, right=np.nan)


def oracle_horizon(model, finite_times, gamma):
    """Oracle end time: the last requested time, else the decay fit window, within the recurrence margin."""
    limit = RECURRENCE_MARGIN * model.recurrence_time
    if finite_times and max(finite_times) > 0:
        return max(finite_times)
    if gamma > 0:
        return min(fit_window(0.9 * gamma, model.params)[1], limit)
    return min(4.0 * math.pi / model.params.omega, limit)


def run_oracle(run_spec, n_modes=None, t_end=None, certify=True, params=None):
    """Integrate the discretized continuum for a run (always with the full shift)."""
    params = params or run_spec.params
    model = discretize(params, run_spec.continuum.cutoff, n_modes or run_spec.oracle_modes)
    t_end = t_end or oracle_horizon(model, run_spec.finite_times, golden_rule_rate(params))
    steps = max(1, int(math.ceil(t_end / run_spec.oracle_dt)))
    logger.info("oracle run: %d modes, t_end=%.4g, %d steps", model.n_modes, t_end, steps)
    trajectory = integrate(
        model,
        t_end,
        dt=run_spec.oracle_dt,
        save_every=max(1, steps // ORACLE_SAMPLES),
        save_times=run_spec.finite_times,
        certify=certify,
    )
    run = OracleRun(trajectory=trajectory)
    try:
        fit = fit_decay(trajectory)
        run.decay = {
            'gamma': fit.gamma,
            'rejected': fit.rejected,
            'window': list(fit.window),
            'stroboscopic': fit.stroboscopic,
        }
    except FitWindowError as exc:
        run.decay = {'skipped': str(exc)}
    return run


