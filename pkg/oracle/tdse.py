"""
Brute-force time-dependent Schroedinger equation in the one-excitation sector.

The continuum is replaced by N_k photon modes w_j = (j + 1/2) dw on [0, cutoff]
with couplings g_j = lam * sqrt(w_j dw). The diagonal energies are removed
exactly by the interaction picture

    c_d = e^{-i phi(t)} f,   phi(t) = delta0 t + a (sin(omega t + theta) - sin theta),
    c_j = e^{-i w_j t} b_j,

which leaves the rank-two coupling V(t) = |d><u(t)| + |u(t)><d| with
u_j(t) = g_j e^{-i (phi(t) - w_j t)}. Each step applies the fourth-order
Gauss-Magnus exponent, which acts on span{|d>, u(t1), u(t2)} only and is
exponentiated exactly there, so the scheme is unitary and time-symmetric.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from scipy.linalg import expm
from scipy.stats import linregress

from floquet.frames import SpectrumFrame

logger = logging.getLogger(__name__)

GAUSS_OFFSET = math.sqrt(3.0) / 6.0
COMMUTATOR_WEIGHT = math.sqrt(3.0) / 12.0
RELATIVE_SLACK = 1e-9


class ResolutionError(ValueError):
    """The discretized continuum cannot resolve the requested physics."""


class StepSizeError(ArithmeticError):
    """Step-doubling or norm certification failed."""


class FitWindowError(ValueError):
    """The trajectory is too short for the decay fit window."""


def golden_rule_rate(params):
    """Undriven estimate 2 pi lam^2 delta0 of the decay rate."""
    return 2.0 * math.pi * params.lam ** 2 * params.delta0


def check_resolution(params, cutoff, n_modes, expected_gamma=None):
    """
    Mode spacing for (cutoff, n_modes); raises ResolutionError naming the
    violated inequality.
    """
    if n_modes < 1:
        raise ResolutionError("at least one photon mode is required")
    spacing = cutoff / n_modes
    sideband_limit = params.omega / 20.0
    if spacing > sideband_limit * (1 + RELATIVE_SLACK):
        raise ResolutionError(
            f"mode spacing {spacing:.4g} violates dw <= omega/20 = {sideband_limit:.4g}"
        )
    if params.lam > 0:
        gamma = expected_gamma or golden_rule_rate(params)
        if spacing > gamma / 8.0 * (1 + RELATIVE_SLACK):
            raise ResolutionError(
                f"mode spacing {spacing:.4g} violates dw <= gamma/8 = {gamma / 8.0:.4g}"
            )
        if spacing > gamma / 10.0:
            logger.warning(
                "mode spacing %.4g is above gamma/10 = %.4g; linewidth is only marginally resolved",
                spacing, gamma / 10.0,
            )
    return spacing


@dataclass(frozen=True)
class OracleModel:
    params: object
    cutoff: float
    n_modes: int
    spacing: float
    frequencies: np.ndarray = field(repr=False, compare=False)
    couplings: np.ndarray = field(repr=False, compare=False)

    @property
    def recurrence_time(self):
        return 2.0 * math.pi / self.spacing

    def phase(self, t):
        """phi(t) = int_0^t E_e(t') dt'."""
        p = self.params
        return p.delta0 * t + p.a * (math.sin(p.omega * t + p.theta) - math.sin(p.theta))

    def coupling_vector(self, t):
        return self.couplings * np.exp(-1j * (self.phase(t) - self.frequencies * t))


def discretize(params, cutoff, n_modes, expected_gamma=None):
    spacing = check_resolution(params, cutoff, n_modes, expected_gamma)
    frequencies = (np.arange(n_modes) + 0.5) * spacing
    couplings = params.lam * np.sqrt(frequencies * spacing)
    frequencies.setflags(write=False)
    couplings.setflags(write=False)
    return OracleModel(
        params=params,
        cutoff=float(cutoff),
        n_modes=int(n_modes),
        spacing=spacing,
        frequencies=frequencies,
        couplings=couplings,
    )


def _apply_coupling(u, x):
    """(|d><u| + |u><d|) x"""
    out = np.empty_like(x)
    out[0] = np.vdot(u, x[1:])
    out[1:] = u * x[0]
    return out


def magnus_step(model, state, t, h):
    """Advance the interaction-picture state from t to t + h."""
    u1 = model.coupling_vector(t + (0.5 - GAUSS_OFFSET) * h)
    u2 = model.coupling_vector(t + (0.5 + GAUSS_OFFSET) * h)

    basis = np.zeros((state.size, 3), dtype=complex)
    basis[0, 0] = 1.0
    basis[1:, 1] = u1
    basis[1:, 2] = u2
    q, _ = np.linalg.qr(basis)

    columns = []
    for k in range(3):
        x = q[:, k]
        v1x = _apply_coupling(u1, x)
        v2x = _apply_coupling(u2, x)
        commutator = _apply_coupling(u1, v2x) - _apply_coupling(u2, v1x)
        columns.append(0.5 * h * (v1x + v2x) + 1j * COMMUTATOR_WEIGHT * h * h * commutator)
    reduced = q.conj().T @ np.column_stack(columns)
    reduced = 0.5 * (reduced + reduced.conj().T)

    update = expm(-1j * reduced) - np.eye(3)
    return state + q @ (update @ (q.conj().T @ state))


def _step_count(span, dt):
    return max(1, int(math.ceil(abs(span) / abs(dt) - 1e-9)))


def propagate(model, state, t_start, t_stop, dt):
    """Interaction-picture state at t_stop; runs backwards when t_stop < t_start."""
    count = _step_count(t_stop - t_start, dt)
    h = (t_stop - t_start) / count
    state = np.array(state, dtype=complex)
    for k in range(count):
        state = magnus_step(model, state, t_start + k * h, h)
    return state


def initial_state(model):
    state = np.zeros(model.n_modes + 1, dtype=complex)
    state[0] = 1.0
    return state


def excited_amplitude(model, state, t):
    return np.exp(-1j * model.phase(t)) * state[0]


def photon_amplitudes(model, state, t):
    return np.exp(-1j * model.frequencies * t) * state[1:]


@dataclass
class OracleTrajectory:
    """
    c_d and the norm at every sample time; photon amplitudes c_j at the
    snapshot times.
    """
    times: np.ndarray
    c_d: np.ndarray
    norm: np.ndarray
    snapshot_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    photons: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=complex))
    model: OracleModel = None
    dt: float = None
    step_change: float = None

    @property
    def norm_drift(self):
        return float(np.max(np.abs(self.norm - 1.0))) if self.norm.size else 0.0

    def snapshot_index(self, t):
        index = int(np.argmin(np.abs(self.snapshot_times - t)))
        if abs(self.snapshot_times[index] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no photon snapshot saved at t={t}")
        return index


def _checkpoints(t_end, save_times):
    points = {float(t) for t in save_times if 0 < t < t_end}
    points.add(float(t_end))
    return sorted(points)


def integrate(model, t_end, dt=None, save_every=10, save_times=(), certify=True, tolerance=None):
    """
    Propagate |Psi(0)> = |d> to t_end.

    c_d and the norm are sampled every `save_every` steps; photon amplitudes are
    stored at t_end and at each of `save_times`. With certify=True the run is
    repeated at dt/2 and the final c_d must agree within `tolerance`.
    """
    dt = dt or getattr(settings, 'ORACLE_DT', 0.005)
    if not t_end > 0:
        raise ValueError("t_end > 0 required")
    if not t_end < 0.5 * model.recurrence_time:
        raise ResolutionError(
            f"t_end = {t_end:.4g} violates t_end < pi/dw = {0.5 * model.recurrence_time:.4g} "
            "(discretization recurrence)"
        )

    state = initial_state(model)
    times, amplitudes, norms = [0.0], [excited_amplitude(model, state, 0.0)], [1.0]
    snapshots, snapshot_times = [], []
    t, steps = 0.0, 0
    for stop in _checkpoints(t_end, save_times):
        count = _step_count(stop - t, dt)
        h = (stop - t) / count
        start = t
        for k in range(1, count + 1):
            state = magnus_step(model, state, start + (k - 1) * h, h)
            steps += 1
            t = stop if k == count else start + k * h
            if steps % save_every == 0 or k == count:
                times.append(t)
                amplitudes.append(excited_amplitude(model, state, t))
                norms.append(float(np.vdot(state, state).real))
        snapshot_times.append(stop)
        snapshots.append(photon_amplitudes(model, state, stop))

    trajectory = OracleTrajectory(
        times=np.array(times),
        c_d=np.array(amplitudes),
        norm=np.array(norms),
        snapshot_times=np.array(snapshot_times),
        photons=np.array(snapshots),
        model=model,
        dt=dt,
    )

    norm_tolerance = getattr(settings, 'ORACLE_NORM_TOLERANCE', 1e-8)
    if trajectory.norm_drift > norm_tolerance:
        raise StepSizeError(f"norm drift {trajectory.norm_drift:.2e} exceeds {norm_tolerance:.1e}")

    if certify:
        tolerance = tolerance or getattr(settings, 'ORACLE_STEP_TOLERANCE', 1e-8)
        halved = propagate(model, initial_state(model), 0.0, t_end, dt / 2)
        change = abs(excited_amplitude(model, halved, t_end) - trajectory.c_d[-1])
        trajectory.step_change = float(change)
        logger.info("oracle step certification: |delta c_d| = %.2e (tolerance %.1e)", change, tolerance)
        if change > tolerance:
            raise StepSizeError(
                f"halving dt changed the final c_d by {change:.2e} > {tolerance:.1e}"
            )
    return trajectory


def oracle_spectrum(traj, t_index):
    """S(w_j) = |c_j|^2 / dw at photon snapshot `t_index`."""
    model = traj.model
    photons = traj.photons[t_index]
    t = float(traj.snapshot_times[t_index])
    return SpectrumFrame(
        t=t,
        grid=np.asarray(model.frequencies),
        S=np.abs(photons) ** 2 / model.spacing,
        metadata={
            'params': model.params.as_dict(),
            'oracle': {'cutoff': model.cutoff, 'n_modes': model.n_modes, 'dt': traj.dt},
        },
    )


@dataclass(frozen=True)
class DecayFit:
    gamma: float
    rejected: bool = False
    window: tuple = (0.0, 0.0)
    iterations: int = 0
    stroboscopic: bool = False


def fit_window(gamma, params=None):
    """
    Fit window [0.5/G, 3/G].

    Under a drive the instantaneous rate follows the excited level, so
    log |c_d|^2 carries a ripple at the drive period. The window is then
    stretched to a whole number of periods (at least three) and sampled once
    per period.
    """
    start, stop = 0.5 / gamma, 3.0 / gamma
    if params is not None and params.a > 0.0:
        period = 2.0 * math.pi / params.omega
        periods = max(3, math.ceil((stop - start) / period - 1e-9))
        stop = start + periods * period
    return start, stop


def fit_decay(traj, expected_gamma=None, max_iterations=20):
    """
    Slope of log |c_d|^2 over the fit window, iterated until G matches the fit.

    Undriven trajectories are regressed on every sample in [0.5/G, 3/G];
    driven ones on the stroboscopic samples t = 0.5/G + k * 2 pi / omega.
    A trajectory that does not decay is rejected with gamma = 0.
    """
    times = traj.times
    log_probability = np.log(np.abs(traj.c_d) ** 2)
    t_last = times[-1]
    params = traj.model.params if traj.model is not None else None
    stroboscopic = params is not None and params.a > 0.0

    overall = -log_probability[-1] / t_last if t_last > 0 else 0.0
    if overall < 1e-10:
        logger.info("decay fit rejected: survival probability does not decay")
        return DecayFit(gamma=0.0, rejected=True)

    if expected_gamma:
        gamma = expected_gamma
    else:
        below = np.flatnonzero(log_probability <= -1.0)
        gamma = 1.0 / times[below[0]] if below.size else overall

    window = (0.0, 0.0)
    for iteration in range(1, max_iterations + 1):
        window = fit_window(gamma, params)
        if t_last < window[1] * (1 - 1e-12):
            raise FitWindowError(
                f"trajectory ends at t={t_last:.4g}, fit window needs t >= {window[1]:.4g}"
            )
        if stroboscopic:
            period = 2.0 * math.pi / params.omega
            count = int(round((window[1] - window[0]) / period))
            sample_times = window[0] + period * np.arange(count + 1)
            samples = np.interp(sample_times, times, log_probability)
        else:
            inside = (times >= window[0]) & (times <= window[1])
            if np.count_nonzero(inside) < 3:
                raise FitWindowError("fewer than three samples inside the fit window")
            sample_times, samples = times[inside], log_probability[inside]
        fitted = -linregress(sample_times, samples).slope
        if abs(fitted - gamma) <= 1e-10 * abs(fitted):
            return DecayFit(gamma=float(fitted), window=window, iterations=iteration,
                            stroboscopic=stroboscopic)
        gamma = fitted
    return DecayFit(gamma=float(gamma), window=window, iterations=max_iterations,
                    stroboscopic=stroboscopic)
