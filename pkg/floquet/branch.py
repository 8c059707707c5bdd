"""
Branch-cut contribution to the photon amplitude.

The full (secular) amplitude is written through the spectral density of the
dressed excited state,

    rho(E) = -Im[1 / (E - A_0(E))] / pi,

integrated along the real axis from above, which hugs every shifted cut:

    s(w_k, t) = -lam C_k e^{-i w_k t} (i t) sum_m J_m e^{-i m theta} H(w_k - m omega),
    H(x) = int rho(E) phi((x - E) t) dE,   phi(y) = (e^{iy} - 1) / (iy).

H is an FFT convolution on a uniform E lattice followed by a cubic spline.
The branch term is whatever is left after removing the resonance and
dressed-continuum terms.
"""
import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy.interpolate import CubicSpline
from scipy.signal import fftconvolve

from .continuum import channel_sum, coupling_sq
from .params import Sheet

logger = logging.getLogger(__name__)


def _default_points_per_width():
    return getattr(settings, 'HHG_BRANCH_POINTS_PER_WIDTH', 40)


def _default_tolerance():
    return getattr(settings, 'HHG_BRANCH_TOLERANCE', 1e-6)


@dataclass(frozen=True)
class BranchQuadSpec:
    """
    Lattice resolution of the spectral-density quadrature.

    The lattice step is min(gamma / points_per_width, phase_step / t).
    """
    points_per_width: int = None
    tolerance: float = None
    phase_step: float = 0.5

    def __post_init__(self):
        if self.points_per_width is None:
            object.__setattr__(self, 'points_per_width', _default_points_per_width())
        if self.tolerance is None:
            object.__setattr__(self, 'tolerance', _default_tolerance())
        if self.points_per_width < 4:
            raise ValueError("points_per_width >= 4 required")

    def step(self, gamma, t):
        step = gamma / self.points_per_width
        if t > 0:
            step = min(step, self.phase_step / t)
        return step


def kernel(y):
    """phi(y) = (e^{iy} - 1)/(iy), with phi(0) = 1."""
    return np.exp(0.5j * y) * np.sinc(y / (2.0 * np.pi))


class BranchQuadrature:
    """
    Spectral-density quadrature for one (params, continuum, truncation) set.

    Densities are cached per lattice step, so a time series reuses them.
    """

    def __init__(self, params, spec, row, gamma, quad_spec=None):
        self.params = params
        self.spec = spec
        self.row = row
        self.gamma = gamma
        self.quad_spec = quad_spec or BranchQuadSpec()
        reach = row.order_range * params.omega
        self.lower = -reach
        self.upper = spec.cutoff + reach
        self._densities = {}

    def origin(self, step):
        # half-step offset keeps lattice points off the band edges
        return self.lower + 0.5 * step

    def density(self, step):
        """(energies, rho) on the lattice origin + j*step covering the support."""
        if step not in self._densities:
            count = int(np.ceil((self.upper - self.lower) / step)) + 1
            energies = self.origin(step) + step * np.arange(count)
            dressed = channel_sum(energies, self.params, self.spec, self.row, Sheet.FIRST)
            green = 1.0 / (energies - self.params.delta0 - dressed)
            self._densities[step] = (energies, -green.imag / np.pi)
        return self._densities[step]

    def convolved(self, x, t, step):
        """H(x) at the requested points for lattice step `step`."""
        energies, rho = self.density(step)
        n = len(rho)
        origin = self.origin(step)
        first = int(np.floor((np.min(x) - origin) / step)) - 2
        last = int(np.ceil((np.max(x) - origin) / step)) + 2
        # kernel over lattice offsets p = i - j for i in [first, last], j in [0, n)
        offsets = np.arange(first - (n - 1), last + 1)
        weights = kernel(offsets * step * t)
        full = fftconvolve(rho, weights)
        lattice = origin + step * np.arange(first, last + 1)
        values = step * full[n - 1:n - 1 + len(lattice)]
        real = CubicSpline(lattice, values.real)(x)
        imag = CubicSpline(lattice, values.imag)(x)
        return real + 1j * imag

    def secular_amplitude(self, omega_k, t, step):
        """Full photon amplitude from the spectral representation."""
        omega_k = np.asarray(omega_k, dtype=float)
        params, row = self.params, self.row
        phases = row.values * np.exp(-1j * row.orders * params.theta)
        arguments = omega_k[..., None] - row.orders * params.omega
        h = self.convolved(arguments.ravel(), t, step).reshape(arguments.shape)
        prefactor = -params.lam * np.sqrt(coupling_sq(omega_k, self.spec))
        return prefactor * np.exp(-1j * omega_k * t) * (1j * t) * (h @ phases)

    def evaluate(self, omega_k, t):
        """
        (amplitude, error bar) at time t; the error bar is the change under
        doubling the lattice step.
        """
        omega_k = np.asarray(omega_k, dtype=float)
        if t == 0 or self.params.lam == 0.0:
            zeros = np.zeros(omega_k.shape, dtype=complex)
            return zeros, 0.0
        step = self.quad_spec.step(self.gamma, t)
        fine = self.secular_amplitude(omega_k, t, step)
        coarse = self.secular_amplitude(omega_k, t, 2.0 * step)
        error = float(np.max(np.abs(fine - coarse))) if fine.size else 0.0
        if error > self.quad_spec.tolerance:
            logger.warning(
                "Branch quadrature error bar %.3e exceeds tolerance %.1e at t=%g",
                error, self.quad_spec.tolerance, t,
            )
        return fine, error
