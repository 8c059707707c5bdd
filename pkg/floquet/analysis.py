"""
Sideband, plateau and cutoff diagnostics on spectrum frames
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import find_peaks
from scipy.stats import linregress, pearsonr

from .bessel import bessel_row

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SidebandPeak:
    m: int
    center: float
    height: float
    bessel_weight: float
    located: bool

    def as_dict(self):
        return {
            'm': self.m,
            'center': self.center,
            'height': self.height,
            'bessel_weight': self.bessel_weight,
            'located': self.located,
        }


def excited_energy(t, params):
    """E_e(t) = delta0 + A cos(omega t + theta)."""
    t = np.asarray(t, dtype=float)
    value = params.delta0 + params.amplitude * np.cos(params.omega * t + params.theta)
    return float(value) if value.ndim == 0 else value


def sideband_centers(params, orders, poles=None):
    """Re z_m when poles are given, otherwise delta0 + m*omega."""
    if poles is None:
        return {int(m): params.delta0 + m * params.omega for m in orders}
    by_index = {pole.n: pole.z.real for pole in poles}
    return {int(m): by_index[int(m)] for m in orders if int(m) in by_index}


def sideband_peaks(frame, params, poles=None, orders=None):
    """
    Highest local maximum of S within omega/2 of each sideband center.

    Sidebands whose window holds no interior local maximum are reported with
    located=False and the window's largest value.
    """
    grid, S = frame.grid, frame.S
    if orders is None:
        lo = int(np.floor((grid[0] - params.delta0) / params.omega))
        hi = int(np.ceil((grid[-1] - params.delta0) / params.omega))
        orders = range(lo, hi + 1)
    weights = bessel_row(params.a, max(abs(m) for m in orders) + 1)
    maxima, _ = find_peaks(S)
    half = 0.5 * params.omega

    peaks = []
    for m, center in sorted(sideband_centers(params, orders, poles).items()):
        window = np.flatnonzero(np.abs(grid - center) <= half)
        if window.size == 0:
            continue
        candidates = maxima[np.abs(grid[maxima] - center) <= half]
        located = candidates.size > 0
        pool = candidates if located else window
        best = pool[np.argmax(S[pool])]
        peaks.append(SidebandPeak(
            m=m,
            center=float(grid[best]),
            height=float(S[best]),
            bessel_weight=weights(m) ** 2,
            located=bool(located),
        ))
    return peaks


def plateau_median(peaks, params):
    heights = [p.height for p in peaks if p.located and abs(p.m) <= params.a]
    if not heights:
        return 0.0
    return float(np.median(heights))


def cutoff_index(peaks, params, threshold=1e-4):
    """Largest m whose located peak exceeds threshold * plateau median."""
    floor = threshold * plateau_median(peaks, params)
    above = [p.m for p in peaks if p.located and p.height > floor]
    if not above:
        return 0
    return max(above)


@dataclass(frozen=True)
class CutoffScaling:
    slope: float
    intercept: float
    r_squared: float
    quadratic_r_squared: float

    @property
    def linear_preferred(self):
        return self.r_squared > self.quadratic_r_squared


def cutoff_scaling(amplitudes, cutoffs):
    """
    Fit m_c = alpha * a + c and, for comparison, m_c = beta * a^2 + c'.

    The offset absorbs the Bessel tail beyond |m| = a, which grows like
    a^(1/3) and makes a fit through the origin overestimate alpha.
    """
    a = np.asarray(amplitudes, dtype=float)
    m_c = np.asarray(cutoffs, dtype=float)
    linear = linregress(a, m_c)
    quadratic = linregress(a ** 2, m_c)
    return CutoffScaling(
        slope=float(linear.slope),
        intercept=float(linear.intercept),
        r_squared=float(linear.rvalue ** 2),
        quadratic_r_squared=float(quadratic.rvalue ** 2),
    )


def envelope_correlation(peaks, plateau):
    """Pearson r between log heights and log J_m(a)^2 over located peaks with |m| <= plateau."""
    chosen = [
        p for p in peaks
        if p.located and abs(p.m) <= plateau and p.height > 0 and p.bessel_weight > 0
    ]
    if len(chosen) < 3:
        return float('nan')
    heights = np.log([p.height for p in chosen])
    weights = np.log([p.bessel_weight for p in chosen])
    return float(pearsonr(heights, weights)[0])


def spectral_weight(frame):
    """Integrated intensity of a frame over its grid."""
    grid = frame.grid
    if grid.size < 2:
        return 0.0
    step = np.diff(grid)
    if np.allclose(step, step[0]):
        # midpoint rule on a midpoint grid
        return float(np.sum(frame.S) * step[0])
    return float(trapezoid(frame.S, grid))


def plateau_mask(frame, params, floor=0.1):
    """
    Grid points inside delta0 +- a*omega whose intensity is at least floor * max.
    """
    inside = np.abs(frame.grid - params.delta0) <= params.a * params.omega
    if not np.any(inside):
        return inside
    top = np.max(frame.S[inside])
    return inside & (frame.S >= floor * top)
