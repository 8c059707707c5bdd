"""
Radiation continuum: coupling density, scalar self-energy and its
Floquet-dressed counterpart.

With C(w)^2 rho(w) = w on [0, cutoff] the self-energy has the closed form

    sigma(z) = -cutoff + z * L(z),   L(z) = log(z) - log(z - cutoff)

analytic off the cut [0, cutoff]. On the cut the boundary value from above is
used; the second sheet is reached by continuing through (0, cutoff) into the
lower half-plane, which subtracts 2*pi*i*z.
"""
import logging

import numpy as np

from .params import LambShift, Sheet

logger = logging.getLogger(__name__)


class SingularInputError(ValueError):
    """Raised when the self-energy is requested exactly at a band edge."""


def coupling_sq(omega, spec):
    """C(w)^2 rho(w): w inside [0, cutoff], 0 outside."""
    omega = np.asarray(omega, dtype=float)
    value = np.where((omega >= 0.0) & (omega <= spec.cutoff), omega, 0.0)
    return float(value) if value.ndim == 0 else value


def coupling_sq_continued(z, spec):
    """
    Analytic continuation of C^2 rho into the strip 0 < Re z < cutoff.

    This is the amount by which the two sheets differ (times -2*pi*i).
    """
    z = np.asarray(z, dtype=complex)
    inside = (z.real > 0.0) & (z.real < spec.cutoff)
    value = np.where(inside, z, 0.0)
    return complex(value) if value.ndim == 0 else value


def _log_ratio(z, cutoff, sheet):
    """
    L(z) on the requested sheet. Real arguments take the value from above.
    """
    x = z.real
    on_axis = z.imag == 0.0
    in_band = (x > 0.0) & (x < cutoff)

    with np.errstate(divide='ignore', invalid='ignore'):
        off_axis = np.log(z) - np.log(z - cutoff)
        axis_value = np.log(np.abs(x / (x - cutoff))) - 1j * np.pi * in_band
    value = np.where(on_axis, axis_value, off_axis)

    if sheet == Sheet.SECOND:
        crossed = (z.imag < 0.0) & in_band
        value = np.where(crossed, value - 2j * np.pi, value)
    return value


def _check_edges(z, cutoff, allow_threshold):
    at_top = z == cutoff
    at_zero = z == 0.0
    if np.any(at_top) or (not allow_threshold and np.any(at_zero)):
        raise SingularInputError(
            f"sigma_plus is singular at the band edges 0 and {cutoff}"
        )
    return at_zero


def sigma_plus(z, spec, sheet=Sheet.FIRST, allow_threshold=False):
    """
    Scalar self-energy sigma^+(z) for scalar or array z.

    The z = 0 edge is a removable point of the value (z log z -> 0); sums over
    Floquet channels pass allow_threshold=True to take the limit -cutoff there.
    The upper edge always raises.
    """
    z = np.asarray(z, dtype=complex)
    cutoff = spec.cutoff
    at_zero = _check_edges(z, cutoff, allow_threshold)

    with np.errstate(invalid='ignore'):
        value = -cutoff + z * _log_ratio(z, cutoff, Sheet.FIRST)
    value = np.where(at_zero, -cutoff + 0j, value)
    if sheet == Sheet.SECOND:
        value = value - 2j * np.pi * np.where(z.imag < 0.0, coupling_sq_continued(z, spec), 0.0)

    if spec.lamb_shift == LambShift.IMAGINARY_ONLY:
        value = 1j * value.imag
    return complex(value) if value.ndim == 0 else value


def sigma_plus_derivative(z, spec, sheet=Sheet.FIRST):
    """
    d sigma / dz = L(z) - cutoff / (z - cutoff).

    In imaginary-only mode the derivative of i*Im(sigma) is taken along the
    real direction inside the band, -i*pi, and 0 outside.
    """
    z = np.asarray(z, dtype=complex)
    cutoff = spec.cutoff
    _check_edges(z, cutoff, allow_threshold=False)

    if spec.lamb_shift == LambShift.IMAGINARY_ONLY:
        in_band = (z.real > 0.0) & (z.real < cutoff)
        value = np.where(in_band, -1j * np.pi, 0.0 + 0j)
    else:
        value = _log_ratio(z, cutoff, sheet) - cutoff / (z - cutoff)
    return complex(value) if value.ndim == 0 else value


def channel_sum(x, params, spec, row, sheet=Sheet.SECOND):
    """
    lam^2 * sum_l J_l(a)^2 * sigma^+(x + l*omega) for scalar or array x.

    The channel index runs over a trailing axis, so the result has the shape of x.
    """
    x = np.asarray(x, dtype=complex)
    if params.lam == 0.0:
        return np.zeros_like(x) if x.ndim else 0j
    shifts = row.orders * params.omega
    sigma = sigma_plus(x[..., None] + shifts, spec, sheet, allow_threshold=True)
    value = params.lam ** 2 * (sigma @ row.squares)
    return complex(value) if value.ndim == 0 else value


def channel_sum_derivative(x, params, spec, row, sheet=Sheet.SECOND):
    """d/dx of channel_sum."""
    x = np.asarray(x, dtype=complex)
    if params.lam == 0.0:
        return np.zeros_like(x) if x.ndim else 0j
    shifts = row.orders * params.omega
    derivative = sigma_plus_derivative(x[..., None] + shifts, spec, sheet)
    value = params.lam ** 2 * (derivative @ row.squares)
    return complex(value) if value.ndim == 0 else value


def dyn_self_energy(n, eps, params, spec, sheet=Sheet.SECOND, row=None):
    """
    Dressed self-energy of Floquet mode n:

        A_n(eps) = delta0 + n*omega + lam^2 * sum_l J_l(a)^2 sigma^+(eps - n*omega + l*omega)

    At eps = delta0 + n*omega the sum reduces to the perturbative pole shift.
    """
    if row is None:
        raise ValueError("dyn_self_energy needs the Bessel row J_l(a)")
    base = params.delta0 + n * params.omega
    return base + channel_sum(np.asarray(eps) - n * params.omega, params, spec, row, sheet)
