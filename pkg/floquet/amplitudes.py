"""
Photon amplitude <k|Psi(t)> as resonance + dressed-continuum + branch terms,
and the spectra built from it.

The global phase e^{i a sin(theta)} is left out of the photon amplitudes; it
cancels in every intensity. survival_amplitude restores it.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .branch import BranchQuadrature, BranchQuadSpec
from .continuum import coupling_sq, sigma_plus
from .frames import SpectrumFrame
from .params import SelfEnergy, Sheet
from .poles import pole_array, pole_residue

logger = logging.getLogger(__name__)

ETA = 1e-12
DEGENERACY_WINDOW = 1e-13


class DegenerateResonanceError(ZeroDivisionError):
    """A photon energy sits on an undamped (real) pole."""


@dataclass(frozen=True)
class AmplitudeOptions:
    branch_term: bool = False
    self_energy: str = SelfEnergy.DYNAMICAL
    normalization: bool = False
    quadrature: BranchQuadSpec = field(default_factory=BranchQuadSpec)


@dataclass
class AmplitudeDecomposition:
    omega_k: np.ndarray
    t: float
    s_R: np.ndarray
    s_C: np.ndarray
    s_BR: np.ndarray
    branch_error: float = 0.0

    @property
    def total(self):
        return self.s_R + self.s_C + self.s_BR


def spectral_grid(lower, upper, count):
    """Midpoint grid: lower + (i + 1/2) * (upper - lower) / count."""
    if count < 1 or not upper > lower:
        raise ValueError("grid needs count >= 1 and upper > lower")
    step = (upper - lower) / count
    return lower + (np.arange(count) + 0.5) * step


def _coupling(omega_k, spec):
    return np.sqrt(coupling_sq(omega_k, spec))


def _weights(params, row):
    """J_m(a) e^{-i m theta} for m = -M..M."""
    return row.values * np.exp(-1j * row.orders * params.theta)


def _residue(poles, params, spec, row, normalization):
    if not normalization:
        return 1.0
    # N_d^2 is common to every mode of the ladder
    return pole_residue(poles[0], params, spec, row)


def _check_degenerate(omega_k, z):
    real_poles = z[z.imag == 0.0]
    if real_poles.size == 0:
        return
    gap = np.abs(omega_k[..., None] - real_poles.real)
    if np.any(gap < DEGENERACY_WINDOW):
        raise DegenerateResonanceError(
            "photon energy coincides with an undamped pole (gamma = 0)"
        )


def s_resonance(omega_k, t, params, spec, poles, row, normalization=False):
    """
    -lam C_k sum_m e^{-i z_m t} J_m e^{-i m theta} / (w_k - z_m), times N_d^2
    when normalization is on.
    """
    omega_k = np.asarray(omega_k, dtype=float)
    z = pole_array(poles, row)
    _check_degenerate(omega_k, z)
    if params.lam == 0.0:
        return np.zeros(omega_k.shape, dtype=complex)

    numerators = np.exp(-1j * z * t) * _weights(params, row)
    terms = numerators / (omega_k[..., None] - z)
    residue = _residue(poles, params, spec, row, normalization)
    return -params.lam * _coupling(omega_k, spec) * residue * terms.sum(axis=-1)


def _shift_matrix(row):
    """
    W[p, m] = J_{p + m - 2M}^2 so that table @ W sums J_l^2 sigma(w - m*omega + l*omega).
    """
    M = row.order_range
    shifts = np.arange(-2 * M, 2 * M + 1)
    l = shifts[:, None] + row.orders[None, :]
    inside = np.abs(l) <= M
    return np.where(inside, row.squares[np.clip(l + M, 0, 2 * M)], 0.0)


def dressed_levels(omega_k, params, spec, row, sheet=Sheet.SECOND):
    """A_m(w_k) for every grid point (rows) and Floquet index m (columns)."""
    omega_k = np.asarray(omega_k, dtype=float)
    M = row.order_range
    base = params.delta0 + row.orders * params.omega
    if params.lam == 0.0:
        return np.broadcast_to(base, omega_k.shape + base.shape).astype(complex)

    # sigma only depends on w_k + (l - m) * omega, tabulate it once
    shifts = np.arange(-2 * M, 2 * M + 1) * params.omega
    table = sigma_plus(omega_k[..., None] + shifts, spec, sheet, allow_threshold=True)
    return base + params.lam ** 2 * (table @ _shift_matrix(row))


def s_continuum(omega_k, t, params, spec, row, poles=None, self_energy=SelfEnergy.DYNAMICAL):
    """
    lam C_k e^{-i w_k t} sum_m J_m e^{-i m theta} / (w_k + i eta - A_m(w_k)).

    self_energy='pole' replaces A_m(w_k) by the constant z_m.
    """
    omega_k = np.asarray(omega_k, dtype=float)
    if params.lam == 0.0:
        return np.zeros(omega_k.shape, dtype=complex)

    if self_energy == SelfEnergy.POLE:
        if poles is None:
            raise ValueError("self_energy='pole' needs the pole ladder")
        levels = pole_array(poles, row)
    else:
        levels = dressed_levels(omega_k, params, spec, row)
    terms = _weights(params, row) / (omega_k[..., None] + 1j * ETA - levels)
    return params.lam * _coupling(omega_k, spec) * np.exp(-1j * omega_k * t) * terms.sum(axis=-1)


def s_branch(omega_k, t, params, spec, row, quadrature=None, poles=None, options=None):
    """
    Branch-cut term and its error bar, as (values, error).

    Obtained by subtracting the resonance and continuum terms from the
    spectral-density evaluation of the full amplitude; at t = 0 it is exactly
    -(s_R + s_C).
    """
    omega_k = np.asarray(omega_k, dtype=float)
    options = options or AmplitudeOptions(branch_term=True)
    if params.lam == 0.0:
        return np.zeros(omega_k.shape, dtype=complex), 0.0
    if poles is None:
        raise ValueError("s_branch needs the pole ladder")
    if not isinstance(quadrature, BranchQuadrature):
        quadrature = BranchQuadrature(params, spec, row, poles[0].gamma, quadrature)

    total, error = quadrature.evaluate(omega_k, t)
    resonance = s_resonance(omega_k, t, params, spec, poles, row, options.normalization)
    continuum = s_continuum(omega_k, t, params, spec, row, poles, options.self_energy)
    return total - resonance - continuum, error


def amplitude(omega_k, t, params, spec, poles, row, options=None, quadrature=None):
    options = options or AmplitudeOptions()
    omega_k = np.asarray(omega_k, dtype=float)
    s_r = s_resonance(omega_k, t, params, spec, poles, row, options.normalization)
    s_c = s_continuum(omega_k, t, params, spec, row, poles, options.self_energy)
    if options.branch_term and params.lam != 0.0:
        if not isinstance(quadrature, BranchQuadrature):
            quadrature = BranchQuadrature(params, spec, row, poles[0].gamma, options.quadrature)
        total, error = quadrature.evaluate(omega_k, t)
        s_br = total - s_r - s_c
    else:
        s_br = np.zeros(omega_k.shape, dtype=complex)
        error = 0.0
    return AmplitudeDecomposition(omega_k=omega_k, t=t, s_R=s_r, s_C=s_c, s_BR=s_br, branch_error=error)


def _metadata(params, spec, row, **extra):
    metadata = {
        'params': params.as_dict(),
        'continuum': spec.as_dict(),
        'truncation': row.order_range,
    }
    metadata.update(extra)
    return metadata


def stationary_spectrum(grid, params, spec, row, poles=None, self_energy=SelfEnergy.DYNAMICAL):
    """S_inf(w_k) = |s_C|^2; the resonance term has decayed."""
    grid = np.asarray(grid, dtype=float)
    s_c = s_continuum(grid, 0.0, params, spec, row, poles, self_energy)
    S = np.abs(s_c) ** 2
    zeros = np.zeros_like(S)
    return SpectrumFrame(
        t=math.inf,
        grid=grid,
        S=S,
        components={'S_R': zeros, 'S_C': S.copy(), 'S_cross': zeros.copy()},
        metadata=_metadata(params, spec, row, self_energy=str(self_energy)),
    )


def temporal_spectrum(grid, t, params, spec, poles, row, options=None, quadrature=None):
    """
    S(w_k, t) = |s_R + s_C + s_BR|^2 with partial intensities; S_cross collects
    every interference term (and the branch term when enabled).
    """
    options = options or AmplitudeOptions()
    if t == 0 and not options.branch_term:
        logger.warning(
            "t = 0 frame without the branch term: the residual S(w_k, 0) ~ |s_BR|^2 "
            "is a method artifact"
        )
    decomposition = amplitude(grid, t, params, spec, poles, row, options, quadrature)
    S = np.abs(decomposition.total) ** 2
    S_R = np.abs(decomposition.s_R) ** 2
    S_C = np.abs(decomposition.s_C) ** 2
    return SpectrumFrame(
        t=float(t),
        grid=decomposition.omega_k,
        S=S,
        components={'S_R': S_R, 'S_C': S_C, 'S_cross': S - S_R - S_C},
        metadata=_metadata(
            params, spec, row,
            branch_term=options.branch_term,
            branch_error=decomposition.branch_error,
            self_energy=str(options.self_energy),
            normalization=options.normalization,
        ),
    )


def survival_amplitude(t, params, spec, poles, row, normalization=False):
    """
    <d|Psi(t)> from the pole terms:
    e^{i a sin(theta)} sum_m J_m e^{-i m theta} e^{-i z_m t}.
    """
    t = np.asarray(t, dtype=float)
    z = pole_array(poles, row)
    terms = np.exp(-1j * z * t[..., None]) * _weights(params, row)
    residue = _residue(poles, params, spec, row, normalization)
    value = np.exp(1j * params.a * np.sin(params.theta)) * residue * terms.sum(axis=-1)
    return complex(value) if value.ndim == 0 else value
