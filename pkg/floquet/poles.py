"""
Floquet resonance poles z_d^(n) and their mode-translation ladder.
"""
import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from .continuum import channel_sum, channel_sum_derivative
from .params import PoleMethod, Sheet

logger = logging.getLogger(__name__)

NEWTON_TOLERANCE = 1e-12
NEWTON_MAX_ITERATIONS = 100


class PoleConvergenceError(ArithmeticError):
    """Self-consistent pole iteration did not converge."""

    def __init__(self, message, last_iterate, residual):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


@dataclass(frozen=True)
class FloquetPole:
    n: int
    z: complex
    method: str = PoleMethod.PERTURBATIVE

    @property
    def gamma(self):
        """Decay rate -2 Im z."""
        return -2.0 * self.z.imag

    def as_dict(self):
        return {
            'n': self.n,
            're_z': self.z.real,
            'im_z': self.z.imag,
            'gamma': self.gamma,
            'method': str(self.method),
        }


def _check_row(params, row):
    pad = getattr(settings, 'HHG_TRUNCATION_PAD', 20)
    needed = int(np.ceil(params.a)) + pad
    if row.order_range < needed:
        raise ValueError(
            f"Bessel row half-width {row.order_range} below ceil(a) + {pad} = {needed}"
        )


def _perturbative(n, params, spec, row):
    shift = channel_sum(params.delta0, params, spec, row, Sheet.SECOND)
    return complex(params.delta0 + n * params.omega + shift)


def _self_consistent(n, params, spec, row):
    """
    Damped Newton on F(z) = z - A_n(z), seeded at the perturbative value.
    """
    offset = n * params.omega
    base = params.delta0 + offset

    def residual(z):
        return z - base - channel_sum(z - offset, params, spec, row, Sheet.SECOND)

    z = _perturbative(n, params, spec, row)
    f = residual(z)
    for iteration in range(1, NEWTON_MAX_ITERATIONS + 1):
        slope = 1.0 - channel_sum_derivative(z - offset, params, spec, row, Sheet.SECOND)
        step = f / slope
        damping = 1.0
        # Backtrack while the residual grows
        while True:
            candidate = z - damping * step
            f_candidate = residual(candidate)
            if abs(f_candidate) <= abs(f) or damping < 1e-3:
                break
            damping *= 0.5
        moved = abs(candidate - z)
        z, f = candidate, f_candidate
        logger.debug("pole n=%d iteration %d: z=%r |dz|=%.3e", n, iteration, z, moved)
        if moved < NEWTON_TOLERANCE:
            return complex(z)

    raise PoleConvergenceError(
        f"Self-consistent pole for n={n} did not converge in {NEWTON_MAX_ITERATIONS} iterations",
        last_iterate=complex(z),
        residual=abs(f),
    )


def resonance_pole(n, params, spec, row, method=PoleMethod.PERTURBATIVE):
    """
    Complex quasienergy of Floquet mode n.

    Perturbative: z = delta0 + n*omega + lam^2 sum_l J_l^2 sigma^+(delta0 + l*omega),
    with each sigma continued to the second sheet. Self-consistent: the fixed
    point z = A_n(z) on the second sheet.
    """
    _check_row(params, row)
    if params.lam == 0.0:
        z = complex(params.delta0 + n * params.omega)
    elif method == PoleMethod.SELF_CONSISTENT:
        z = _self_consistent(n, params, spec, row)
    else:
        z = _perturbative(n, params, spec, row)
    return FloquetPole(n=int(n), z=z, method=method)


def pole_ladder(params, spec, row, n_range=None, method=PoleMethod.PERTURBATIVE):
    """
    Poles for every n in n_range (default -M..M), translated from pole(0) by n*omega.
    """
    if n_range is None:
        n_range = range(-row.order_range, row.order_range + 1)
    origin = resonance_pole(0, params, spec, row, method)
    return [
        FloquetPole(n=int(n), z=origin.z + n * params.omega, method=method)
        for n in n_range
    ]


def pole_array(poles, row):
    """z_d^(m) for m = -M..M, aligned with row.orders."""
    by_index = {pole.n: pole.z for pole in poles}
    missing = [int(m) for m in row.orders if int(m) not in by_index]
    if missing:
        raise ValueError(f"Pole ladder lacks Floquet indices {missing[:5]}...")
    return np.array([by_index[int(m)] for m in row.orders], dtype=complex)


def pole_residue(pole, params, spec, row):
    """
    Squared normalization N_d^2 = 1 / (1 - d Sigma/dz) at the pole.
    """
    if params.lam == 0.0:
        return 1.0 + 0j
    offset = pole.n * params.omega
    slope = channel_sum_derivative(pole.z - offset, params, spec, row, Sheet.SECOND)
    return complex(1.0 / (1.0 - slope))
