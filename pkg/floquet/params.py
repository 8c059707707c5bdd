"""
Physical inputs of the driven two-level emitter and its radiation continuum.
"""
import logging
import math
from dataclasses import dataclass, replace

from django.conf import settings
from django.db import models

logger = logging.getLogger(__name__)


class CouplingForm(models.TextChoices):
    SQRT_OMEGA = 'sqrt_omega', 'C(w)^2 rho(w) = w on [0, cutoff]'


class LambShift(models.TextChoices):
    FULL = 'full', 'Full self-energy'
    IMAGINARY_ONLY = 'imaginary_only', 'Imaginary part only'


class Sheet(models.TextChoices):
    FIRST = 'first', 'First (physical) sheet'
    SECOND = 'second', 'Second sheet, continued through the cut'


class PoleMethod(models.TextChoices):
    PERTURBATIVE = 'perturbative', 'Second-order perturbative'
    SELF_CONSISTENT = 'self_consistent', 'Self-consistent (Newton)'


class SelfEnergy(models.TextChoices):
    DYNAMICAL = 'dynamical', 'Energy-dependent A_m(w_k)'
    POLE = 'pole', 'Pole-evaluated z_d^(m)'


@dataclass(frozen=True)
class SystemParams:
    """
    Level splitting delta0 (E_e - E_0), drive frequency omega, scaled drive
    amplitude a = A/omega, dimensionless coupling lam and drive phase theta.
    """
    delta0: float
    omega: float
    a: float
    lam: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega > 0 required")
        if self.lam < 0:
            raise ValueError("lam >= 0 required")
        if self.a < 0:
            raise ValueError("a >= 0 required")
        if not self.delta0 > 0:
            raise ValueError("delta0 > 0 required")

    @property
    def amplitude(self):
        """Drive amplitude A = a * omega."""
        return self.a * self.omega

    @property
    def weak_coupling_ratio(self):
        return self.lam ** 2 * self.delta0 / self.omega

    def check_weak_coupling(self):
        """Log a warning when lam^2 delta0 / omega is not small. Returns True when fine."""
        limit = getattr(settings, 'HHG_WEAK_COUPLING_LIMIT', 0.1)
        ratio = self.weak_coupling_ratio
        if ratio > limit:
            logger.warning(
                "Weak-coupling advisory: lam^2*delta0/omega = %.3g exceeds %.3g; "
                "second-order pole and amplitude formulas may be inaccurate",
                ratio, limit,
            )
            return False
        return True

    def with_changes(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {
            'delta0': self.delta0,
            'omega': self.omega,
            'a': self.a,
            'lam': self.lam,
            'theta': self.theta,
        }


@dataclass(frozen=True)
class ContinuumSpec:
    """
    Radiation continuum on [0, cutoff] with C(w)^2 rho(w) = w.
    """
    cutoff: float
    coupling_form: str = CouplingForm.SQRT_OMEGA
    lamb_shift: str = LambShift.FULL

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ValueError("cutoff > 0 required")
        if self.coupling_form not in CouplingForm.values:
            raise ValueError(f"Unknown coupling form {self.coupling_form!r}")
        if self.lamb_shift not in LambShift.values:
            raise ValueError(f"Unknown lamb_shift mode {self.lamb_shift!r}")

    def check_band(self, params, M):
        """
        Every resonant sideband delta0 + m*omega with |m| <= M must lie below the cutoff.
        """
        top = params.delta0 + M * params.omega
        if not self.cutoff > top:
            raise ValueError(
                f"cutoff {self.cutoff} must exceed delta0 + M*omega = {top} "
                f"so all resonant sidebands lie inside the band"
            )

    def with_changes(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {
            'cutoff': self.cutoff,
            'coupling_form': str(self.coupling_form),
            'lamb_shift': str(self.lamb_shift),
        }


def default_cutoff(delta0):
    return getattr(settings, 'HHG_CUTOFF_FACTOR', 10.0) * delta0


def default_truncation(a):
    return int(math.ceil(a)) + getattr(settings, 'HHG_TRUNCATION_PAD', 20)


def reference_params(theta=0.0):
    """Reference drive used by the stationary-spectrum presets."""
    return SystemParams(delta0=20.0, omega=1.0, a=10.0, lam=0.06, theta=theta)
