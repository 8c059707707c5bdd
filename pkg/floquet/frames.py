"""
Spectrum frames shared by the analytic amplitudes and the time-domain oracle
"""
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class SpectrumFrame:
    """
    S(omega_k, t) on a photon-energy grid.

    t is math.inf for the stationary (t -> infinity) spectrum. Components hold
    optional partial intensities keyed by column name (S_R, S_C, S_cross, ...).
    """
    t: float
    grid: np.ndarray
    S: np.ndarray
    components: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def is_stationary(self):
        return math.isinf(self.t)

    @property
    def omega_t(self):
        """Drive phase omega * t (inf for the stationary frame)."""
        omega = self.metadata.get('params', {}).get('omega', 1.0)
        return math.inf if self.is_stationary else omega * self.t

    @property
    def label(self):
        if self.is_stationary:
            return 'stationary'
        return f"wt_{self.omega_t / math.pi:.6g}pi"
