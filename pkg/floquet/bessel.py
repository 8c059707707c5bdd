"""
Integer-order Bessel functions of the first kind.

Values are produced by Miller's downward recurrence. The magnitude of the
recurred sequence is fixed by the closure identity
J_0(x)^2 + 2 * sum_k J_k(x)^2 = 1 and its sign by J_0(x) + 2 * sum_k J_2k(x) = 1,
so no external special-function library is needed at run time.
"""
import math
from dataclasses import dataclass, field

import numpy as np

BIGNO = 1.0e10
BIGNI = 1.0e-10


class BesselDomainError(ValueError):
    """Raised for negative arguments or orders far outside the useful range."""


def _check_domain(n, x):
    if x < 0:
        raise BesselDomainError(f"Bessel argument must be >= 0, got {x}")
    if abs(n) > 10 * (x + 10):
        raise BesselDomainError(
            f"Order {n} outside the supported range |n| <= 10*(x+10) for x={x}"
        )


def _starting_order(n_max, x):
    """Even starting order for the downward recurrence."""
    top = max(n_max, x)
    start = int(top + 20 + math.sqrt(40.0 * top))
    return start + (start % 2)


def _miller_sequence(n_max, x):
    """
    J_0(x) .. J_n_max(x) for x > 0 by downward recurrence, normalized.
    """
    start = _starting_order(n_max, x)
    values = np.zeros(start + 2)
    values[start] = 1.0e-30
    two_over_x = 2.0 / x
    for k in range(start, 0, -1):
        values[k - 1] = k * two_over_x * values[k] - values[k + 1]
        if abs(values[k - 1]) > BIGNO:
            values *= BIGNI

    values /= np.max(np.abs(values))
    closure = values[0] ** 2 + 2.0 * np.sum(values[1:] ** 2)
    even_sum = values[0] + 2.0 * np.sum(values[2::2])
    scale = math.copysign(1.0 / math.sqrt(closure), even_sum)
    return values[: n_max + 1] * scale


def bessel_j(n, x):
    """
    J_n(x) for integer n and real x >= 0.

    Negative orders use J_{-n} = (-1)^n J_n.
    """
    n = int(n)
    x = float(x)
    _check_domain(n, x)
    order = abs(n)
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    value = _miller_sequence(order, x)[order]
    if n < 0 and order % 2:
        return -value
    return float(value)


@dataclass(frozen=True)
class BesselRow:
    """
    J_m(a) for m = -M..M, stored with m = -M at index 0.
    """
    argument: float
    order_range: int
    values: np.ndarray = field(repr=False, compare=False)

    @property
    def orders(self):
        return np.arange(-self.order_range, self.order_range + 1)

    def __call__(self, m):
        """J_m(a); zero outside the stored range."""
        m = int(m)
        if abs(m) > self.order_range:
            return 0.0
        return float(self.values[m + self.order_range])

    @property
    def squares(self):
        return self.values ** 2

    @property
    def closure(self):
        """Partial sum of J_m(a)^2 over the stored orders."""
        return float(np.sum(self.values ** 2))


def default_order_range(a, pad=20):
    return int(math.ceil(a)) + pad


def bessel_row(a, M=None):
    """
    BesselRow covering m = -M..M for argument a >= 0.

    The negative half is filled from the parity identity, not recomputed.
    """
    a = float(a)
    if M is None:
        M = default_order_range(a)
    M = int(M)
    if M < 1:
        raise BesselDomainError(f"Order range must be >= 1, got {M}")
    _check_domain(0, a)

    positive = np.zeros(M + 1)
    if a == 0.0:
        positive[0] = 1.0
    else:
        positive[:] = _miller_sequence(M, a)

    signs = np.where(np.arange(1, M + 1) % 2 == 1, -1.0, 1.0)
    negative = (signs * positive[1:])[::-1]
    values = np.concatenate([negative, positive])
    values.setflags(write=False)
    return BesselRow(argument=a, order_range=M, values=values)
