"""Exact rational arithmetic for phase bookkeeping.

Phases are tracked as rational multiples of pi so that circuit synthesis,
simulation and estimation never accumulate floating-point drift.  The
stdlib ``fractions.Fraction`` is the rational type used throughout; this
module adds the handful of helpers the rest of the package needs on top
of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List

__all__ = [
    "PhaseSet",
    "format_rational",
    "gcd_set",
    "normalize_phase_set",
    "parse_rational",
    "rational_from_float",
]


def gcd_set(values: Iterable[int]) -> int:
    """Greatest common divisor of a collection of nonnegative integers.

    At least one value must be nonzero; zeros are absorbed (gcd(0, x) = x).
    """
    vals = list(values)
    if not vals:
        raise ValueError("gcd_set: empty collection")
    g = 0
    for v in vals:
        v = int(v)
        if v < 0:
            raise ValueError(f"gcd_set: negative value {v}")
        g = math.gcd(g, v)
    if g == 0:
        raise ValueError("gcd_set: all values are zero")
    return g


def rational_from_float(value: float, tolerance: float) -> Fraction:
    """Smallest-denominator rational within ``tolerance`` of ``value``.

    Walks the continued-fraction convergents of ``value`` and returns the
    first one inside the tolerance window, so coarse tolerances snap to
    simple fractions while tight ones recover exact inputs.
    """
    if not tolerance > 0:
        raise ValueError("rational_from_float: tolerance must be positive")
    if math.isnan(value) or math.isinf(value):
        raise ValueError("rational_from_float: value must be finite")
    a0 = math.floor(value)
    p_prev, q_prev = 1, 0
    p_cur, q_cur = a0, 1
    x = value - a0
    while abs(value - p_cur / q_cur) > tolerance:
        if x <= 0:
            # the expansion terminated without reaching the tolerance;
            # p_cur/q_cur is already exact, so the loop condition was noise
            break
        x = 1.0 / x
        a = math.floor(x)
        x -= a
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    return Fraction(p_cur, q_cur)


def format_rational(value) -> str:
    """Render a rational as ``p/q``, omitting the denominator when it is 1."""
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q``, a plain integer, or a decimal string into a Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


@dataclass(frozen=True)
class PhaseSet:
    """A finite set of phase hypotheses pi*x/d given by integer numerators x.

    Attributes:
        denominator: common denominator d >= 1.
        numerators: strictly increasing tuple of integers in [0, 2d), one
            per hypothesis (2d because phases live on the circle [0, 2*pi)).
    """

    denominator: int
    numerators: tuple

    def __post_init__(self):
        d = int(self.denominator)
        if d < 1:
            raise ValueError("PhaseSet: denominator must be >= 1")
        nums = tuple(int(x) for x in self.numerators)
        if not nums:
            raise ValueError("PhaseSet: at least one numerator required")
        if any(x < 0 or x >= 2 * d for x in nums):
            raise ValueError("PhaseSet: numerators must lie in [0, 2d)")
        if list(nums) != sorted(set(nums)):
            raise ValueError("PhaseSet: numerators must be strictly increasing")
        object.__setattr__(self, "denominator", d)
        object.__setattr__(self, "numerators", nums)

    @property
    def m(self) -> int:
        """Number of hypotheses."""
        return len(self.numerators)

    @property
    def h(self) -> int:
        """Largest numerator."""
        return self.numerators[-1]

    def phases_pi(self) -> List[Fraction]:
        """The hypotheses as exact multiples of pi."""
        return [Fraction(x, self.denominator) for x in self.numerators]

    def phases_radians(self) -> List[float]:
        return [math.pi * x / self.denominator for x in self.numerators]


def normalize_phase_set(phases: Iterable) -> PhaseSet:
    """Collapse rational phases (in units of pi) onto a common denominator.

    Each value is reduced mod 2 (i.e. theta mod 2*pi), duplicates are
    merged, and the survivors are expressed over the least common
    denominator as sorted integer numerators.
    """
    vals = [Fraction(p) % 2 for p in phases]
    if not vals:
        raise ValueError("normalize_phase_set: empty phase list")
    d = 1
    for v in vals:
        d = math.lcm(d, v.denominator)
    nums = sorted({int(v * d) for v in vals})
    return PhaseSet(d, tuple(nums))
