"""Certified real enclosures.

Float endpoint pairs with outward rounding, backed by mpmath interval
arithmetic for transcendental evaluations.  Every constructor and operation
keeps the true real inside [lo, hi]: mpmath's iv context rounds outward at
its working precision, and the final conversion to float endpoints is pushed
one ulp outward because float() itself rounds to nearest.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv, mp

# Working precision for interval evaluations.  53-bit floats are the output
# format, so 120 bits leaves a wide guard band; hot loops raise it locally.
DEFAULT_PREC = 120


@contextmanager
def iv_prec(prec: int):
    """Temporarily set the mpmath interval context's binary precision
    (the iv context has no workprec of its own)."""
    old = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = old


def _down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def _up(x: float) -> float:
    return math.nextafter(x, math.inf)


@dataclass(frozen=True)
class Interval:
    """Closed real interval with float endpoints, lo <= hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def point(x: float) -> "Interval":
        return Interval(x, x)

    @staticmethod
    def zero() -> "Interval":
        return Interval(0.0, 0.0)

    # -- arithmetic (1 ulp outward per float operation) --------------------

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def scale(self, r: Fraction | int) -> "Interval":
        """Multiply by an exact rational scalar."""
        r = Fraction(r)
        if r == 0:
            return Interval.zero()
        with iv_prec(DEFAULT_PREC):
            prod = _iv_interval(self) * iv_from_fraction(r)
        return from_iv(prod)

    def clamp_nonneg(self) -> "Interval":
        """Intersect with [0, +inf); the true value is known nonnegative."""
        return Interval(max(self.lo, 0.0), max(self.hi, 0.0))

    # -- queries -----------------------------------------------------------

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"


# -- mpmath bridge ----------------------------------------------------------


def iv_from_fraction(q: Fraction | int):
    """Exact rational -> iv number containing it (outward at iv.prec)."""
    q = Fraction(q)
    if q.denominator == 1:
        return iv.mpf(q.numerator)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def _iv_interval(x: Interval):
    return iv.mpf((x.lo, x.hi))


def from_iv(x) -> Interval:
    """iv number -> float Interval, endpoints pushed outward past the
    float rounding of mp.mpf -> float."""
    lo = float(mp.mpf(x.a))
    hi = float(mp.mpf(x.b))
    return Interval(_down(lo), _up(hi))


def iv_to_fractions(x) -> tuple[Fraction, Fraction]:
    """iv number -> exact rational endpoints (no float range limits)."""
    from mpmath import libmp

    lo = Fraction(*libmp.to_rational(mp.mpf(x.a)._mpf_))
    hi = Fraction(*libmp.to_rational(mp.mpf(x.b)._mpf_))
    return lo, hi


def log_interval(q: Fraction, prec: int = DEFAULT_PREC) -> Interval:
    """Certified enclosure of log q for an exact rational q > 0."""
    if q <= 0:
        raise ValueError("log of a nonpositive rational")
    with iv_prec(prec):
        return from_iv(iv.log(iv_from_fraction(q)))


def log_plus_interval(q: Fraction, prec: int = DEFAULT_PREC) -> Interval:
    """Certified enclosure of log+ |q| = log max(1, |q|), exact [0,0] when
    |q| <= 1 (an exact rational comparison, no rounding involved)."""
    a = abs(Fraction(q))
    if a <= 1:
        return Interval.zero()
    return log_interval(a, prec)


def sum_intervals(parts) -> Interval:
    total = Interval.zero()
    for part in parts:
        total = total + part
    return total
