"""Exact local arithmetic over Q.

Places of Q, p-adic valuations, supports, Newton polygons, and the two value
representations used everywhere else:

* LocalValue: one local quantity, either an exact rational multiple of log p
  (finite places) or a certified float interval (archimedean place).
* LogSum: a finite formal sum of coeff * log p terms.  Sums and scalar
  multiples stay exact; comparisons against another LogSum are decided by
  exact integer arithmetic (compare products of prime powers), never floats.

Conventions: v_p is the usual additive valuation with v_p(p) = 1, so
|x|_p = p^(-v_p(x)) and log+ |x|_p = max(0, -v_p(x)) * log p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from ._intervals import (
    DEFAULT_PREC,
    Interval,
    from_iv,
    iv_from_fraction,
    iv_prec,
    log_interval,
    log_plus_interval,
)
from .errors import DomainError, SpecError

from mpmath import iv

# ---------------------------------------------------------------------------
# rational serialization ("num/den" strings in all I/O)
# ---------------------------------------------------------------------------


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse a num/den string (den optional) into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            return Fraction(int(num.strip()), int(den.strip()))
        return Fraction(int(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"not a rational: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# primality and factoring (trial division + deterministic Miller-Rabin,
# Pollard rho fallback for stray large cofactors)
# ---------------------------------------------------------------------------

_SMALL_PRIMES: list[int] = []


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, int(limit**0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = b"\x00" * len(range(i * i, limit + 1, i))
    return [i for i in range(limit + 1) if flags[i]]


_SMALL_PRIMES = _sieve(10_000)
_SMALL_SET = set(_SMALL_PRIMES)

# Witness set proving primality for every n < 3317044064679887385961981.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic for n below 3.3e24 (fixed Miller-Rabin witness set);
    the same witnesses act as a strong probabilistic test beyond that."""
    if n < 2:
        return False
    if n in _SMALL_SET:
        return True
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    # Brent's variant; n odd composite, no factor below the sieve limit.
    if n % 2 == 0:
        return 2
    import random

    rng = random.Random(0xBEEF ^ n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g, r, q = 1, 1, 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factor_integer(n: int) -> dict[int, int]:
    """Prime factorization of n != 0 as {p: multiplicity}, sign dropped."""
    if n == 0:
        raise DomainError("cannot factor 0")
    n = abs(n)
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        g = _pollard_rho(m)
        stack.append(g)
        stack.append(m // g)
    return dict(sorted(out.items()))


def support(q: Fraction) -> list[int]:
    """Sorted primes dividing the numerator or denominator of q != 0."""
    q = Fraction(q)
    if q == 0:
        raise DomainError("support of 0 is undefined")
    primes = set(factor_integer(q.numerator)) | set(factor_integer(q.denominator))
    return sorted(primes)


# ---------------------------------------------------------------------------
# places
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Place:
    """A place of Q: the archimedean place (prime is None) or a finite prime."""

    prime: Optional[int]

    @staticmethod
    def archimedean() -> "Place":
        return Place(None)

    @staticmethod
    def finite(p: int) -> "Place":
        if not is_prime(p):
            raise SpecError(f"not a prime: {p}")
        return Place(p)

    def sort_key(self) -> int:
        """Archimedean first, then finite primes in increasing order."""
        return 0 if self.prime is None else self.prime

    @property
    def is_archimedean(self) -> bool:
        return self.prime is None

    @staticmethod
    def parse(text: str) -> "Place":
        s = str(text).strip().lower()
        if s == "inf":
            return Place.archimedean()
        try:
            p = int(s)
        except ValueError as exc:
            raise SpecError(f"not a place: {text!r}") from exc
        return Place.finite(p)

    def __str__(self):
        return "inf" if self.prime is None else str(self.prime)


INF = Place.archimedean()


# ---------------------------------------------------------------------------
# valuations
# ---------------------------------------------------------------------------


def padic_valuation(q: Fraction, p: int) -> int:
    """v_p(q) for q != 0; additive, v_p(p) = 1."""
    q = Fraction(q)
    if q == 0:
        raise DomainError("v_p(0) is not a finite integer")
    v = 0
    n = q.numerator
    while n % p == 0:
        n //= p
        v += 1
    if v:
        return v
    d = q.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def vp_or_none(q: Fraction, p: int) -> Optional[int]:
    """padic_valuation with v_p(0) reported as None (infinite)."""
    return None if q == 0 else padic_valuation(q, p)


# ---------------------------------------------------------------------------
# local values and exact log sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalValue:
    """One local quantity.

    Exactly one of:
      * exact form: coeff * log(prime), coeff an exact Fraction (finite places);
      * interval form: certified [lo, hi] floats (the archimedean place).
    """

    coeff: Optional[Fraction] = None
    prime: Optional[int] = None
    lo: Optional[float] = None
    hi: Optional[float] = None

    @staticmethod
    def exact(coeff: Fraction, prime: int) -> "LocalValue":
        return LocalValue(coeff=Fraction(coeff), prime=prime)

    @staticmethod
    def interval(lo: float, hi: float) -> "LocalValue":
        if not lo <= hi:
            raise ValueError("empty interval")
        return LocalValue(lo=lo, hi=hi)

    @property
    def is_exact(self) -> bool:
        return self.coeff is not None

    def enclosure(self) -> Interval:
        if self.is_exact:
            if self.coeff == 0:
                return Interval.zero()
            return log_interval(Fraction(self.prime)).scale(self.coeff)
        return Interval(self.lo, self.hi)

    def to_json(self) -> dict:
        if self.is_exact:
            return {"coeff": format_rational(self.coeff), "prime": self.prime}
        return {"lo": self.lo, "hi": self.hi}

    @staticmethod
    def from_json(obj: dict) -> "LocalValue":
        if "coeff" in obj:
            return LocalValue.exact(parse_rational(obj["coeff"]), int(obj["prime"]))
        return LocalValue.interval(float(obj["lo"]), float(obj["hi"]))


class LogSum:
    """Finite formal sum  sum_p  c_p * log p  with exact rational c_p.

    Supports exact addition, scalar multiplication, and exact order
    comparison against another LogSum (via integer prime-power products).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict[int, Fraction]] = None):
        self.terms: dict[int, Fraction] = {}
        if terms:
            for p, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    self.terms[p] = c

    @staticmethod
    def zero() -> "LogSum":
        return LogSum()

    @staticmethod
    def single(coeff: Fraction, prime: int) -> "LogSum":
        return LogSum({prime: Fraction(coeff)})

    def __add__(self, other: "LogSum") -> "LogSum":
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, Fraction(0)) + c
        return LogSum(out)

    def scale(self, r: Fraction) -> "LogSum":
        r = Fraction(r)
        return LogSum({p: c * r for p, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def enclosure(self, prec: int = DEFAULT_PREC) -> Interval:
        if not self.terms:
            return Interval.zero()
        with iv_prec(prec):
            total = iv.mpf(0)
            for p, c in sorted(self.terms.items()):
                total += iv.log(iv.mpf(p)) * iv_from_fraction(c)
        return from_iv(total)

    def __float__(self) -> float:
        return self.enclosure().mid

    def compare(self, other: "LogSum") -> int:
        """Exact sign of (self - other): -1, 0, or 1."""
        diff = self + other.scale(Fraction(-1))
        if not diff.terms:
            return 0
        # sum c_p log p  vs 0   <=>   prod p^(c_p) vs 1, cleared to integers
        den = 1
        for c in diff.terms.values():
            den = den * c.denominator // math.gcd(den, c.denominator)
        lhs = rhs = 1
        for p, c in diff.terms.items():
            e = int(c * den)
            if e > 0:
                lhs *= p**e
            else:
                rhs *= p ** (-e)
        return (lhs > rhs) - (lhs < rhs)

    def __eq__(self, other):
        return isinstance(other, LogSum) and self.compare(other) == 0

    def __repr__(self):
        if not self.terms:
            return "LogSum(0)"
        body = " + ".join(
            f"{format_rational(c)}*log{p}" for p, c in sorted(self.terms.items())
        )
        return f"LogSum({body})"

    def to_json(self) -> dict:
        return {
            "logTerms": {
                str(p): format_rational(c) for p, c in sorted(self.terms.items())
            },
            "float": float(self),
        }


def log_rational_exact(r: Fraction) -> LogSum:
    """log r for an exact rational r > 0, as an exact LogSum."""
    r = Fraction(r)
    if r <= 0:
        raise DomainError("log of a nonpositive rational")
    if r == 1:
        return LogSum.zero()
    return LogSum({p: Fraction(padic_valuation(r, p)) for p in support(r)})


def naive_height_exact(q: Fraction) -> LogSum:
    """Naive height h(q) = log max(|num|, den), as an exact LogSum."""
    q = Fraction(q)
    m = max(abs(q.numerator), q.denominator)
    if m == 1:
        return LogSum.zero()
    return LogSum({p: Fraction(k) for p, k in factor_integer(m).items()})


# ---------------------------------------------------------------------------
# log+ and Newton polygons
# ---------------------------------------------------------------------------


def log_plus(q: Fraction, place: Place) -> LocalValue:
    """log+ |q|_v = log max(1, |q|_v), exact at finite places."""
    q = Fraction(q)
    if place.is_archimedean:
        enc = log_plus_interval(q)
        return LocalValue.interval(enc.lo, enc.hi)
    p = place.prime
    if q == 0:
        return LocalValue.exact(Fraction(0), p)
    return LocalValue.exact(Fraction(max(0, -padic_valuation(q, p))), p)


def newton_polygon(
    valuations: Iterable[Optional[Fraction]],
) -> list[tuple[Fraction, int]]:
    """Root valuations of a polynomial from its coefficient valuations.

    Input: v_p(c_0), ..., v_p(c_n) for f = sum c_i x^i (None marks c_i = 0;
    the leading entry must be finite).  Output: the multiset of valuations of
    the nonzero roots of f in an algebraic closure, as (valuation, mult)
    pairs sorted increasing.  Each valuation is the negated slope of one face
    of the lower convex hull of the points (i, v_p(c_i)).
    """
    vals = list(valuations)
    if not vals or vals[-1] is None:
        raise DomainError("leading coefficient must be nonzero")
    points = [(i, Fraction(v)) for i, v in enumerate(vals) if v is not None]
    if len(points) == 1:
        return []  # monomial: only zero roots
    # lower convex hull, left to right (monotone chain)
    hull: list[tuple[int, Fraction]] = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above segment hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    out: list[tuple[Fraction, int]] = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1, x2 - x1)
        out.append((-slope, x2 - x1))  # root valuation = negated hull slope
    out.sort(key=lambda sm: sm[0])
    return out
