"""Weighted homogeneous polynomial families f_t(z) = F(z^e, t).

F(X, Y) = sum_j a_j X^j Y^(D-j) is a binary form of degree D divisible by
neither X nor Y (a_0 != 0, a_D != 0), and d = e*D.  Writing F(X, 1) =
a_D * prod_i (X - beta_i)^(alpha_i) gives the factorization
f_t(z) = a_D * prod_i (z^e - beta_i t)^(alpha_i) that drives all local
estimates: everything the rest of the package needs about the beta_i comes
from Newton polygons of F(X, 1) (finite places) and certified archimedean
bounds, never from numerical roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from . import _polys
from ._polys import Coeffs
from .arith import format_rational, newton_polygon, parse_rational, support, vp_or_none
from .errors import DomainError, NormalizationUnavailable, SpecError

# Minimal counts of affine poles of order prime to e for the pole-witness
# argument to apply at weight e.
def required_pole_count(e: int) -> int:
    if e < 2:
        raise DomainError("weight e must be >= 2")
    if e == 2:
        return 5
    if e == 3:
        return 4
    return 3


@dataclass(frozen=True)
class Family:
    """One family f_t(z) = F(z^e, t); `form` holds a_D, ..., a_0 (leading
    coefficient of z^d first, matching the JSON field order)."""

    e: int
    form: tuple[Fraction, ...]

    # -- shape -------------------------------------------------------------

    @property
    def deg_form(self) -> int:
        return len(self.form) - 1

    @property
    def d(self) -> int:
        return self.e * self.deg_form

    @property
    def lead(self) -> Fraction:
        return self.form[0]

    @property
    def monic(self) -> bool:
        return self.form[0] == 1

    def coefficient(self, j: int) -> Fraction:
        """a_j, the coefficient of X^j Y^(D-j) in F."""
        return self.form[self.deg_form - j]

    # -- factor data (exact, cached) ----------------------------------------

    @cached_property
    def f1(self) -> Coeffs:
        """F(X, 1) as a constant-first polynomial."""
        return _polys.poly(list(reversed(self.form)))

    @cached_property
    def factors(self) -> tuple[tuple[Coeffs, int], ...]:
        """Irreducible factors of F(X, 1) over Q with multiplicities alpha_i."""
        _, facs = _polys.factor_over_q(self.f1)
        return tuple(facs)

    @cached_property
    def coefficient_support(self) -> tuple[int, ...]:
        primes: set[int] = set()
        for a in self.form:
            if a != 0 and a != 1:
                primes.update(support(a))
        return tuple(sorted(primes))

    def root_valuations(self, p: int) -> list[tuple[Fraction, int]]:
        """Valuations of the beta_i at p with multiplicities, from the Newton
        polygon of F(X, 1); all zero off the coefficient support."""
        cache = self.__dict__.setdefault("_rootval_cache", {})
        if p not in cache:
            vals = [vp_or_none(c, p) for c in self.f1]
            cache[p] = newton_polygon(vals)
        return cache[p]

    def amax(self, p: int) -> Fraction:
        """max_i |v_p(beta_i)|, the finite-place size of the factor roots."""
        if p not in self.coefficient_support:
            return Fraction(0)
        vals = self.root_valuations(p)
        if not vals:
            return Fraction(0)
        return max(abs(v) for v, _ in vals)

    @cached_property
    def arch_root_bound(self) -> Fraction:
        """Exact rational B >= max_i |beta_i|: exact for rational roots,
        per-factor Cauchy bound 1 + max |c_i / lead| otherwise."""
        best = Fraction(0)
        for fac, _ in self.factors:
            if _polys.degree(fac) == 1:
                root = -fac[0] / fac[1]
                best = max(best, abs(root))
            else:
                lead = fac[-1]
                cauchy = 1 + max(abs(c / lead) for c in fac[:-1])
                best = max(best, cauchy)
        return best

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {"e": self.e, "F": [format_rational(c) for c in self.form]}

    @staticmethod
    def from_json(obj: dict) -> "Family":
        try:
            e = int(obj["e"])
            coeffs = obj["F"]
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed family spec: {obj!r}") from exc
        return build_family(coeffs, e)

    def describe(self) -> str:
        """Human-oriented one-liner like 'z^4 - 3 t z^2 + t^2' (e = 2)."""
        D = self.deg_form
        parts = []
        for j in range(D, -1, -1):
            a = self.coefficient(j)
            if a == 0:
                continue
            zpow = self.e * j
            tpow = D - j
            piece = []
            if a != 1 or (zpow == 0 and tpow == 0):
                piece.append(format_rational(a))
            if zpow:
                piece.append("z" if zpow == 1 else f"z^{zpow}")
            if tpow:
                piece.append("t" if tpow == 1 else f"t^{tpow}")
            parts.append(" ".join(piece) if piece else "1")
        return " + ".join(parts).replace("+ -", "- ")


def build_family(coeffs: Sequence[Fraction | int | str], e: int) -> Family:
    """Validate and build a family from a_D, ..., a_0 (leading first)."""
    if not isinstance(e, int) or e < 2:
        raise SpecError(f"weight e must be an integer >= 2, got {e!r}")
    form = tuple(parse_rational(c) for c in coeffs)
    if len(form) < 2:
        raise SpecError("F must have degree >= 1 in X")
    if form[0] == 0:
        raise SpecError("leading coefficient a_D vanishes: Y divides F")
    if form[-1] == 0:
        raise SpecError("constant coefficient a_0 vanishes: X divides F")
    return Family(e=e, form=form)


def specialize(fam: Family, t: Fraction) -> Coeffs:
    """f_t as a dense constant-first coefficient list of length d + 1:
    the coefficient of z^(e j) is a_j t^(D-j)."""
    t = Fraction(t)
    D = fam.deg_form
    out = [Fraction(0)] * (fam.d + 1)
    for j in range(D + 1):
        out[fam.e * j] = fam.coefficient(j) * t ** (D - j)
    return tuple(out)


def monic_normalize(fam: Family) -> tuple[Family, Fraction]:
    """Conjugate to a monic family: find rational alpha with
    alpha^(d-1) = a_D and return (g, alpha) where g_t(z) = alpha f_t(z/alpha),
    so canonical heights transform as hhat_f(z) = hhat_g(alpha z).

    Raises NormalizationUnavailable when no rational alpha exists (a_D not a
    rational (d-1)-th power; for odd d this includes every negative a_D that
    is not minus a power, since d-1 is then even).
    """
    if fam.monic:
        return fam, Fraction(1)
    a = fam.lead
    k = fam.d - 1
    alpha = _rational_kth_root(a, k)
    if alpha is None:
        raise NormalizationUnavailable(
            f"a_D = {format_rational(a)} is not a rational {k}-th power"
        )
    new_form = tuple(
        fam.coefficient(j) * alpha ** (1 - fam.e * j)
        for j in range(fam.deg_form, -1, -1)
    )
    return Family(e=fam.e, form=new_form), alpha


def _iroot(n: int, k: int) -> Optional[int]:
    """Exact integer k-th root of n >= 0, or None."""
    if n == 0:
        return 0
    r = int(round(n ** (1.0 / k))) if n.bit_length() < 900 else 1 << (n.bit_length() // k + 1)
    # Newton until stable, then exact check around the candidate
    while True:
        rk = r**k
        if rk == n:
            return r
        nr = ((k - 1) * r + n // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    for cand in (r - 1, r, r + 1, r + 2):
        if cand > 0 and cand**k == n:
            return cand
    return None


def _rational_kth_root(q: Fraction, k: int) -> Optional[Fraction]:
    """Rational x with x^k = q, or None.  For even k only q > 0 can work and
    the positive root is returned; for odd k the sign carries over."""
    if q == 0:
        return Fraction(0)
    neg = q < 0
    if neg and k % 2 == 0:
        return None
    num = _iroot(abs(q.numerator), k)
    den = _iroot(q.denominator, k)
    if num is None or den is None:
        return None
    root = Fraction(num, den)
    return -root if neg else root


# ---------------------------------------------------------------------------
# parameter covers t = phi(s) = numer(s)/denom(s)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PoleGroup:
    """One Galois orbit of affine poles: the irreducible factor of the
    denominator cutting them out, the pole order, and the number of
    conjugate poles (= the factor's degree)."""

    factor: Coeffs
    order: int
    count: int
    rational_location: Optional[Fraction]

    def to_json(self) -> dict:
        return {
            "factor": [format_rational(c) for c in self.factor],
            "order": self.order,
            "count": self.count,
            "location": None
            if self.rational_location is None
            else format_rational(self.rational_location),
        }


@dataclass(frozen=True)
class CoverAnalysis:
    numer: Coeffs
    denom: Coeffs
    poles: tuple[PoleGroup, ...]
    infinity_order: int

    def affine_pole_count(self) -> int:
        return sum(g.count for g in self.poles)

    def to_json(self) -> dict:
        return {
            "numer": [format_rational(c) for c in self.numer],
            "denom": [format_rational(c) for c in self.denom],
            "poles": [g.to_json() for g in self.poles],
            "infinity_order": self.infinity_order,
        }


def analyze_cover(
    numer: Sequence[Fraction | int | str], denom: Sequence[Fraction | int | str]
) -> CoverAnalysis:
    """Pole structure of phi(t) = numer(t)/denom(t) over Q.

    Requires coprime numerator and denominator and a nonconstant map.  Poles
    in the affine line are grouped by the irreducible factors of the
    denominator (count = factor degree, order = factor multiplicity); the
    map has a pole at infinity of order deg numer - deg denom when that
    difference is positive.
    """
    nu = _polys.poly(list(numer))
    de = _polys.poly(list(denom))
    if not de:
        raise SpecError("zero denominator polynomial")
    if not nu:
        # the zero map is constant
        raise SpecError("constant map: zero numerator")
    if _polys.degree(nu) <= 0 and _polys.degree(de) <= 0:
        raise SpecError("constant map")
    g = _polys.gcd_poly(nu, de)
    if _polys.degree(g) > 0:
        raise SpecError("numer and denom share a nonconstant factor")
    groups: list[PoleGroup] = []
    if _polys.degree(de) > 0:
        _, facs = _polys.factor_over_q(de)
        for fac, mult in facs:
            degf = _polys.degree(fac)
            loc = -fac[0] / fac[1] if degf == 1 else None
            groups.append(
                PoleGroup(factor=fac, order=mult, count=degf, rational_location=loc)
            )
    inf_order = max(0, _polys.degree(nu) - _polys.degree(de))
    return CoverAnalysis(numer=nu, denom=de, poles=tuple(groups), infinity_order=inf_order)


def evaluate_cover(cov: CoverAnalysis, t: Fraction) -> Fraction:
    t = Fraction(t)
    den = _polys.evaluate(cov.denom, t)
    if den == 0:
        raise DomainError(f"t = {format_rational(t)} is a pole of the cover")
    return _polys.evaluate(cov.numer, t) / den


@dataclass(frozen=True)
class EGeneralResult:
    ok: bool
    prime_to_e_count: int
    required: int
    e: int

    def to_json(self) -> dict:
        return {
            "e_general": self.ok,
            "poles_prime_to_e": self.prime_to_e_count,
            "required": self.required,
            "e": self.e,
        }


def is_e_general(cov: CoverAnalysis, e: int) -> EGeneralResult:
    """Whether the cover has enough affine poles of order prime to e.

    Conjugate poles count separately (a degree-k irreducible factor
    contributes k); the pole at infinity never counts.
    """
    need = required_pole_count(e)
    have = sum(g.count for g in cov.poles if math.gcd(g.order, e) == 1)
    return EGeneralResult(ok=have >= need, prime_to_e_count=have, required=need, e=e)
