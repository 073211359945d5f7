"""Naive heights, local dynamical Green's functions with certified error,
canonical heights as intervals, pair (Arakelov-style) Green functions, and the
local height / conductor diagnostics lambda, N_{a,S}, L1, L2.

Conventions.  For a specialized map f(z) = sum c_i z^i of degree d >= 2 and a
place v of Q, the local Green's function is

    G_v(z) = lim_n  d^{-n} log+ |f^n(z)|_v  >= 0.

Every algorithm below is generic in the coefficients (monic is not assumed):

* finite v = p, escape: if v_p(w) is low enough that the top term strictly
  dominates -- (d - i) v(w) < v(c_i) - v(c_d) for every i < d with c_i != 0 --
  and v(f(w)) = v(c_d) + d v(w) < v(w), both conditions persist along the
  orbit, so the valuation recursion v(z_{m+1}) = v(c_d) + d v(z_m) is exact
  forever and the limit collapses to the closed form
  G = d^{-n} (-v(z_n) - v(c_d)/(d-1)) log p, an exact rational multiple of
  log p.
* finite v = p, bounded: a disk {v >= rho} with rho >= 0 is f-invariant as
  soon as v(c_0) >= rho, v(c_1) >= 0, and v(c_i) >= (1-i) rho for i >= 2
  (ultrametric term bound).  If the orbit enters a feasible disk, G = 0
  exactly; an exact repetition of the rational orbit also forces G = 0.
* finite v = p, interval: log+ |f(w)|_p <= d log+ |w|_p + C_p with
  C_p = max(0, -min_i v(c_i)) log p, so G <= d^{-n}(log+ |z_n|_p + C_p/(d-1))
  and G >= 0; the upper bound decays geometrically, giving an enclosure of
  any prescribed width for orbits that stay bounded without certification.
* archimedean, escape: for |w| >= R_esc = max(1, 2T, 2/|c_d|) with
  T = sum_{i<d} |c_i| / |c_d|, writing log|f(w)| = d log|w| + log|c_d| + eta
  with |eta| <= -log(1 - T/|w|), the orbit grows monotonically and
  G = d^{-n}(log|z_n| + log|c_d|/(d-1)) +- d^{-n} eps_n/(d-1) with
  eps_n = -log(1 - T/|z_n|) shrinking doubly exponentially.
* archimedean, bounded: log+|f(w)| <= d log+|w| + C with
  C = log max(1, sum|c_i|), giving the same geometric interval exit.

Orbits are iterated exactly (with cycle detection) while the rationals stay
small, then in windowed p-adic arithmetic / interval arithmetic with
restart-on-precision-loss.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Union

from . import _polys
from ._intervals import (
    DEFAULT_PREC,
    Interval,
    iv_from_fraction,
    iv_prec,
    iv_to_fractions,
    log_interval,
    log_plus_interval,
    sum_intervals,
)
from ._padics import PAdic
from .arith import (
    INF,
    LocalValue,
    LogSum,
    Place,
    naive_height_exact,
    padic_valuation,
    support,
    vp_or_none,
)
from .errors import BudgetExceeded, DomainError, PrecisionLoss
from .family import CoverAnalysis, Family, specialize

DEFAULT_TOL = 1e-9
_EXACT_BITS = 4096  # switch from exact rationals to windowed arithmetic
_REL_PREC0 = 64  # initial p-adic relative precision (digits)
_MAX_RESTARTS = 10

__all__ = [
    "DEFAULT_TOL",
    "GreenResult",
    "Infinity",
    "naive_height",
    "height_defect_bound",
    "local_green",
    "canonical_height",
    "arakelov_green",
    "lambda_local",
    "conductor_count",
    "l1_l2_split",
]


# ---------------------------------------------------------------------------
# naive height
# ---------------------------------------------------------------------------


def naive_height(q: Fraction) -> LogSum:
    """h(x/y) = log max(|x|, |y|) for coprime x, y, as an exact log sum."""
    return naive_height_exact(Fraction(q))


def _log_int_interval(n: int) -> Interval:
    """Certified enclosure of log n for a (possibly huge) positive integer."""
    if n <= 0:
        raise DomainError("log of a nonpositive integer")
    if n.bit_length() <= 50:
        return log_interval(Fraction(n))
    s = n.bit_length() - 50
    m = n >> s  # m 2^s <= n < (m+1) 2^s
    log2s = log_interval(Fraction(2)).scale(s)
    lo = (log_interval(Fraction(m)) + log2s).lo
    hi = (log_interval(Fraction(m + 1)) + log2s).hi
    return Interval(lo, hi)


def _naive_height_interval(q: Fraction) -> Interval:
    """Enclosure of h(q) that never factors (safe for huge rationals)."""
    n = max(abs(q.numerator), q.denominator)
    if n <= 1:
        return Interval.zero()
    return _log_int_interval(n)


# ---------------------------------------------------------------------------
# height defect bound
# ---------------------------------------------------------------------------


def _bezout_data(Fc: list[Fraction], Gc: list[Fraction], d: int):
    """Solve A(x) F(x) + B(x) G(x) = det with deg A, deg B <= d - 1.

    The 2d x 2d system is built directly from polynomial multiplication
    (rows = monomials x^0 .. x^{2d-1}, columns = unknown coefficients), so
    there is no Sylvester-orientation bookkeeping.  Returns (K, |det|) with
    K = max |cofactor coefficient| after scaling the solution by det.
    """
    size = 2 * d
    M = [[Fraction(0)] * size for _ in range(size)]
    for j in range(d):
        for r in range(size):
            if 0 <= r - j < len(Fc):
                M[r][j] = Fc[r - j]
            if 0 <= r - j < len(Gc):
                M[r][d + j] = Gc[r - j]
    det = _polys.det_exact(M)
    if det == 0:
        raise DomainError("degenerate specialized map (zero resultant)")
    rhs = [det] + [Fraction(0)] * (size - 1)
    u = _polys.solve_exact(M, rhs)
    return max(abs(x) for x in u), abs(det)


@lru_cache(maxsize=None)
def height_defect_bound(fam: Family, t: Fraction) -> float:
    """A constant C_f >= 0 with |h(f_t(w)) - d h(w)| <= C_f for all rational w.

    Upper direction: clearing denominators to integer coefficients C_i with
    multiplier L, |N(x,y)| <= (sum |C_i|) max(|x|,|y|)^d and the denominator
    form is L y^d, so h(f(w)) <= d h(w) + log max(sum|C_i|, L).

    Lower direction: two Bezout identities A N + B (L y^d) = R y^{2d-1} and
    (reversed) = R' x^{2d-1} give max(|N|, L|y|^d) >= |R| H^d / (2 d K), and
    the gcd of numerator and denominator divides R R', so
    h(f(w)) >= d h(w) - log(2 d min(K |R'|, K' |R|)) - nothing else.
    """
    t = Fraction(t)
    cs = specialize(fam, t)
    d = fam.d
    L = 1
    for c in cs:
        L = L * c.denominator // math.gcd(L, c.denominator)
    C = [c * L for c in cs]  # integer coefficients
    if L == 1 and abs(C[-1]) == 1 and all(c == 0 for c in C[:-1]):
        return 0.0  # pure +-z^d: h(f(w)) = d h(w) exactly
    upper_arg = max(sum(abs(c) for c in C), Fraction(L))
    K1, R1 = _bezout_data(list(C), [Fraction(L)], d)
    rev = list(reversed(C))
    Gstar = [Fraction(0)] * d + [Fraction(L)]
    K2, R2 = _bezout_data(rev, Gstar, d)
    lower_arg = 2 * d * min(K1 * R2, K2 * R1)
    return log_interval(max(upper_arg, lower_arg, Fraction(1))).hi


# ---------------------------------------------------------------------------
# local Green's functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GreenResult:
    """A certified local Green's function value.

    value is a LocalValue (exact rational multiple of log p) in the exact
    modes at finite places, otherwise an Interval.  exact-bounded means the
    value is exactly 0.
    """

    value: Union[LocalValue, Interval]
    mode: str  # "exact-escape" | "exact-bounded" | "interval"
    steps_used: int

    @property
    def is_exact(self) -> bool:
        return self.mode in ("exact-escape", "exact-bounded")

    def enclosure(self) -> Interval:
        if isinstance(self.value, LocalValue):
            return self.value.enclosure()
        return self.value

    def to_json(self, place: Optional[Place] = None) -> dict:
        enc = self.enclosure()
        out = {
            "value_lo": enc.lo,
            "value_hi": enc.hi,
            "mode": self.mode,
            "place": str(place) if place is not None else None,
            "steps": self.steps_used,
        }
        if isinstance(self.value, LocalValue) and self.value.is_exact:
            out["exact"] = self.value.to_json()
        return out


class _FiniteGreenData:
    """Per-(family, t, p) data for the finite-place Green algorithms."""

    def __init__(self, cs, d: int, p: int):
        self.cs = cs
        self.d = d
        self.p = p
        self.vc = [vp_or_none(c, p) for c in cs]
        self.v_lead = self.vc[-1]
        # invariant-disk feasibility window [rho_lo, rho_hi]
        rho_lo = Fraction(0)
        rho_hi: Optional[Fraction] = None
        feasible = True
        for i, v in enumerate(self.vc[:-1]):
            if v is None:
                continue
            if i == 0:
                rho_hi = Fraction(v) if rho_hi is None else min(rho_hi, Fraction(v))
            elif i == 1:
                feasible = feasible and v >= 0
            elif v < 0:
                rho_lo = max(rho_lo, Fraction(-v, i - 1))
        if self.v_lead < 0:
            rho_lo = max(rho_lo, Fraction(-self.v_lead, d - 1))
        if rho_hi is not None and rho_lo > rho_hi:
            feasible = False
        self.disk_feasible = feasible
        self.rho_lo = rho_lo
        # upper-bound constant in valuation units
        self.c_up = max([Fraction(0)] + [Fraction(-v) for v in self.vc if v is not None])

    def escaped(self, vw: int) -> bool:
        """Top-term domination that persists along the whole orbit."""
        for i in range(self.d):
            v = self.vc[i]
            if v is not None and (self.d - i) * vw >= v - self.v_lead:
                return False
        return self.v_lead + self.d * vw < vw

    def escape_value(self, vw: int, n: int) -> LocalValue:
        coeff = (Fraction(-vw) - Fraction(self.v_lead, self.d - 1)) / self.d**n
        return LocalValue.exact(coeff, self.p)

    def in_disk(self, vw: Optional[int]) -> bool:
        """vw = None encodes v = +infinity (the point 0)."""
        if not self.disk_feasible:
            return False
        return vw is None or vw >= self.rho_lo

    def upper_bound(self, vw: Optional[int], n: int) -> Fraction:
        """Exact v-unit coefficient u with G <= u * log p given v(z_n) = vw."""
        head = Fraction(0) if vw is None else max(Fraction(0), Fraction(-vw))
        return (head + self.c_up / (self.d - 1)) / self.d**n


def _finite_green(
    fam: Family, t: Fraction, p: int, z: Fraction, tol: float, budget: int
) -> GreenResult:
    cs = specialize(fam, t)
    data = _FiniteGreenData(cs, fam.d, p)
    logp_hi = log_interval(Fraction(p)).hi

    def interval_exit(vw, n):
        coeff = data.upper_bound(vw, n)
        up = log_interval(Fraction(p)).scale(coeff).hi if coeff else 0.0
        if up <= tol:
            return GreenResult(Interval(0.0, up), "interval", n)
        return None

    # phase 1: exact rational orbit with cycle detection
    z_cur = Fraction(z)
    n = 0
    seen: set[Fraction] = set()
    while n <= budget:
        vw = vp_or_none(z_cur, p)
        if vw is not None and data.escaped(vw):
            return GreenResult(data.escape_value(vw, n), "exact-escape", n)
        if data.in_disk(vw):
            return GreenResult(LocalValue.exact(Fraction(0), p), "exact-bounded", n)
        if z_cur in seen:
            # the exact orbit repeats: bounded at every place
            return GreenResult(LocalValue.exact(Fraction(0), p), "exact-bounded", n)
        exit_res = interval_exit(vw, n)
        if exit_res is not None:
            return exit_res
        if z_cur.numerator.bit_length() + z_cur.denominator.bit_length() > _EXACT_BITS:
            break
        seen.add(z_cur)
        z_cur = _polys.evaluate(cs, z_cur)
        n += 1
    if n > budget:
        coeff = data.upper_bound(vp_or_none(z_cur, p), n)
        raise BudgetExceeded(
            f"no certificate for G_{p} after {n} steps",
            best=(0.0, float(coeff) * logp_hi),
            steps=n,
        )

    # phase 2: windowed p-adic orbit, restarting with more digits on loss
    snapshot, n0 = z_cur, n
    rel = _REL_PREC0
    for _ in range(_MAX_RESTARTS):
        try:
            v0 = vp_or_none(snapshot, p)
            x = PAdic.from_fraction(snapshot, p, (0 if v0 is None else v0) + rel)
            cs_p = [PAdic.from_fraction(c, p, (vp_or_none(c, p) or 0) + rel) for c in cs]
            n = n0
            while n <= budget:
                vw = x.valuation_exact()
                if vw is not None and data.escaped(vw):
                    return GreenResult(data.escape_value(vw, n), "exact-escape", n)
                if x.is_zeroish and not data.in_disk(x.abs_prec):
                    raise PrecisionLoss("zeroish value below disk threshold")
                if data.in_disk(x.abs_prec if x.is_zeroish else vw):
                    return GreenResult(
                        LocalValue.exact(Fraction(0), p), "exact-bounded", n
                    )
                exit_res = interval_exit(vw, n)
                if exit_res is not None:
                    return exit_res
                acc = cs_p[-1]
                for c in reversed(cs_p[:-1]):
                    acc = acc * x + c
                x = acc
                n += 1
            coeff = data.upper_bound(x.valuation_exact(), n)
            raise BudgetExceeded(
                f"no certificate for G_{p} after {n} steps",
                best=(0.0, float(coeff) * logp_hi),
                steps=n,
            )
        except PrecisionLoss:
            rel *= 2
    raise BudgetExceeded(
        f"p-adic precision exhausted for G_{p}", best=None, steps=n0
    )


def _arch_green(
    fam: Family, t: Fraction, z: Fraction, tol: float, budget: int
) -> GreenResult:
    cs = specialize(fam, t)
    d = fam.d
    lead = abs(cs[-1])
    T = sum(abs(c) for c in cs[:-1]) / lead
    r_esc = max(Fraction(1), 2 * T, Fraction(2) / lead)
    c_up = log_interval(max(Fraction(1), sum(abs(c) for c in cs)))
    lead_term = log_interval(lead).scale(Fraction(1, d - 1))
    best_upper = math.inf

    prec = DEFAULT_PREC
    for _ in range(_MAX_RESTARTS):
        with iv_prec(prec):
            z_iv = iv_from_fraction(z)
            cs_iv = [iv_from_fraction(c) for c in cs]
            n = 0
            restart = False
            while n <= budget and not restart:
                az_lo, az_hi = iv_to_fractions(abs(z_iv))  # |z_n| exactly
                # bounded exit
                logplus_hi = 0.0 if az_hi <= 1 else log_interval(az_hi).hi
                upper = (
                    (Interval(0.0, logplus_hi) + c_up.scale(Fraction(1, d - 1)))
                    .scale(Fraction(1, d**n))
                    .hi
                )
                best_upper = min(best_upper, upper)
                if upper <= tol:
                    return GreenResult(Interval(0.0, upper), "interval", n)
                # escape refinement
                if az_lo > r_esc:
                    ratio = T / az_lo  # <= 1/2 in the escape region
                    eps_hi = -log_interval(1 - ratio).lo
                    log_az = Interval(log_interval(az_lo).lo, log_interval(az_hi).hi)
                    tail = Interval(-eps_hi, eps_hi).scale(Fraction(1, d - 1))
                    enc = (log_az + lead_term + tail).scale(Fraction(1, d**n))
                    if enc.width <= tol:
                        return GreenResult(enc.clamp_nonneg(), "interval", n)
                # precision health: relative width of |z_n|
                if az_hi > 0 and float((az_hi - az_lo) / max(az_hi, Fraction(1))) > 1e-10:
                    restart = True
                    continue
                acc = cs_iv[-1]
                for c in reversed(cs_iv[:-1]):
                    acc = acc * z_iv + c
                z_iv = acc
                n += 1
            if not restart:
                raise BudgetExceeded(
                    f"no certificate for G_inf after {n} steps",
                    best=(0.0, best_upper),
                    steps=n,
                )
        prec *= 2
    raise BudgetExceeded(
        "interval precision exhausted for G_inf", best=(0.0, best_upper), steps=budget
    )


def local_green(
    fam: Family,
    t: Fraction,
    v: Place,
    z: Fraction,
    tol: float = DEFAULT_TOL,
    budget: Optional[int] = None,
) -> GreenResult:
    """Certified G_{f_t, v}(z); see the module docstring for the algorithms.

    Finite places produce exact modes whenever the orbit certifiably escapes
    (rational multiple of log p), enters an invariant disk, or repeats; the
    interval mode covers bounded-but-uncertified orbits with a [0, <= tol]
    enclosure.  The archimedean place always reports an interval of width
    <= tol.  Raises BudgetExceeded (carrying the best enclosure) if the step
    budget runs out first.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    t, z = Fraction(t), Fraction(z)
    if budget is None:
        budget = 64 * fam.d
    if v.is_archimedean:
        return _arch_green(fam, t, z, tol, budget)
    return _finite_green(fam, t, v.prime, z, tol, budget)


# ---------------------------------------------------------------------------
# canonical height
# ---------------------------------------------------------------------------


def _height_places(fam: Family, t: Fraction, z: Fraction) -> list[Place]:
    """Places where G can be nonzero: infinity plus primes dividing any
    specialized-coefficient denominator or the denominator of z (everywhere
    else the orbit stays p-integral, so G = 0)."""
    primes: set[int] = set()
    for c in specialize(fam, t):
        if c != 0:
            primes.update(support(Fraction(c.denominator)))
    primes.update(support(Fraction(z.denominator)))
    return [INF] + [Place.finite(p) for p in sorted(primes)]


def canonical_height(
    fam: Family,
    t: Fraction,
    z: Fraction,
    tol: float = DEFAULT_TOL,
    method: str = "local",
    budget: Optional[int] = None,
) -> Interval:
    """Certified enclosure of the canonical height h_hat_{f_t}(z), width <= tol.

    method "local" (default): sum of local_green over the finite set of
    places where G can be nonzero.  method "global": telescoping
    d^{-N} h(f^N z) with the height-defect tail C_f/((d-1) d^{N-1}); its cost
    grows as d^N, so it is practical only for loose tolerances and is meant
    as an independent cross-check of the local method.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    t, z = Fraction(t), Fraction(z)
    if method == "global":
        return _canonical_global(fam, t, z, tol)
    if method != "local":
        raise DomainError(f"unknown canonical height method: {method!r}")
    places = _height_places(fam, t, z)
    n_fin = len(places) - 1
    parts = []
    for v in places:
        tol_v = tol / 2 if v.is_archimedean else tol / (2 * max(1, n_fin))
        parts.append(local_green(fam, t, v, z, tol_v, budget).enclosure())
    return sum_intervals(parts).clamp_nonneg()


def _canonical_global(fam: Family, t: Fraction, z: Fraction, tol: float) -> Interval:
    d = fam.d
    cf = height_defect_bound(fam, t)
    if cf == 0:
        n_steps = 1
    else:
        n_steps = 1 + max(0, math.ceil(math.log(2 * cf / ((d - 1) * tol)) / math.log(d)))
    base_bits = (
        z.numerator.bit_length()
        + z.denominator.bit_length()
        + max(
            c.numerator.bit_length() + c.denominator.bit_length()
            for c in specialize(fam, t)
        )
    )
    if base_bits * d**n_steps > 4_000_000:
        raise DomainError(
            "tolerance too tight for the global telescoping method; "
            "use the local method"
        )
    cs = specialize(fam, t)
    w = z
    for _ in range(n_steps):
        w = _polys.evaluate(cs, w)
    tail = cf / ((d - 1) * d ** (n_steps - 1))
    h_n = _naive_height_interval(w).scale(Fraction(1, d**n_steps))
    return (h_n + Interval(-tail, tail)).clamp_nonneg()


# ---------------------------------------------------------------------------
# pair (Arakelov-style) Green function
# ---------------------------------------------------------------------------


def arakelov_green(
    fam: Family,
    t: Fraction,
    v: Place,
    x: Fraction,
    y: Fraction,
    tol: float = DEFAULT_TOL,
    budget: Optional[int] = None,
) -> Interval:
    """Enclosure of g_{f_t, v}(x, y) = -log|x - y|_v + G_v(x) + G_v(y)."""
    x, y = Fraction(x), Fraction(y)
    if x == y:
        raise DomainError("pair Green function diverges on the diagonal")
    if v.is_archimedean:
        dist = -log_interval(abs(x - y))
        dist = Interval(dist.lo, dist.hi)
    else:
        vd = padic_valuation(x - y, v.prime)
        dist = log_interval(Fraction(v.prime)).scale(vd)  # -log|x-y|_p = vd log p
    gx = local_green(fam, t, v, x, tol / 4, budget).enclosure()
    gy = local_green(fam, t, v, y, tol / 4, budget).enclosure()
    return dist + gx + gy


# ---------------------------------------------------------------------------
# local height lambda, conductor N_{a,S}, and the L1/L2 split
# ---------------------------------------------------------------------------

Infinity = object()  # sentinel for a = infinity


def _lambda_argument(a, t: Fraction) -> Optional[Fraction]:
    """The quantity whose valuation lambda measures: t - a, or 1/t when
    a = infinity.  t = a raises.  For a = infinity, t = 0 the argument is
    1/0, i.e. t is as far from the target as possible (v = -infinity at
    every place); that case is encoded as None and every lambda is 0."""
    if a is Infinity or a == "inf":
        if t == 0:
            return None
        return 1 / t
    a = Fraction(a)
    if t == a:
        raise DomainError("lambda_[a] has a pole at t = a")
    return t - a


def lambda_local(a, v: Place, t: Fraction) -> LocalValue:
    """Local height of t relative to a: max{0, v(t-a)} log p at finite
    places, log+ |1/(t-a)| at the archimedean place; a = infinity replaces
    t - a by 1/t."""
    t = Fraction(t)
    s = _lambda_argument(a, t)
    if v.is_archimedean:
        if s is None:
            return LocalValue.interval(0.0, 0.0)
        enc = log_plus_interval(Fraction(1) / s)
        return LocalValue.interval(enc.lo, enc.hi)
    if s is None:
        return LocalValue.exact(Fraction(0), v.prime)
    val = max(0, padic_valuation(s, v.prime))
    return LocalValue.exact(Fraction(val), v.prime)


def conductor_count(a, S: Iterable[Place], t: Fraction) -> LogSum:
    """N_{a,S}(t) = sum of log p over finite p not in S with v_p(t - a) > 0
    (the radical count, not multiplicity-weighted)."""
    t = Fraction(t)
    s = _lambda_argument(a, t)
    excluded = {pl.prime for pl in S if not pl.is_archimedean}
    out = LogSum.zero()
    if s is None:
        return out
    # v_p(s) > 0 exactly for p dividing the numerator of s
    for p in support(Fraction(abs(s.numerator))):
        if p not in excluded:
            out = out + LogSum.single(Fraction(1), p)
    return out


def l1_l2_split(
    cov: CoverAnalysis, e: int, S: Iterable[Place], t: Fraction
) -> tuple[LogSum, LogSum]:
    """Split of the pole-proximity height of t into the part with valuations
    not divisible by e (L1) and the e-divisible part scaled by 1/e (L2).

    Runs over the cover's pole groups whose order is prime to e (the groups
    that obstruct e-th power solvability); a group of conjugate irrational
    poles contributes through its monic irreducible factor q, whose value
    q(t) = prod_i (t - a_i) aggregates the conjugates without leaving Q.
    """
    t = Fraction(t)
    excluded = {pl.prime for pl in S if not pl.is_archimedean}
    l1 = LogSum.zero()
    l2 = LogSum.zero()
    for group in cov.poles:
        if math.gcd(group.order, e) != 1:
            continue
        q = group.factor
        val = _polys.evaluate(q, t) / q[-1]  # monic product over conjugates
        if val == 0:
            raise DomainError("t coincides with a pole of the cover")
        for p in support(val):
            vp = padic_valuation(val, p)
            if vp <= 0 or p in excluded:
                continue
            if vp % e:
                l1 = l1 + LogSum.single(Fraction(vp), p)
            else:
                l2 = l2 + LogSum.single(Fraction(vp, e), p)
    return l1, l2
