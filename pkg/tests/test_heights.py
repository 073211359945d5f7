"""Heights module: pinned values, certified enclosures, defining inequalities."""
import math
import random
from fractions import Fraction

import pytest

from heightforge.arith import INF, LocalValue, LogSum, Place, padic_valuation, support
from heightforge.constants import exceptional_places, mk_a, mk_b
from heightforge.errors import BudgetExceeded, DomainError
from heightforge.family import analyze_cover, build_family, specialize
from heightforge import _polys as P
from heightforge.heights import (
    GreenResult,
    Infinity,
    arakelov_green,
    canonical_height,
    conductor_count,
    height_defect_bound,
    l1_l2_split,
    lambda_local,
    local_green,
    naive_height,
)
from heightforge.heights import _log_int_interval, _naive_height_interval

Z2T = build_family([1, 1], 2)


# -- naive height -----------------------------------------------------------------


def test_naive_height_examples():
    assert naive_height(Fraction(1, 3)) == LogSum.single(Fraction(1), 3)
    assert naive_height(Fraction(7)) == LogSum.single(Fraction(1), 7)
    assert naive_height(Fraction(-5, 2)) == LogSum.single(Fraction(1), 5)
    assert naive_height(Fraction(0)).is_zero()
    assert naive_height(Fraction(1)).is_zero()


def test_log_int_interval_huge():
    n = 3**400 + 17
    enc = _log_int_interval(n)
    ref = 400 * math.log(3)  # log(3^400 + 17) ~ 400 log 3 + 17*3^-400
    assert enc.lo <= ref <= enc.hi + 1e-9
    assert enc.width < 1e-12 * ref
    with pytest.raises(DomainError):
        _log_int_interval(0)


# -- height defect bound ----------------------------------------------------------


def test_defect_pure_power():
    assert height_defect_bound(Z2T, Fraction(0)) == 0.0
    assert height_defect_bound(build_family([-1, 0, 1], 2), Fraction(0)) == 0.0


def test_defect_z2_minus_1_exhaustive():
    fam = build_family([1, -1], 2)
    cf = height_defect_bound(fam, Fraction(1))
    assert cf >= math.log(2) - 1e-12
    for a in range(-50, 51):
        for b in range(1, 51):
            w = Fraction(a, b)
            defect = abs(
                float(naive_height(w * w - 1)) - 2 * float(naive_height(w))
            )
            assert defect <= cf + 1e-9


def test_defect_randomized():
    rng = random.Random(5001)
    fams_ts = [
        (Z2T, Fraction(1, 3)),
        (build_family([1, -3, 1], 3), Fraction(2, 5)),
        (build_family([3, 1], 2), Fraction(-7, 2)),  # non-monic
    ]
    for fam, t in fams_ts:
        cf = height_defect_bound(fam, t)
        assert cf >= 0
        cs = specialize(fam, t)
        for _ in range(300):
            w = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
            # interval (factoring-free) heights: f(w) has ~36-digit entries
            defect = abs(
                _naive_height_interval(P.evaluate(cs, w)).mid
                - fam.d * _naive_height_interval(w).mid
            )
            assert defect <= cf + 1e-6


# -- local Green's functions: pinned examples --------------------------------------


def test_green_good_reduction_integral():
    r = local_green(Z2T, Fraction(1), Place.finite(2), Fraction(3))
    assert r.mode == "exact-bounded"
    assert isinstance(r.value, LocalValue) and r.value.coeff == 0


def test_green_immediate_escape():
    r = local_green(Z2T, Fraction(1), Place.finite(2), Fraction(1, 2))
    assert r.mode == "exact-escape"
    assert r.value.coeff == 1 and r.value.prime == 2  # G = log 2


def test_green_delayed_escape():
    r = local_green(Z2T, Fraction(1, 9), Place.finite(3), Fraction(1, 3))
    assert r.mode == "exact-escape"
    assert r.value.coeff == 1 and r.value.prime == 3  # G = (1/2) log 9 = log 3


def test_green_exact_cycle():
    # 1/2 is a fixed point of z^2 + 1/4; no invariant disk exists at p = 2
    r = local_green(build_family([1, 1], 2), Fraction(1, 4), Place.finite(2), Fraction(1, 2))
    assert r.mode == "exact-bounded"


def test_green_bounded_shell_interval():
    # z = 3/2 under z^2 + 1/4 stays in the shell v_2 = -1 forever: bounded but
    # never certified exactly; the geometric upper bound gives [0, <= tol]
    r = local_green(Z2T, Fraction(1, 4), Place.finite(2), Fraction(3, 2), tol=1e-9)
    assert r.mode == "interval"
    enc = r.enclosure()
    assert enc.lo == 0.0 and enc.hi <= 1e-9


def test_green_arch_power_map():
    r = local_green(Z2T, Fraction(0), INF, Fraction(2), tol=1e-10)
    enc = r.enclosure()
    assert enc.width <= 1e-10
    assert enc.lo <= math.log(2) <= enc.hi
    r0 = local_green(Z2T, Fraction(0), INF, Fraction(1, 2), tol=1e-10)
    assert r0.enclosure().hi <= 1e-10


def test_green_arch_escape_large():
    r = local_green(Z2T, Fraction(1), INF, Fraction(100), tol=1e-12)
    enc = r.enclosure()
    # G(100) = log 100 + sum 2^-k-1 log(1 + t/z_k^2) in [log 100, log 100 + 1e-4]
    assert enc.lo >= math.log(100) - 1e-12
    assert enc.hi <= math.log(100) + 1e-4
    assert enc.width <= 1e-12


def test_green_budget_exceeded():
    with pytest.raises(BudgetExceeded) as ei:
        local_green(Z2T, Fraction(1, 4), Place.finite(2), Fraction(3, 2), tol=1e-30, budget=5)
    assert ei.value.best is not None
    lo, hi = ei.value.best
    assert lo == 0.0 and hi > 0


def test_green_json_shape():
    r = local_green(Z2T, Fraction(1), Place.finite(2), Fraction(1, 2))
    js = r.to_json(Place.finite(2))
    assert set(js) >= {"value_lo", "value_hi", "mode", "place", "steps"}
    assert js["place"] == "2" and js["mode"] == "exact-escape"
    assert js["exact"] == {"coeff": "1", "prime": 2}


def test_green_rejects_bad_tol():
    with pytest.raises(DomainError):
        local_green(Z2T, Fraction(1), INF, Fraction(1), tol=0.0)


# -- Green's function invariants ----------------------------------------------------


def _random_family(rng, monic=True):
    e = rng.choice([2, 2, 3])
    deg = rng.choice([1, 1, 2])
    lead = 1 if monic else rng.choice([1, 2, -3])
    coeffs = [lead] + [
        Fraction(rng.randint(-5, 5), rng.choice([1, 1, 2, 3])) for _ in range(deg)
    ]
    if coeffs[-1] == 0:
        coeffs[-1] = Fraction(rng.choice([1, -1, 2]))
    return build_family(coeffs, e)


def test_green_nonnegative_random():
    rng = random.Random(5002)
    for _ in range(250):
        fam = _random_family(rng, monic=rng.random() < 0.8)
        t = Fraction(rng.randint(-40, 40), rng.randint(1, 20))
        z = Fraction(rng.randint(-40, 40), rng.randint(1, 20))
        v = rng.choice([INF, Place.finite(2), Place.finite(3), Place.finite(5)])
        r = local_green(fam, t, v, z, tol=1e-7)
        enc = r.enclosure()
        assert enc.hi >= enc.lo >= -1e-15
        if r.is_exact:
            assert isinstance(r.value, LocalValue)
            assert r.value.coeff >= 0
            if r.mode == "exact-bounded":
                assert r.value.coeff == 0


def test_green_escape_lower_bound_off_exceptional():
    # for v outside the exceptional places with |t|_v > 1 and e not dividing
    # v(t):  G >= (1/d) log+ |t|_v, exactly
    rng = random.Random(5003)
    checked = 0
    for _ in range(400):
        fam = _random_family(rng, monic=True)
        p = rng.choice([5, 7, 11, 13])
        if Place.finite(p) in exceptional_places(fam):
            continue
        k = rng.choice([1, 3, 5, 7])  # e never divides odd k for e in {2}, keep general
        if k % fam.e == 0:
            continue
        u_num = rng.choice([1, 2, 3, 4, 6])
        if u_num % p == 0:
            continue
        t = Fraction(u_num, p**k)
        zs = [
            Fraction(rng.randint(1, 30)),
            Fraction(p ** rng.randint(1, 3)),  # |z|_v small
            Fraction(rng.randint(1, 20), p),
            Fraction(0),
        ]
        for z in zs:
            r = local_green(fam, t, Place.finite(p), z)
            assert r.mode == "exact-escape"
            assert r.value.prime == p
            assert r.value.coeff >= Fraction(k, fam.d)
            checked += 1
    assert checked > 200


# -- canonical height ---------------------------------------------------------------


def test_canonical_preperiodic_zero():
    h = canonical_height(Z2T, Fraction(-1), Fraction(0), 1e-9)
    assert 0 <= h.lo <= h.hi <= 1e-9


def test_canonical_power_map():
    h = canonical_height(Z2T, Fraction(0), Fraction(2), 1e-9)
    assert h.lo <= math.log(2) <= h.hi
    assert h.width <= 1e-9


def test_canonical_basilica_point():
    # orbit of 1 under z^2 + 1: 1, 2, 5, 26, 677, ...
    h = canonical_height(Z2T, Fraction(1), Fraction(1), 1e-9)
    assert h.width <= 1e-9
    # 16-step telescoping reference: log(f^4(1)) / 16 = log(677)/16 ~ 0.40727
    assert abs(h.mid - 0.4073) < 2e-4
    # nesting: tighter tolerance stays inside looser enclosure
    loose = canonical_height(Z2T, Fraction(1), Fraction(1), 1e-5)
    assert loose.lo - 1e-12 <= h.lo and h.hi <= loose.hi + 1e-12


def test_canonical_denominator_place():
    # z = 1/7, t = 1: G_7 = log 7 exactly, G_inf and G_2,3 small
    h = canonical_height(Z2T, Fraction(1), Fraction(1, 7), 1e-9)
    g7 = local_green(Z2T, Fraction(1), Place.finite(7), Fraction(1, 7))
    assert g7.mode == "exact-escape" and g7.value.coeff == 1
    assert h.lo >= math.log(7) - 1e-9


def test_canonical_local_global_agreement():
    rng = random.Random(5004)
    for _ in range(60):
        fam = _random_family(rng, monic=rng.random() < 0.7)
        t = Fraction(rng.randint(-12, 12), rng.randint(1, 8))
        z = Fraction(rng.randint(-12, 12), rng.randint(1, 8))
        tol = 0.05
        h_loc = canonical_height(fam, t, z, tol)
        h_glob = canonical_height(fam, t, z, 0.2, method="global")
        assert h_loc.overlaps(h_glob), (fam, t, z, h_loc, h_glob)


def test_canonical_functional_equation():
    rng = random.Random(5005)
    for _ in range(120):
        fam = _random_family(rng, monic=True)
        t = Fraction(rng.randint(-9, 9), rng.choice([1, 1, 2, 3]))
        z = Fraction(rng.randint(-9, 9), rng.choice([1, 1, 2, 3]))
        tol = 1e-7
        fz = P.evaluate(specialize(fam, t), z)
        h_fz = canonical_height(fam, t, fz, tol)
        h_z = canonical_height(fam, t, z, tol)
        scaled = h_z.scale(Fraction(fam.d))
        # d*hat(z) and hat(f z) must overlap up to combined widths
        assert h_fz.lo <= scaled.hi + 3 * tol and scaled.lo <= h_fz.hi + 3 * tol


def test_canonical_rejects_bad_method():
    with pytest.raises(DomainError):
        canonical_height(Z2T, Fraction(1), Fraction(1), 1e-9, method="nope")


def test_global_method_guards_tolerance():
    with pytest.raises(DomainError):
        canonical_height(Z2T, Fraction(1, 3), Fraction(5, 7), 1e-9, method="global")


# -- pair Green function --------------------------------------------------------------


def test_arakelov_examples():
    g = arakelov_green(Z2T, Fraction(-1), Place.finite(5), Fraction(0), Fraction(1))
    assert abs(g.mid) <= 1e-12 and g.width <= 1e-9
    g = arakelov_green(Z2T, Fraction(-1), Place.finite(2), Fraction(0), Fraction(2))
    assert g.lo <= math.log(2) <= g.hi
    g = arakelov_green(
        Z2T, Fraction(1, 9), Place.finite(3), Fraction(1, 3), Fraction(2, 3)
    )
    assert g.lo <= math.log(3) <= g.hi and g.width <= 1e-9


def test_arakelov_diagonal_error():
    with pytest.raises(DomainError):
        arakelov_green(Z2T, Fraction(1), INF, Fraction(1, 2), Fraction(1, 2))


def test_arakelov_good_reduction_lower_bound():
    # for |t|_v <= 1 and distinct x, y: g_v(x,y) >= -max(a_v, b_v) - log 2_v
    rng = random.Random(5006)
    for _ in range(150):
        fam = _random_family(rng, monic=True)
        v = rng.choice([INF, Place.finite(2), Place.finite(3), Place.finite(5)])
        # draw t with |t|_v <= 1
        while True:
            t = Fraction(rng.randint(-20, 20), rng.randint(1, 20))
            if v.is_archimedean:
                if abs(t) <= 1:
                    break
            elif padic_valuation(t, v.prime) >= 0 if t != 0 else True:
                break
        x = Fraction(rng.randint(-15, 15), rng.randint(1, 10))
        y = Fraction(rng.randint(-15, 15), rng.randint(1, 10))
        if x == y:
            continue
        g = arakelov_green(fam, t, v, x, y, tol=1e-8)
        bound = mk_a(fam).at(v)
        b_arch = mk_b(fam).at(v)
        if b_arch.compare(bound) > 0:
            bound = b_arch
        if v.is_archimedean:
            bound = bound + LogSum.single(Fraction(1), 2)
        bound_enc = bound.enclosure()
        assert g.hi >= -bound_enc.hi - 1e-9, (fam, t, v, x, y, g)


# -- lambda, conductor, L1/L2 ----------------------------------------------------------


def test_lambda_examples():
    assert lambda_local(Fraction(0), Place.finite(3), Fraction(9)).coeff == 2
    assert lambda_local(Fraction(0), Place.finite(3), Fraction(1, 3)).coeff == 0
    assert lambda_local(Infinity, Place.finite(2), Fraction(1, 8)).coeff == 3


def test_lambda_arch_and_errors():
    lv = lambda_local(Fraction(0), INF, Fraction(1, 2))  # log+ |1/(1/2)| = log 2
    assert lv.lo <= math.log(2) <= lv.hi
    lv = lambda_local(Fraction(0), INF, Fraction(3))  # log+ (1/3) = 0
    assert lv.lo == lv.hi == 0.0
    with pytest.raises(DomainError):
        lambda_local(Fraction(2), Place.finite(3), Fraction(2))
    # a = infinity, t = 0: maximally far from infinity, every lambda is 0
    assert lambda_local(Infinity, Place.finite(5), Fraction(0)).coeff == 0


def test_lambda_nonnegative_and_sum_bound():
    # sum over places of lambda_[a](t) <= h(t) + h(a) + log 2, with the
    # explicit O_a(1); checked over random rational a, t
    rng = random.Random(5007)
    for _ in range(300):
        a = Fraction(rng.randint(-30, 30), rng.randint(1, 12))
        t = Fraction(rng.randint(-30, 30), rng.randint(1, 12))
        if t == a:
            continue
        s = t - a
        # places where lambda can be nonzero: primes dividing the numerator of t - a
        places = [INF] + [Place.finite(p) for p in support(Fraction(abs(s.numerator)))]
        total = 0.0
        for v in places:
            lv = lambda_local(a, v, t)
            enc = lv.enclosure()
            assert enc.hi >= enc.lo >= -1e-15
            total += enc.hi
        bound = (
            float(naive_height(t)) + float(naive_height(a)) + math.log(2) + 1e-9
        )
        assert total <= bound, (a, t, total, bound)


def test_conductor_examples():
    assert conductor_count(Fraction(0), [INF], Fraction(12)) == LogSum(
        {2: Fraction(1), 3: Fraction(1)}
    )
    assert conductor_count(Fraction(0), [INF, Place.finite(2)], Fraction(12)) == (
        LogSum.single(Fraction(1), 3)
    )
    assert conductor_count(Fraction(1), [INF], Fraction(10)) == LogSum.single(
        Fraction(1), 3
    )
    assert conductor_count(Infinity, [INF], Fraction(0)).is_zero()
    with pytest.raises(DomainError):
        conductor_count(Fraction(3), [INF], Fraction(3))


def test_l1_l2_examples():
    cov = analyze_cover([Fraction(1)], [Fraction(0), Fraction(1)])  # 1/t, pole {0}
    l1, l2 = l1_l2_split(cov, 2, [INF], Fraction(1, 8))
    assert l1.is_zero() and l2.is_zero()
    l1, l2 = l1_l2_split(cov, 2, [INF], Fraction(8))
    assert l1 == LogSum.single(Fraction(3), 2) and l2.is_zero()
    l1, l2 = l1_l2_split(cov, 2, [INF], Fraction(4))
    assert l1.is_zero() and l2 == LogSum.single(Fraction(1), 2)


def test_l1_l2_grouped_conjugates_and_errors():
    # 1/(1+t^5): rational pole -1 and an irreducible quartic pole group
    cov = analyze_cover([Fraction(1)], [Fraction(1), 0, 0, 0, 0, Fraction(1)])
    l1, l2 = l1_l2_split(cov, 2, [INF], Fraction(1))
    # q1(t) = t+1 -> 2 (v2 = 1, odd); quartic(1) = 1 (no contribution)
    assert l1 == LogSum.single(Fraction(1), 2) and l2.is_zero()
    with pytest.raises(DomainError):
        l1_l2_split(cov, 2, [INF], Fraction(-1))


def test_l1_l2_skips_e_divisible_orders():
    # pole order 2 with e = 2 is not prime to e: contributes nothing
    cov = analyze_cover([Fraction(1)], [Fraction(1), Fraction(2), Fraction(1)])
    l1, l2 = l1_l2_split(cov, 2, [INF], Fraction(1))
    assert l1.is_zero() and l2.is_zero()
