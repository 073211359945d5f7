"""Exact arithmetic substrate: rationals, places, valuations, log sums,
Newton polygons."""
import math
import random
from fractions import Fraction

import pytest
import sympy

from heightforge.arith import (
    INF,
    LocalValue,
    LogSum,
    Place,
    factor_integer,
    format_rational,
    is_prime,
    log_plus,
    newton_polygon,
    padic_valuation,
    parse_rational,
    support,
    vp_or_none,
)
from heightforge.errors import DomainError, SpecError


# -- rational parsing --------------------------------------------------------


def test_parse_format_roundtrip():
    rng = random.Random(101)
    for _ in range(200):
        q = Fraction(rng.randint(-10**9, 10**9), rng.randint(1, 10**9))
        assert parse_rational(format_rational(q)) == q
    assert parse_rational("-3/7") == Fraction(-3, 7)
    assert parse_rational("5") == 5
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 3)) == "-1/3"


def test_parse_rational_rejects_garbage():
    for bad in ["", "1/0", "x", "1.5.2", "2/3/4"]:
        with pytest.raises(SpecError):
            parse_rational(bad)


# -- primes and factoring ----------------------------------------------------


def test_is_prime_small_range():
    for n in range(-2, 2000):
        assert is_prime(n) == sympy.isprime(n)


def test_is_prime_large_random():
    rng = random.Random(202)
    for _ in range(60):
        n = rng.randint(10**12, 10**15)
        assert is_prime(n) == sympy.isprime(n)


def test_factor_integer_matches_sympy():
    rng = random.Random(303)
    samples = [2, 3, 4, 12, 360, 2**20, 10**12 + 39]
    samples += [rng.randint(2, 10**12) for _ in range(40)]
    for n in samples:
        mine = factor_integer(n)
        assert mine == dict(sympy.factorint(n))
        # keys sorted, exponents positive, product reconstructs n
        assert list(mine) == sorted(mine)
        assert math.prod(p**e for p, e in mine.items()) == n


def test_factor_integer_edge_cases():
    assert factor_integer(1) == {}
    with pytest.raises(DomainError):
        factor_integer(0)
    assert factor_integer(-12) == {2: 2, 3: 1}


def test_support():
    assert support(Fraction(6, 35)) == [2, 3, 5, 7]
    assert support(Fraction(1)) == []
    assert support(Fraction(-8)) == [2]
    with pytest.raises(DomainError):
        support(Fraction(0))


# -- places ------------------------------------------------------------------


def test_place_construction_and_parse():
    assert INF.is_archimedean
    assert str(INF) == "inf"
    p7 = Place.finite(7)
    assert not p7.is_archimedean and p7.prime == 7
    assert Place.parse("inf") == INF
    assert Place.parse("7") == p7
    with pytest.raises(SpecError):
        Place.finite(4)
    with pytest.raises(SpecError):
        Place.parse("abc")


def test_place_sorting():
    places = [Place.finite(5), INF, Place.finite(2), Place.archimedean()]
    ordered = sorted(places, key=Place.sort_key)
    assert ordered[0].is_archimedean and ordered[1].is_archimedean
    assert [pl.prime for pl in ordered[2:]] == [2, 5]


# -- valuations and the product formula ---------------------------------------


def test_padic_valuation_basics():
    assert padic_valuation(Fraction(12), 2) == 2
    assert padic_valuation(Fraction(5, 8), 2) == -3
    assert padic_valuation(Fraction(7, 3), 5) == 0
    with pytest.raises(DomainError):
        padic_valuation(Fraction(0), 2)
    assert vp_or_none(Fraction(0), 2) is None


def test_valuation_additive():
    rng = random.Random(404)
    for _ in range(100):
        a = Fraction(rng.randint(1, 10**6), rng.randint(1, 10**6))
        b = Fraction(rng.randint(1, 10**6), rng.randint(1, 10**6))
        for p in (2, 3, 5, 7):
            assert padic_valuation(a * b, p) == padic_valuation(a, p) + padic_valuation(b, p)


def test_product_formula_exact():
    # |q|_inf * prod_p |q|_p = 1, i.e. |q| = prod_p p^(v_p(q)) exactly
    rng = random.Random(505)
    for _ in range(100):
        q = Fraction(rng.randint(1, 10**9), rng.randint(1, 10**9))
        prod = Fraction(1)
        for p in support(q):
            prod *= Fraction(p) ** padic_valuation(q, p)
        assert prod == abs(q)


# -- LocalValue / LogSum ------------------------------------------------------


def test_local_value_roundtrip_and_enclosure():
    lv = LocalValue.exact(Fraction(3, 2), 2)
    assert LocalValue.from_json(lv.to_json()) == lv
    enc = lv.enclosure()
    assert enc.lo <= 1.5 * math.log(2) <= enc.hi
    assert enc.width < 1e-12

    iv_val = LocalValue.interval(0.5, 0.75)
    assert LocalValue.from_json(iv_val.to_json()) == iv_val
    assert iv_val.enclosure().lo == 0.5

    zero = LocalValue.exact(Fraction(0), 3)
    assert zero.enclosure().lo == 0.0 == zero.enclosure().hi


def test_logsum_compare_exact():
    # 2^3 < 3^2  =>  (3/2) log 2 < log 3
    a = LogSum.single(Fraction(3, 2), 2)
    b = LogSum.single(Fraction(1), 3)
    assert a.compare(b) == -1
    assert b.compare(a) == 1
    # log 2 + log 3 > log 5
    c = LogSum({2: Fraction(1), 3: Fraction(1)})
    assert c.compare(LogSum.single(Fraction(1), 5)) == 1
    # 3 log 2 = log 8 is the same formal sum: equality
    assert LogSum.single(Fraction(3), 2) == LogSum({2: Fraction(3)})
    assert LogSum.zero().compare(LogSum.zero()) == 0
    # near-tie that floats would struggle with: compare 485 log 3 vs 769 log 2
    # (3^485 vs 2^769; ratio within 2e-4 of 1)
    big_a = LogSum.single(Fraction(485), 3)
    big_b = LogSum.single(Fraction(769), 2)
    assert big_a.compare(big_b) == (1 if 3**485 > 2**769 else -1)


def test_logsum_enclosure_contains_float():
    rng = random.Random(606)
    for _ in range(50):
        terms = {
            p: Fraction(rng.randint(-20, 20), rng.randint(1, 9))
            for p in rng.sample([2, 3, 5, 7, 11, 13], k=3)
        }
        ls = LogSum(terms)
        enc = ls.enclosure()
        ref = sum(float(c) * math.log(p) for p, c in terms.items())
        assert enc.lo - 1e-9 <= ref <= enc.hi + 1e-9
        # endpoints are float64, so a few ulps is the best possible width
        assert enc.width < 1e-13 * max(1.0, abs(ref))


def test_logsum_algebra():
    a = LogSum({2: Fraction(1, 2), 5: Fraction(-2)})
    b = LogSum({2: Fraction(-1, 2), 3: Fraction(4)})
    s = a + b
    assert s.terms == {5: Fraction(-2), 3: Fraction(4)}
    assert a.scale(Fraction(0)).is_zero()
    assert a.scale(Fraction(2)).terms == {2: Fraction(1), 5: Fraction(-4)}


# -- log+ ---------------------------------------------------------------------


def test_log_plus_finite():
    # |1/8|_2 = 8 -> 3 log 2
    lv = log_plus(Fraction(1, 8), Place.finite(2))
    assert lv.is_exact and lv.coeff == 3 and lv.prime == 2
    # |8|_2 = 1/8 <= 1 -> 0
    assert log_plus(Fraction(8), Place.finite(2)).coeff == 0
    assert log_plus(Fraction(0), Place.finite(5)).coeff == 0
    assert log_plus(Fraction(7, 3), Place.finite(5)).coeff == 0


def test_log_plus_archimedean():
    lv = log_plus(Fraction(-5), INF)
    assert not lv.is_exact
    assert lv.lo <= math.log(5) <= lv.hi
    small = log_plus(Fraction(1, 2), INF)
    assert small.lo == 0.0 == small.hi
    one = log_plus(Fraction(-1), INF)
    assert one.lo == 0.0 == one.hi


# -- Newton polygons -----------------------------------------------------------


def _greedy_polygon(vals):
    """Independent lower-hull construction: repeatedly take the minimal-slope
    segment (longest on ties) from the current vertex."""
    pts = [(i, Fraction(v)) for i, v in enumerate(vals) if v is not None]
    out = []
    cur = 0
    while cur < len(pts) - 1:
        x0, y0 = pts[cur]
        best = None
        best_j = None
        for j in range(cur + 1, len(pts)):
            s = Fraction(pts[j][1] - y0, pts[j][0] - x0)
            if best is None or s < best or (s == best):
                best = s
                best_j = j
        out.append((-best, pts[best_j][0] - x0))
        cur = best_j
    out.sort(key=lambda sm: sm[0])
    # merge equal valuations
    merged = []
    for v, m in out:
        if merged and merged[-1][0] == v:
            merged[-1] = (v, merged[-1][1] + m)
        else:
            merged.append((v, m))
    return merged


def test_newton_polygon_examples():
    # x^2 - (1/p) x + 1 at p: coefficient valuations (0, -1, 0)
    assert newton_polygon([Fraction(0), Fraction(-1), Fraction(0)]) == [
        (Fraction(-1), 1),
        (Fraction(1), 1),
    ]
    # monomial: no nonzero roots
    assert newton_polygon([None, None, Fraction(3)]) == []
    # single segment with multiplicity: (x - p)^2 = x^2 - 2px + p^2 at p > 2
    assert newton_polygon([Fraction(2), Fraction(1), Fraction(0)]) == [(Fraction(1), 2)]
    with pytest.raises(DomainError):
        newton_polygon([Fraction(0), None])


def test_newton_polygon_against_greedy_oracle():
    rng = random.Random(707)
    for _ in range(300):
        n = rng.randint(1, 9)
        vals = []
        for i in range(n + 1):
            if i < n and rng.random() < 0.25:
                vals.append(None)
            else:
                vals.append(Fraction(rng.randint(-8, 8)))
        if vals[0] is None and all(v is None for v in vals[:-1]):
            continue
        got = newton_polygon(vals)
        assert got == _greedy_polygon(vals)
        # total multiplicity = degree minus order of vanishing at 0
        first = next(i for i, v in enumerate(vals) if v is not None)
        assert sum(m for _, m in got) == n - first
        # output sorted ascending
        assert all(got[i][0] < got[i + 1][0] for i in range(len(got) - 1))


def test_newton_polygon_recovers_constructed_roots():
    # f = c * prod (x - p^{k_i}): root valuations are exactly the k_i
    rng = random.Random(808)
    for _ in range(120):
        p = rng.choice([2, 3, 5, 7])
        ks = [rng.randint(-3, 3) for _ in range(rng.randint(1, 6))]
        coeffs = [Fraction(1)]
        for k in ks:
            root = Fraction(p) ** k
            # multiply by (x - root)
            new = [Fraction(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                new[i + 1] += c
                new[i] -= c * root
            coeffs = new
        scalef = Fraction(p) ** rng.randint(-2, 2) * rng.choice([1, -1])
        coeffs = [c * scalef for c in coeffs]
        vals = [vp_or_none(c, p) for c in coeffs]
        got = newton_polygon(vals)
        expected = sorted(
            ((Fraction(k), ks.count(k)) for k in set(ks)), key=lambda t: t[0]
        )
        assert got == expected
