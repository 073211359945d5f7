"""Dense univariate polynomials over Q.

Coefficient lists are constant-term first throughout the package (matching
the cover-spec JSON convention).  Everything here is exact Fraction
arithmetic; sympy is used in one place only, to factor over Q.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import sympy

from .errors import DomainError

Coeffs = tuple[Fraction, ...]


def poly(coeffs: Sequence[Fraction | int | str]) -> Coeffs:
    """Normalize to a tuple of Fractions with no trailing zero (leading)
    coefficients; the zero polynomial is the empty tuple."""
    from .arith import parse_rational

    cs = [parse_rational(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def degree(f: Coeffs) -> int:
    """Degree, with deg 0 = -1 by convention."""
    return len(f) - 1


def evaluate(f: Coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(f):
        acc = acc * x + c
    return acc


def add(f: Coeffs, g: Coeffs) -> Coeffs:
    n = max(len(f), len(g))
    return poly(
        [
            (f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)
            for i in range(n)
        ]
    )


def mul(f: Coeffs, g: Coeffs) -> Coeffs:
    if not f or not g:
        return ()
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return poly(out)


def scale(f: Coeffs, r: Fraction) -> Coeffs:
    return poly([c * r for c in f])


def derivative(f: Coeffs) -> Coeffs:
    return poly([i * c for i, c in enumerate(f)][1:])


def divmod_poly(f: Coeffs, g: Coeffs) -> tuple[Coeffs, Coeffs]:
    if not g:
        raise DomainError("division by the zero polynomial")
    q = [Fraction(0)] * max(0, len(f) - len(g) + 1)
    r = list(f)
    dg, lg = degree(g), g[-1]
    while len(r) >= len(g) and any(c != 0 for c in r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) < len(g):
            break
        shift = len(r) - len(g)
        factor = r[-1] / lg
        q[shift] = factor
        for i, c in enumerate(g):
            r[shift + i] -= factor * c
        r.pop()
    return poly(q), poly(r)


def gcd_poly(f: Coeffs, g: Coeffs) -> Coeffs:
    """Monic gcd over Q."""
    a, b = f, g
    while b:
        a, b = b, divmod_poly(a, b)[1]
    if not a:
        return ()
    return scale(a, 1 / a[-1])


def squarefree_part(f: Coeffs) -> Coeffs:
    """The radical f / gcd(f, f'), monic up to the original leading sign."""
    if degree(f) <= 0:
        return f
    g = gcd_poly(f, derivative(f))
    q, r = divmod_poly(f, g)
    assert not r
    return q


def compose_power(f: Coeffs, e: int) -> Coeffs:
    """f(X^e)."""
    if e < 1:
        raise DomainError("power must be >= 1")
    out = [Fraction(0)] * (e * degree(f) + 1) if f else []
    for i, c in enumerate(f):
        out[e * i] = c
    return poly(out)


def clear_denominators(f: Coeffs) -> tuple[Coeffs, int]:
    """Return (m*f, m) with m the least positive integer making m*f integral."""
    m = 1
    for c in f:
        m = m * c.denominator // math.gcd(m, c.denominator)
    return scale(f, m), m


def factor_over_q(f: Coeffs) -> tuple[Fraction, list[tuple[Coeffs, int]]]:
    """Irreducible factorization over Q via sympy.

    Returns (content, [(factor, multiplicity)]); the factors are primitive
    integer polynomials with positive leading coefficient, in a deterministic
    order (degree, then coefficient tuple), and content * prod(factor^mult)
    equals f exactly.
    """
    if degree(f) < 1:
        return (f[0] if f else Fraction(0)), []
    x = sympy.Symbol("x")
    p = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(f)], x)
    content, factors = p.factor_list()
    out = []
    for fac, mult in factors:
        cs = [Fraction(c.p, c.q) for c in reversed(fac.all_coeffs())]
        out.append((poly(cs), int(mult)))
    out.sort(key=lambda fm: (degree(fm[0]), fm[0]))
    c = Fraction(content.p, content.q)
    return c, out


# ---------------------------------------------------------------------------
# resultants (Sylvester determinant route)
# ---------------------------------------------------------------------------


def sylvester_matrix(f: Coeffs, g: Coeffs, m: int, n: int) -> list[list[Fraction]]:
    """Sylvester matrix of f, g with formal degrees m, n (so zero leading
    coefficients are allowed; needed for binary forms like c*W^d)."""
    if len(f) > m + 1 or len(g) > n + 1:
        raise DomainError("formal degree below actual degree")
    fa = list(f) + [Fraction(0)] * (m + 1 - len(f))
    ga = list(g) + [Fraction(0)] * (n + 1 - len(g))
    size = m + n
    rows = []
    for i in range(n):  # rows of f coefficients
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(fa)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):  # rows of g coefficients
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(ga)):
            row[i + j] = c
        rows.append(row)
    return rows


def det_exact(matrix: list[list[Fraction]]) -> Fraction:
    """Exact determinant by fraction Gaussian elimination."""
    n = len(matrix)
    a = [row[:] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] == 0:
                continue
            factor = a[r][col] * inv
            for c in range(col, n):
                a[r][c] -= factor * a[col][c]
    return det


def resultant(f: Coeffs, g: Coeffs, m: int | None = None, n: int | None = None) -> Fraction:
    """Res(f, g), by default at the actual degrees."""
    m = degree(f) if m is None else m
    n = degree(g) if n is None else n
    if m < 0 or n < 0:
        raise DomainError("resultant of the zero polynomial")
    if not f or not g:
        return Fraction(0)
    if m == 0 and n == 0:
        return Fraction(1)
    if m == 0:
        return f[0] ** n
    if n == 0:
        return g[0] ** m
    return det_exact(sylvester_matrix(f, g, m, n))


def discriminant(f: Coeffs) -> Fraction:
    """disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lead(f)."""
    n = degree(f)
    if n < 1:
        raise DomainError("discriminant needs degree >= 1")
    if n == 1:
        return Fraction(1)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(f, derivative(f), n, n - 1) / f[-1]


def solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve a nonsingular square system exactly."""
    n = len(matrix)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise DomainError("singular system")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [c * inv for c in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [cr - factor * cc for cr, cc in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# certified root bounds for squarefree integer polynomials
# ---------------------------------------------------------------------------


def sqrt_lower(q: Fraction) -> Fraction:
    """A rational lower bound for sqrt(q), q >= 0."""
    if q < 0:
        raise DomainError("sqrt of a negative rational")
    if q == 0:
        return Fraction(0)
    scale_ = 1 << 64
    n = q.numerator * scale_ * scale_ // q.denominator
    return Fraction(math.isqrt(n), scale_)


def sqrt_upper(q: Fraction) -> Fraction:
    """A rational upper bound for sqrt(q), q >= 0."""
    if q < 0:
        raise DomainError("sqrt of a negative rational")
    if q == 0:
        return Fraction(0)
    scale_ = 1 << 64
    n = q.numerator * scale_ * scale_ // q.denominator
    r = math.isqrt(n)
    if r * r < n:
        r += 1
    return Fraction(r, scale_)


def mahler_separation_lower(f: Coeffs) -> Fraction:
    """A positive rational lower bound for the minimal distance between two
    distinct complex roots of a squarefree polynomial over Q, via

        sep(f) > sqrt(3 |disc|) / ( n^((n+2)/2) * ||f||_2^(n-1) ).

    The polynomial is cleared to integer coefficients first (roots unchanged).
    """
    n = degree(f)
    if n < 2:
        raise DomainError("separation needs degree >= 2")
    fi, _ = clear_denominators(f)
    disc = discriminant(fi)
    if disc == 0:
        raise DomainError("polynomial is not squarefree")
    num = sqrt_lower(3 * abs(disc))
    norm_sq = sum(c * c for c in fi)
    norm_up = sqrt_upper(norm_sq)
    half = (n + 2 + 1) // 2  # integer exponent >= (n+2)/2, n^x increasing
    den = Fraction(n) ** half * norm_up ** (n - 1)
    return num / den
