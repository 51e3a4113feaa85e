"""Exact integer solution sets of univariate polynomial constraints.

``solve_univariate`` maps ``p(x) ⋈ 0`` to a canonical IntervalSet of its
integer solutions.  Real roots are bracketed with Sturm sequences over exact
rational arithmetic; the integer restriction then follows from sign tests at
finitely many integers (signs are constant between bracketed roots).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .intervals import IntervalSet
from .terms import Rel

# Coefficient lists are dense, lowest degree first.


def _trim(cs: list) -> list:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _eval_poly(cs, x):
    v = 0
    for c in reversed(cs):
        v = v * x + c
    return v


def _derivative(cs):
    return [i * c for i, c in enumerate(cs)][1:]


def _poly_rem(a, b):
    """Remainder of a / b over the rationals."""
    a = list(a)
    _trim(a)
    db, lb = len(b) - 1, b[-1]
    while a and len(a) - 1 >= db:
        da, la = len(a) - 1, a[-1]
        q = Fraction(la) / lb
        for i in range(db + 1):
            a[da - db + i] -= q * b[i]
        a.pop()
        _trim(a)
    return a


def _poly_gcd(a, b):
    a, b = list(a), list(b)
    _trim(a)
    _trim(b)
    while b:
        a, b = b, _poly_rem(a, b)
        _trim(b)
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _sturm_chain(cs):
    chain = [[Fraction(c) for c in cs]]
    d = _derivative(chain[0])
    _trim(d)
    if d:
        chain.append(d)
        while True:
            r = _poly_rem(chain[-2], chain[-1])
            _trim(r)
            if not r:
                break
            chain.append([-c for c in r])
    return chain


def _variations(chain, x) -> int:
    count = 0
    prev = 0
    for cs in chain:
        s = _eval_poly(cs, x)
        s = (s > 0) - (s < 0)
        if s == 0:
            continue
        if prev != 0 and s != prev:
            count += 1
        prev = s
    return count


def _isolate_roots(cs) -> list:
    """Bracket every real root of a squarefree polynomial.

    Returns (a, b] brackets of width < 1/2 as Fraction pairs; each bracket
    contains exactly one root.
    """
    chain = _sturm_chain(cs)
    lead = abs(cs[-1])
    bound = Fraction(1) + max(abs(Fraction(c)) for c in cs) / lead
    brackets = []
    stack = [(-bound, bound)]
    while stack:
        a, b = stack.pop()
        n = _variations(chain, a) - _variations(chain, b)
        if n == 0:
            continue
        if n == 1 and b - a < Fraction(1, 2):
            brackets.append((a, b))
            continue
        mid = (a + b) / 2
        stack.append((a, mid))
        stack.append((mid, b))
    return brackets


def _breakpoints(cs) -> list:
    """Sorted integers bracketing every real root (floor/ceil superset)."""
    coeffs = [Fraction(c) for c in cs]
    der = _derivative(coeffs)
    _trim(der)
    g = _poly_gcd(coeffs, der) if der else []
    if len(g) > 1:
        # Divide out repeated roots: squarefree part = p / gcd(p, p').
        sf = _poly_div_exact(coeffs, g)
    else:
        sf = coeffs
    pts: set[int] = set()
    for a, b in _isolate_roots(sf):
        pts.add(math.floor(a))
        pts.add(math.ceil(a))
        pts.add(math.floor(b))
        pts.add(math.ceil(b))
    return sorted(pts)


def _poly_div_exact(a, b):
    """Exact quotient a / b (b divides a)."""
    a = [Fraction(c) for c in a]
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    db, lb = len(b) - 1, b[-1]
    while _trim(a) and len(a) - 1 >= db:
        da = len(a) - 1
        c = a[-1] / lb
        q[da - db] = c
        for i in range(db + 1):
            a[da - db + i] -= c * b[i]
        a.pop()
        _trim(a)
    return q


@lru_cache(maxsize=65536)
def solve_univariate_coeffs(coeffs: tuple, rel: Rel) -> IntervalSet:
    """Integer solution set of ``p(x) ⋈ 0`` given dense coefficients."""
    cs = list(coeffs)
    _trim(cs)
    if not cs or len(cs) == 1:
        value = cs[0] if cs else 0
        return IntervalSet.full() if rel.holds(value) else IntervalSet.empty()
    if len(cs) == 2:
        return _solve_linear(cs[0], cs[1], rel)
    return _solve_general(cs, rel)


def _solve_linear(b: int, a: int, rel: Rel) -> IntervalSet:
    """Integer solutions of ``a·x + b ⋈ 0`` with a ≠ 0."""
    if rel is Rel.EQ:
        if b % a == 0:
            return IntervalSet.point(-b // a)
        return IntervalSet.empty()
    if rel is Rel.NEQ:
        return _solve_linear(b, a, Rel.EQ).complement()
    # a·x + b <= 0  <=>  x <= -b/a (a > 0)  or  x >= -b/a (a < 0)
    strict = rel is Rel.LT
    if a > 0:
        # x <= floor(-b/a), excluding the root itself when strict
        bound = -b // a  # floor division
        if strict and a * bound + b == 0:
            bound -= 1
        return IntervalSet.range(None, bound)
    bound = -(-b // -a)  # ceil(-b / a) for a < 0
    if strict and a * bound + b == 0:
        bound += 1
    return IntervalSet.range(bound, None)


def _solve_general(cs: list, rel: Rel) -> IntervalSet:
    pts = _breakpoints(cs)
    if not pts:
        # No real roots: sign is constant everywhere.
        return IntervalSet.full() if rel.holds(_eval_poly(cs, 0)) else IntervalSet.empty()
    segments = []  # (lo, hi, representative)
    segments.append((None, pts[0] - 1, pts[0] - 1))
    for i, c in enumerate(pts):
        segments.append((c, c, c))
        if i + 1 < len(pts) and pts[i + 1] > c + 1:
            segments.append((c + 1, pts[i + 1] - 1, c + 1))
    segments.append((pts[-1] + 1, None, pts[-1] + 1))
    good = [
        (lo, hi)
        for lo, hi, rep in segments
        if rel.holds(_eval_poly(cs, rep))
    ]
    return IntervalSet.from_intervals(good)


def solve_univariate(poly, vid: int, rel: Rel) -> IntervalSet:
    """Integer solution set of a univariate Polynomial constraint."""
    return solve_univariate_coeffs(tuple(poly.univariate_coeffs(vid)), rel)
