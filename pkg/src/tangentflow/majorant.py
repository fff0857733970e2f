"""Coefficient-wise domination and Gevrey growth tests.

All yes/no answers are exact. A fractional Gevrey exponent ``s = p/d`` is
handled by raising both sides of ``|f_alpha| <= (q+m-n)!^s a^q`` to the
d-th power, which keeps the comparison in rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .errors import DimensionError, InsufficientDataError
from .series import Rational, Series, compositions

#: Radius reported for the zero series, and relative width of the radius search.
RADIUS_FLOOR = Fraction(1, 2 ** 20)
RADIUS_RTOL = Fraction(1, 2 ** 20)


@dataclass(frozen=True)
class GevreyParams:
    """Parameters of the majorant ``H_{s,n}(a x) = sum_{q>=n} (q+m-n)!^s a^q h_q(x)``."""

    s: Fraction
    a: Fraction
    m: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        object.__setattr__(self, "a", Fraction(self.a))
        if self.s < 0:
            raise ValueError(f"Gevrey exponent must be nonnegative, got {self.s}")
        if self.a <= 0:
            raise ValueError(f"radius must be positive, got {self.a}")
        if self.m < 1 or self.n < 2:
            raise ValueError(f"need m >= 1 and n >= 2, got m={self.m}, n={self.n}")

    def bound_holds(self, q: int, c: Fraction) -> bool:
        """Exact test of ``|c| <= (q+m-n)!^s a^q``."""
        p, d = self.s.numerator, self.s.denominator
        lhs = abs(Fraction(c)) ** d
        return lhs <= math.factorial(q + self.m - self.n) ** p * self.a ** (q * d)


@dataclass(frozen=True)
class FitResult:
    s_hat: float
    a_hat: float
    residual: float
    degrees_used: Tuple[int, ...]


def precede(f: Series, g: Series) -> bool:
    """``f`` majorized by ``g``: ``|f_alpha| <= |g_alpha|`` up to the smaller truncation."""
    if f.m != g.m:
        raise DimensionError(f"variable counts differ: {f.m} vs {g.m}")
    T = min(f.trunc, g.trunc)
    for alpha, c in f.terms():
        if sum(alpha) > T:
            break
        if abs(c) > abs(g.coefficient(alpha)):
            return False
    return True


def gevrey_dominated(f: Series, P: GevreyParams) -> bool:
    """True iff ``Coef_q(f)`` is majorized by ``(q+m-n)!^s a^q h_q`` for all q <= trunc."""
    if f.m != P.m:
        raise DimensionError(f"series in {f.m} variables, parameters for {P.m}")
    for q, M in f.max_abs_by_degree().items():
        if q < P.n or not P.bound_holds(q, M):
            return False
    return True


def envelope(P: GevreyParams, trunc: int) -> Series:
    """Materialize ``H_{s,n}(a x)`` through degree ``trunc``; requires integer s."""
    if P.s.denominator != 1:
        raise ValueError("the majorant has irrational coefficients for non-integer s")
    s = int(P.s)
    terms = {}
    for q in range(P.n, trunc + 1):
        c = math.factorial(q + P.m - P.n) ** s * P.a ** q
        for alpha in compositions(q, P.m):
            terms[alpha] = c
    return Series(P.m, trunc, terms)


def envelope_below(P: GevreyParams, trunc: int, bits: int = 40) -> Series:
    """Rational stand-in for ``H_{s,n}(a x)`` when s is fractional.

    Each coefficient is the largest multiple of ``2^-bits`` relative to its
    exact value that still satisfies the bound, so the result is dominated
    and within a relative ``2^-bits`` of saturating it.
    """
    if P.s.denominator == 1:
        return envelope(P, trunc)
    terms = {}
    for q in range(P.n, trunc + 1):
        approx = math.factorial(q + P.m - P.n) ** float(P.s) * float(P.a) ** q
        e = math.frexp(approx)[1] - bits
        unit = Fraction(2) ** e
        c = Fraction(math.floor(approx / float(unit))) * unit
        while not P.bound_holds(q, c):
            c -= unit
        while P.bound_holds(q, c + unit):
            c += unit
        for alpha in compositions(q, P.m):
            terms[alpha] = c
    return Series(P.m, trunc, terms)


def find_gevrey_radius(f: Series, s: Rational, n: int) -> Optional[Fraction]:
    """Smallest dyadic ``a`` (to relative width 2^-20) with f dominated by ``H_{s,n}(a x)``.

    Returns None when f has nonzero terms below degree n, and RADIUS_FLOOR for
    the zero series.
    """
    maxima = f.max_abs_by_degree()
    if any(q < n for q in maxima):
        return None
    if not maxima:
        return RADIUS_FLOOR

    def ok(a):
        P = GevreyParams(s, a, f.m, n)
        return all(P.bound_holds(q, M) for q, M in maxima.items())

    hi = Fraction(1)
    while not ok(hi):
        hi *= 2
    lo = hi / 2
    while ok(lo):
        hi, lo = lo, lo / 2
    # invariant: ok(hi) and not ok(lo)
    while hi - lo > lo * RADIUS_RTOL:
        mid = (lo + hi) / 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _log_abs(c: Fraction) -> float:
    c = abs(c)
    return math.log(c.numerator) - math.log(c.denominator)


def log_factorial(q: int) -> float:
    return math.fsum(math.log(i) for i in range(2, q + 1))


def gevrey_fit(f: Series, q_min: int, q_max: int) -> FitResult:
    """Least squares fit of ``log M_q ~ s log q! + q log a + c``.

    ``M_q`` is the largest coefficient magnitude in degree q; degrees with
    ``M_q = 0`` are skipped.
    """
    if q_max > f.trunc:
        raise ValueError(f"q_max = {q_max} exceeds truncation {f.trunc}")
    maxima = f.max_abs_by_degree()
    qs = [q for q in range(q_min, q_max + 1) if q in maxima]
    if len(qs) < 5:
        raise InsufficientDataError(f"only {len(qs)} nonzero degrees in [{q_min}, {q_max}]")
    A = np.array([[log_factorial(q), q, 1.0] for q in qs])
    y = np.array([_log_abs(maxima[q]) for q in qs])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return FitResult(
        s_hat=float(coef[0]),
        a_hat=math.exp(coef[1]),
        residual=float(np.sqrt(np.mean(resid ** 2))),
        degrees_used=tuple(qs),
    )
