"""Truncated multivariate formal power series with exact rational coefficients.

A :class:`Series` in ``m`` variables is known exactly up to and including
its truncation degree ``trunc``; nothing is claimed about higher degrees.
Coefficients are graded by total degree. Each homogeneous part ("bucket") is
stored as a positive common denominator together with a dict of integer
numerators keyed by packed monomials, normalized so that the denominator and
all numerators are coprime. That form is canonical, so two buckets are equal
exactly when their stored data are equal, and all inner loops run on Python
integers instead of :class:`fractions.Fraction` objects.

Monomials ``x^alpha`` are packed into a single integer with ``BITS`` bits per
exponent and variable ``x1`` in the most significant slot. Adding packed keys
multiplies monomials, and descending key order within a degree is the
graded-lexicographic order used for printing and serialization.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Mapping, Sequence, Tuple, Union

from .errors import DimensionError, SubstitutionError, TruncationError

BITS = 16
MASK = (1 << BITS) - 1
MAX_DEGREE = MASK

#: Order of a series with no stored coefficient ("zero up to trunc").
INFINITY = math.inf

MultiIndex = Tuple[int, ...]
Rational = Union[int, Fraction]
# (denominator, {packed monomial: integer numerator})
Hom = Tuple[int, dict]


def pack(alpha: Sequence[int]) -> int:
    key = 0
    for e in alpha:
        key = (key << BITS) | e
    return key


def unpack(key: int, m: int) -> MultiIndex:
    return tuple((key >> (BITS * (m - 1 - i))) & MASK for i in range(m))


def _shift(i: int, m: int) -> int:
    return BITS * (m - 1 - i)


# -- homogeneous kernels ----------------------------------------------------
# These operate on canonical (den, nums) pairs and return None for zero.


def _normalize(den: int, nums: dict):
    nums = {k: c for k, c in nums.items() if c}
    if not nums:
        return None
    g = math.gcd(den, *nums.values())
    if g != 1:
        den //= g
        nums = {k: c // g for k, c in nums.items()}
    return den, nums


def hom_from_fractions(coeffs: Mapping[int, Fraction]):
    coeffs = {k: Fraction(c) for k, c in coeffs.items() if c}
    if not coeffs:
        return None
    den = math.lcm(*(c.denominator for c in coeffs.values()))
    return den, {k: c.numerator * (den // c.denominator) for k, c in coeffs.items()}


def hom_to_fractions(h: Hom) -> dict:
    den, nums = h
    return {k: Fraction(c, den) for k, c in nums.items()}


def hom_scale(h, c: Rational):
    if h is None:
        return None
    c = Fraction(c)
    if c == 0:
        return None
    den, nums = h
    p, q = c.numerator, c.denominator
    if q < 0:
        p, q = -p, -q
    return _normalize(den * q, {k: v * p for k, v in nums.items()})


def hom_sum(parts: Iterable, coeffs: Iterable[Rational] = None):
    """Exact linear combination of homogeneous parts (None entries skipped)."""
    if coeffs is None:
        items = [(h, Fraction(1)) for h in parts if h is not None]
    else:
        items = [(h, Fraction(c)) for h, c in zip(parts, coeffs) if h is not None and c]
    if not items:
        return None
    if len(items) == 1:
        h, c = items[0]
        return h if c == 1 else hom_scale(h, c)
    big = math.lcm(*(h[0] * c.denominator for h, c in items))
    acc: dict = {}
    get = acc.get
    for (den, nums), c in items:
        f = c.numerator * (big // (den * c.denominator))
        for k, v in nums.items():
            acc[k] = get(k, 0) + v * f
    return _normalize(big, acc)


def hom_mul(a, b):
    if a is None or b is None:
        return None
    da, na = a
    db, nb = b
    if len(na) < len(nb):
        na, nb = nb, na
    acc: dict = {}
    get = acc.get
    for kb, cb in nb.items():
        for ka, ca in na.items():
            k = ka + kb
            acc[k] = get(k, 0) + ca * cb
    return _normalize(da * db, acc)


def hom_diff(h, shift: int):
    """Partial derivative with respect to the variable stored at ``shift``."""
    if h is None:
        return None
    den, nums = h
    one = 1 << shift
    out = {}
    for k, c in nums.items():
        e = (k >> shift) & MASK
        if e:
            out[k - one] = c * e
    return _normalize(den, out)


# -- Series -----------------------------------------------------------------


class Series:
    """Immutable truncated power series in ``m`` variables.

    ``terms`` maps exponent tuples to rational coefficients (``int``,
    ``Fraction`` or strings such as ``"3/2"``); terms above ``trunc`` are
    truncated away and zero coefficients are dropped.
    """

    __slots__ = ("m", "trunc", "_buckets")

    def __init__(self, m: int, trunc: int, terms: Union[Mapping, Iterable, None] = None):
        if not isinstance(m, int) or m < 1:
            raise DimensionError(f"variable count must be a positive integer, got {m!r}")
        if not isinstance(trunc, int) or trunc < 0:
            raise TruncationError(f"truncation must be a nonnegative integer, got {trunc!r}")
        if trunc > MAX_DEGREE:
            raise TruncationError(f"truncation {trunc} exceeds supported maximum {MAX_DEGREE}")
        self.m = m
        self.trunc = trunc
        raw: dict = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for alpha, c in items:
                alpha = tuple(alpha)
                if len(alpha) != m:
                    raise DimensionError(f"exponent {alpha} does not have {m} entries")
                if any((not isinstance(e, int)) or e < 0 for e in alpha):
                    raise ValueError(f"exponents must be nonnegative integers: {alpha}")
                q = sum(alpha)
                if q > trunc:
                    continue
                bucket = raw.setdefault(q, {})
                key = pack(alpha)
                bucket[key] = bucket.get(key, 0) + Fraction(c)
        self._buckets = {}
        for q, coeffs in raw.items():
            h = hom_from_fractions(coeffs)
            if h is not None:
                self._buckets[q] = h

    @classmethod
    def _make(cls, m: int, trunc: int, buckets: dict) -> "Series":
        s = object.__new__(cls)
        s.m = m
        s.trunc = trunc
        s._buckets = {q: h for q, h in buckets.items() if h is not None and q <= trunc}
        return s

    # access

    def bucket(self, q: int):
        """Raw canonical homogeneous part of degree ``q`` (None when zero)."""
        return self._buckets.get(q)

    def degrees(self) -> list:
        return sorted(self._buckets)

    def is_zero(self) -> bool:
        return not self._buckets

    def __len__(self) -> int:
        return sum(len(h[1]) for h in self._buckets.values())

    def terms(self) -> Iterator[Tuple[MultiIndex, Fraction]]:
        """Nonzero terms in graded-lexicographic order."""
        for q in sorted(self._buckets):
            den, nums = self._buckets[q]
            for key in sorted(nums, reverse=True):
                yield unpack(key, self.m), Fraction(nums[key], den)

    def coefficient(self, alpha: Sequence[int]) -> Fraction:
        alpha = tuple(alpha)
        if len(alpha) != self.m:
            raise DimensionError(f"exponent {alpha} does not have {self.m} entries")
        q = sum(alpha)
        if q > self.trunc:
            raise TruncationError(f"degree {q} is beyond truncation {self.trunc}")
        h = self._buckets.get(q)
        if h is None:
            return Fraction(0)
        return Fraction(h[1].get(pack(alpha), 0), h[0])

    def max_abs_by_degree(self) -> dict:
        """Map degree -> largest coefficient magnitude in that degree."""
        return {q: Fraction(max(abs(c) for c in nums.values()), den)
                for q, (den, nums) in self._buckets.items()}

    # comparison and arithmetic sugar

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (self.m == other.m and self.trunc == other.trunc
                and self._buckets == other._buckets)

    def __hash__(self):
        return hash((self.m, self.trunc, tuple(self.terms())))

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return add_scale(self, other, 1)

    def __sub__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return add_scale(self, other, -1)

    def __mul__(self, other):
        if isinstance(other, Series):
            return mul(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c: Rational) -> "Series":
        return Series._make(self.m, self.trunc,
                            {q: hom_scale(h, c) for q, h in self._buckets.items()})

    def __repr__(self):
        return f"Series(m={self.m}, trunc={self.trunc}, {format_series(self)})"


def format_series(f: Series) -> str:
    names = ["x"] if f.m == 1 else [f"x{i + 1}" for i in range(f.m)]
    parts = []
    for alpha, c in f.terms():
        mono = "*".join(
            names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(alpha) if e
        )
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{c}*{mono}")
    body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
    return f"{body} + O({f.trunc + 1})"


# -- constructors ------------------------------------------------------------


def zero(m: int, trunc: int) -> Series:
    return Series(m, trunc)


def constant(c: Rational, m: int, trunc: int) -> Series:
    return Series(m, trunc, {(0,) * m: c})


def monomial(alpha: Sequence[int], c: Rational, trunc: int) -> Series:
    return Series(len(alpha), trunc, {tuple(alpha): c})


def variable(i: int, m: int, trunc: int) -> Series:
    """The coordinate function ``x_{i+1}`` (0-based ``i``)."""
    alpha = [0] * m
    alpha[i] = 1
    return Series(m, trunc, {tuple(alpha): 1})


def compositions(k: int, m: int) -> Iterator[MultiIndex]:
    """All ``alpha`` in N^m with ``|alpha| = k``."""
    for combo in combinations_with_replacement(range(m), k):
        alpha = [0] * m
        for i in combo:
            alpha[i] += 1
        yield tuple(alpha)


def h_poly(k: int, m: int, trunc: int) -> Series:
    """Sum of every monomial of total degree ``k`` with coefficient one."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    if k > trunc:
        raise TruncationError(f"degree {k} exceeds truncation {trunc}")
    return Series._make(m, trunc, {k: (1, {pack(a): 1 for a in compositions(k, m)})})


def _check_m(*series: Series) -> int:
    m = series[0].m
    for s in series[1:]:
        if s.m != m:
            raise DimensionError(f"variable counts differ: {m} vs {s.m}")
    return m


# -- ring operations --------------------------------------------------------


def add_scale(f: Series, g: Series, c: Rational) -> Series:
    """Return ``f + c*g`` truncated at the smaller truncation."""
    m = _check_m(f, g)
    trunc = min(f.trunc, g.trunc)
    out = {}
    for q in set(f._buckets) | set(g._buckets):
        if q <= trunc:
            out[q] = hom_sum([f._buckets.get(q), g._buckets.get(q)], [1, c])
    return Series._make(m, trunc, out)


def _mul_to(f: Series, g: Series, trunc: int) -> Series:
    # caller guarantees both operands are exact far enough for ``trunc``
    out: dict = {}
    for i, hf in f._buckets.items():
        for j, hg in g._buckets.items():
            if i + j <= trunc:
                out.setdefault(i + j, []).append(hom_mul(hf, hg))
    return Series._make(f.m, trunc, {q: hom_sum(v) for q, v in out.items()})


def mul(f: Series, g: Series) -> Series:
    """Truncated Cauchy product."""
    _check_m(f, g)
    return _mul_to(f, g, min(f.trunc, g.trunc))


def diff(f: Series, i: int) -> Series:
    """Partial derivative with respect to ``x_{i+1}``."""
    if f.trunc == 0:
        raise TruncationError("derivative of a series known only to degree 0 is unknown")
    sh = _shift(i, f.m)
    return Series._make(f.m, f.trunc - 1,
                        {q - 1: hom_diff(h, sh) for q, h in f._buckets.items() if q > 0})


def diff_sum(f: Series) -> Series:
    """The operator sum_k d/dx_k."""
    if f.trunc == 0:
        raise TruncationError("derivative of a series known only to degree 0 is unknown")
    shifts = [_shift(i, f.m) for i in range(f.m)]
    return Series._make(f.m, f.trunc - 1, {
        q - 1: hom_sum([hom_diff(h, sh) for sh in shifts])
        for q, h in f._buckets.items() if q > 0
    })


def order(f: Series):
    """Lowest degree carrying a nonzero coefficient, or INFINITY."""
    return min(f._buckets) if f._buckets else INFINITY


def coef_deg(f: Series, q: int) -> Series:
    """Homogeneous part of degree ``q`` (same truncation as ``f``)."""
    if q > f.trunc:
        raise TruncationError(f"degree {q} is beyond truncation {f.trunc}")
    h = f._buckets.get(q)
    return Series._make(f.m, f.trunc, {q: h} if h else {})


def truncate(f: Series, trunc: int) -> Series:
    if trunc > f.trunc:
        raise TruncationError(f"cannot raise truncation from {f.trunc} to {trunc}")
    return Series._make(f.m, trunc, f._buckets)


def as_polynomial(f: Series, trunc: int) -> Series:
    """Reinterpret the stored terms of ``f`` as an exact polynomial known to ``trunc``.

    Explicitly trusts every coefficient above ``f.trunc`` to be zero.
    """
    return Series._make(f.m, max(trunc, 0), f._buckets)


def substitute(f: Series, G: Sequence[Series]) -> Series:
    """Composition ``f(G_1, ..., G_m)``; each ``G_i`` must have no constant term."""
    if len(G) != f.m:
        raise DimensionError(f"need {f.m} substitutions, got {len(G)}")
    if not G:
        return f
    mg = _check_m(*G)
    for gi in G:
        if gi.bucket(0) is not None:
            raise SubstitutionError("substituted series must have order >= 1")
    trunc = min([f.trunc] + [gi.trunc for gi in G])
    one = Series._make(mg, trunc, {0: (1, {0: 1})})
    powers = [[one] for _ in G]

    def power(i, e):
        cache = powers[i]
        while len(cache) <= e:
            cache.append(_mul_to(cache[-1], truncate(G[i], trunc), trunc))
        return cache[e]

    acc: dict = {}
    for q, (den, nums) in f._buckets.items():
        if q > trunc:
            continue
        for key, c in nums.items():
            term = one
            for i, e in enumerate(unpack(key, f.m)):
                if e:
                    term = _mul_to(term, power(i, e), trunc)
            coef = Fraction(c, den)
            for d, h in term._buckets.items():
                acc.setdefault(d, ([], []))
                acc[d][0].append(h)
                acc[d][1].append(coef)
    return Series._make(mg, trunc, {d: hom_sum(hs, cs) for d, (hs, cs) in acc.items()})
