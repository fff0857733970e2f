"""The exponential map of formal vector fields and its inverse.

``exp_field`` sends a field of order >= n to the diffeomorphism
``x_i -> sum_j X^j(x_i)/j!``; ``log_diffeo`` recovers the infinitesimal
generator one homogeneous degree at a time. Both run on the same engine,
:class:`_PowerCache`, which stores the homogeneous parts of ``X^k(x_i)`` and
extends every power by one degree per step.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError, NotInDomainError, NotTangentError, SingularScalingError, TruncationError
from .series import (
    INFINITY,
    Rational,
    Series,
    _shift,
    add_scale,
    hom_diff,
    hom_mul,
    hom_scale,
    hom_sum,
    order,
    substitute,
    truncate,
    variable,
)
from .vector_field import VectorField, field_order, scale_conjugate_field


class Diffeo:
    """``F = id + f`` tangent to the identity, stored by its displacement ``f``.

    Every nonzero displacement component has order >= ``n_minus_1 + 1``,
    i.e. ``nu(F) >= n_minus_1``.
    """

    __slots__ = ("displacement", "n_minus_1")

    def __init__(self, displacement: Sequence[Series], n_minus_1: int):
        displacement = tuple(displacement)
        if not displacement:
            raise DimensionError("a diffeomorphism needs at least one component")
        if not isinstance(n_minus_1, int) or n_minus_1 < 1:
            raise NotTangentError(f"tangency order must be an integer >= 1, got {n_minus_1!r}")
        m = len(displacement)
        trunc = displacement[0].trunc
        for f in displacement:
            if f.m != m:
                raise DimensionError(f"component in {f.m} variables for a map in {m}")
            if f.trunc != trunc:
                raise DimensionError("components must share one truncation")
            if order(f) < n_minus_1 + 1:
                raise NotTangentError(
                    f"displacement of order {order(f)} is not tangent to order {n_minus_1}")
        self.displacement = displacement
        self.n_minus_1 = n_minus_1

    @property
    def m(self) -> int:
        return len(self.displacement)

    @property
    def trunc(self) -> int:
        return self.displacement[0].trunc

    @property
    def n(self) -> int:
        return self.n_minus_1 + 1

    def components(self):
        """The full map ``x_i + f_i``."""
        return [add_scale(variable(i, self.m, self.trunc), f, 1)
                for i, f in enumerate(self.displacement)]

    def __eq__(self, other):
        if not isinstance(other, Diffeo):
            return NotImplemented
        return self.n_minus_1 == other.n_minus_1 and self.displacement == other.displacement

    def __hash__(self):
        return hash((self.n_minus_1, self.displacement))

    def __repr__(self):
        return f"Diffeo(n_minus_1={self.n_minus_1}, displacement={list(self.displacement)!r})"

    @classmethod
    def identity(cls, m: int, n_minus_1: int, trunc: int) -> "Diffeo":
        return cls([Series(m, trunc) for _ in range(m)], n_minus_1)


def nu(F: Diffeo):
    """``min_i order(F_i - x_i) - 1``; INFINITY for the identity."""
    o = min(order(f) for f in F.displacement)
    return INFINITY if o == INFINITY else o - 1


class _PowerCache:
    """Homogeneous parts of ``X^k(x_j)`` for k >= 1, grown degree by degree.

    ``field[i][p]`` is the degree-p part of ``X(x_i)``. Before degree d is
    requested for k >= 2, the field must be known up to degree
    ``d - (n-1)(k-1)`` and every power up to degree d-1, which holds when
    degrees are processed in increasing order.
    """

    def __init__(self, m: int, n: int):
        self.m = m
        self.n = n
        self.shifts = [_shift(i, m) for i in range(m)]
        self.field = [dict() for _ in range(m)]
        # power[j][k][d] and its partial derivatives dpower[j][k][d][i]
        self.power = [{1: self.field[j]} for j in range(m)]
        self.dpower = [{} for _ in range(m)]

    def max_power(self, d: int) -> int:
        # order(X^k(x_j)) >= (n-1)k + 1
        return (d - 1) // (self.n - 1)

    def _derivs(self, j: int, k: int, d: int):
        cache = self.dpower[j].setdefault(k, {})
        if d not in cache:
            h = self.power[j][k].get(d)
            cache[d] = [hom_diff(h, sh) for sh in self.shifts]
        return cache[d]

    def extend(self, d: int) -> list:
        """Compute degree d of ``X^k(x_j)`` for every j and 2 <= k <= max_power(d).

        Returns, per component j, the combination ``sum_{k>=2} Coef_d(X^k(x_j))/k!``.
        """
        n = self.n
        out = []
        for j in range(self.m):
            tail_parts, tail_coeffs = [], []
            for k in range(2, self.max_power(d) + 1):
                prev_order = (n - 1) * (k - 1) + 1
                prods = []
                for p in range(n, d - prev_order + 2):
                    dprev = self._derivs(j, k - 1, d + 1 - p)
                    for i in range(self.m):
                        xp = self.field[i].get(p)
                        if xp is not None and dprev[i] is not None:
                            prods.append(hom_mul(xp, dprev[i]))
                h = hom_sum(prods)
                self.power[j].setdefault(k, {})[d] = h
                tail_parts.append(h)
                tail_coeffs.append(Fraction(1, math.factorial(k)))
            out.append(hom_sum(tail_parts, tail_coeffs))
        return out


def _require_trunc(have: int, N: int):
    if N < 0:
        raise TruncationError("truncation must be nonnegative")
    if have < N:
        raise TruncationError(f"input known to degree {have}, but N = {N} was requested")


def exp_field(X: VectorField, N: int) -> Diffeo:
    """``Exp(X)`` truncated at degree N."""
    _require_trunc(X.trunc, N)
    if field_order(X) < 2:
        raise NotInDomainError("Exp is defined on fields of order >= 2")
    m, n = X.m, X.n
    cache = _PowerCache(m, n)
    disp = [dict() for _ in range(m)]
    for d in range(n, N + 1):
        for i, comp in enumerate(X.components):
            h = comp.bucket(d)
            if h is not None:
                cache.field[i][d] = h
        tails = cache.extend(d)
        for j in range(m):
            disp[j][d] = hom_sum([cache.field[j].get(d), tails[j]])
    return Diffeo([Series._make(m, N, disp[j]) for j in range(m)], n - 1)


def log_diffeo(F: Diffeo, N: int) -> VectorField:
    """The infinitesimal generator of F, exact to degree N.

    Degree n of X equals degree n of the displacement; for larger d,
    ``X_d(x_j) = f_{j,d} - sum_{k>=2} Coef_d(X^k(x_j))/k!`` where the powers
    only involve parts of X of degree < d.
    """
    _require_trunc(F.trunc, N)
    m, n = F.m, F.n
    cache = _PowerCache(m, n)
    for d in range(n, N + 1):
        tails = cache.extend(d)
        for j, f in enumerate(F.displacement):
            h = hom_sum([f.bucket(d), tails[j]], [1, -1])
            if h is not None:
                cache.field[j][d] = h
    return VectorField([Series._make(m, N, cache.field[j]) for j in range(m)], n)


def compose(F: Diffeo, G: Diffeo) -> Diffeo:
    """``F o G``; its displacement is ``g + f(x + g)``."""
    if F.m != G.m:
        raise DimensionError(f"cannot compose maps in {F.m} and {G.m} variables")
    trunc = min(F.trunc, G.trunc)
    full_g = G.components()
    full_g = [truncate(c, trunc) for c in full_g]
    disp = []
    for f, g in zip(F.displacement, G.displacement):
        disp.append(add_scale(truncate(g, trunc), substitute(truncate(f, trunc), full_g), 1))
    return Diffeo(disp, min(F.n_minus_1, G.n_minus_1))


def scale_conjugate(F, lam: Rational):
    """``S^-1 o F o S`` with ``S(x) = lam*x``.

    Degree-q displacement coefficients are multiplied by ``lam^(q-1)``.
    Also accepts a :class:`VectorField`, which transforms the same way.
    """
    lam = Fraction(lam)
    if lam == 0:
        raise SingularScalingError("scaling factor must be nonzero")
    if isinstance(F, VectorField):
        return scale_conjugate_field(F, lam)
    disp = []
    for f in F.displacement:
        disp.append(Series._make(f.m, f.trunc, {
            q: hom_scale(f.bucket(q), lam ** (q - 1)) for q in f.degrees()}))
    return Diffeo(disp, F.n_minus_1)
