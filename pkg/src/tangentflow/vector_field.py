"""Formal vector fields of order >= n and their action on series."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from .errors import DimensionError, NotInDomainError
from .series import (
    INFINITY,
    Rational,
    Series,
    _shift,
    hom_diff,
    hom_mul,
    hom_scale,
    hom_sum,
    order,
)


class VectorField:
    """``X = sum_k X(x_k) d/dx_k`` with every component of order >= ``n``.

    ``components[k]`` is the series ``X(x_{k+1})``. All components share the
    variable count and the truncation degree.
    """

    __slots__ = ("components", "n")

    def __init__(self, components: Sequence[Series], n: int):
        components = tuple(components)
        if not components:
            raise DimensionError("a vector field needs at least one component")
        if not isinstance(n, int) or n < 2:
            raise NotInDomainError(f"field order bound n must be an integer >= 2, got {n!r}")
        m = len(components)
        trunc = components[0].trunc
        for c in components:
            if c.m != m:
                raise DimensionError(f"component in {c.m} variables for a field in {m}")
            if c.trunc != trunc:
                raise DimensionError("components must share one truncation")
            if order(c) < n:
                raise NotInDomainError(f"component of order {order(c)} < n = {n}")
        self.components = components
        self.n = n

    @property
    def m(self) -> int:
        return len(self.components)

    @property
    def trunc(self) -> int:
        return self.components[0].trunc

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.n == other.n and self.components == other.components

    def __hash__(self):
        return hash((self.n, self.components))

    def __repr__(self):
        return f"VectorField(n={self.n}, components={list(self.components)!r})"

    def scale(self, c: Rational) -> "VectorField":
        return VectorField([comp.scale(c) for comp in self.components], self.n)

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return VectorField([a + b for a, b in zip(self.components, other.components)],
                           min(self.n, other.n))

    def __rmul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    @classmethod
    def zero(cls, m: int, n: int, trunc: int) -> "VectorField":
        return cls([Series(m, trunc) for _ in range(m)], n)


def field_order(X: VectorField):
    """``min_k order(X(x_k))``, INFINITY for the zero field."""
    return min(order(c) for c in X.components)


def apply(X: VectorField, g: Series, trunc: int = None) -> Series:
    """``X(g) = sum_k X(x_k) * dg/dx_k``.

    The result is exact to ``min(X.trunc, g.trunc + n - 1)``: every component
    of X has order >= n, so degree q of the product only needs g up to degree
    q - n + 1. ``trunc`` caps this at an enclosing working truncation.
    """
    if g.m != X.m:
        raise DimensionError(f"field in {X.m} variables applied to series in {g.m}")
    T = min(X.trunc, g.trunc + X.n - 1)
    if trunc is not None:
        T = min(T, trunc)
    out: dict = {}
    for k, comp in enumerate(X.components):
        sh = _shift(k, X.m)
        dg = {r - 1: hom_diff(g.bucket(r), sh) for r in g.degrees() if r > 0}
        for p in comp.degrees():
            hp = comp.bucket(p)
            for r, hd in dg.items():
                if hd is not None and p + r <= T:
                    out.setdefault(p + r, []).append(hom_mul(hp, hd))
    return Series._make(X.m, T, {q: hom_sum(v) for q, v in out.items()})


def power_apply(X: VectorField, j: int, g: Series, trunc: int = None) -> Series:
    """The iterate ``X^j(g)`` with ``X^0(g) = g``."""
    if j < 0:
        raise ValueError("power must be nonnegative")
    for _ in range(j):
        g = apply(X, g, trunc)
    return g


def powers(X: VectorField, g: Series, j: int, trunc: int = None) -> List[Series]:
    """``[X^1(g), ..., X^j(g)]``, each iterate built from the previous one."""
    out = []
    for _ in range(j):
        g = apply(X, g, trunc)
        out.append(g)
    return out


def scale_conjugate_field(X: VectorField, lam: Rational) -> VectorField:
    """Pull back under ``x -> lam*x``: degree-q coefficients pick up ``lam^(q-1)``."""
    lam = Fraction(lam)
    comps = []
    for c in X.components:
        comps.append(Series._make(c.m, c.trunc, {
            q: hom_scale(c.bucket(q), lam ** (q - 1)) for q in c.degrees()}))
    return VectorField(comps, X.n)


__all__ = [
    "INFINITY",
    "VectorField",
    "apply",
    "field_order",
    "power_apply",
    "powers",
    "scale_conjugate_field",
]
