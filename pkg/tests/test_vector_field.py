import math
from fractions import Fraction

import pytest
from hypothesis import given, settings

from tangentflow.errors import DimensionError, NotInDomainError
from tangentflow.series import INFINITY, Series, diff, order, variable
from tangentflow.vector_field import (
    VectorField, apply, field_order, power_apply, powers, scale_conjugate_field,
)

from conftest import random_field, random_series, small_series


def x2_field(N):
    return VectorField([Series(1, N, {(2,): 1})], 2)


def test_powers_of_x2_field():
    X = x2_field(12)
    for j in range(1, 8):
        assert power_apply(X, j, variable(0, 1, 12)) == Series(1, 12, {(j + 1,): math.factorial(j)})


def test_apply_matches_definition(rng):
    for _ in range(20):
        m, n = rng.randint(1, 3), rng.choice([2, 3])
        X = random_field(rng, m, n, 8)
        g = random_series(rng, m, 8)
        # sum_i X_i * d_i g on term dictionaries; X_i has order >= n, so the
        # product is exact up to g.trunc + n - 1
        T = min(X.trunc, g.trunc + n - 1)
        want = {}
        for i in range(m):
            for a, c in X.components[i].terms():
                for b, d in diff(g, i).terms():
                    e = tuple(x + y for x, y in zip(a, b))
                    if sum(e) <= T:
                        want[e] = want.get(e, 0) + c * d
        want = Series(m, T, want)
        got = apply(X, g)
        assert got.trunc == T
        assert got == want


@settings(max_examples=30, deadline=None)
@given(small_series(trunc=6), small_series(trunc=6))
def test_derivation_leibniz(f, g):
    X = VectorField([Series(2, 6, {(2, 0): 1, (1, 1): -2}), Series(2, 6, {(0, 3): Fraction(1, 2)})], 2)
    assert apply(X, f * g) == apply(X, f) * g + f * apply(X, g)


def test_linearity(rng):
    X = random_field(rng, 2, 2, 7)
    f, g = random_series(rng, 2, 7), random_series(rng, 2, 7)
    c = Fraction(-3, 5)
    assert apply(X, f + g.scale(c)) == apply(X, f) + apply(X, g).scale(c)
    Y = random_field(rng, 2, 2, 7)
    assert apply(X + Y.scale(c), f) == apply(X, f) + apply(Y, f).scale(c)


def test_order_growth(rng):
    for _ in range(20):
        m, n = rng.randint(1, 3), rng.choice([2, 3])
        X = random_field(rng, m, n, 10)
        g = random_series(rng, m, 10, lo=1)
        h = apply(X, g)
        if not h.is_zero():
            assert order(h) >= order(g) + n - 1


def test_general_leibniz(rng):
    X = random_field(rng, 2, 2, 9)
    f, g = random_series(rng, 2, 9), random_series(rng, 2, 9)
    for j in range(1, 4):
        lhs = power_apply(X, j, f * g)
        rhs = Series(2, lhs.trunc)
        for i in range(j + 1):
            term = power_apply(X, i, f) * power_apply(X, j - i, g)
            rhs = rhs + Series(2, lhs.trunc, dict(term.terms())).scale(math.comb(j, i))
        assert lhs == rhs
    assert powers(X, g, 3)[2] == power_apply(X, 3, g)


def test_field_order():
    assert field_order(x2_field(6)) == 2
    assert field_order(VectorField.zero(2, 3, 6)) == INFINITY


def test_rejects_low_order_and_bad_n():
    with pytest.raises(NotInDomainError):
        VectorField([Series(1, 5, {(1,): 1})], 2)
    with pytest.raises(NotInDomainError):
        VectorField([Series(1, 5, {(2,): 1})], 1)
    with pytest.raises(DimensionError):
        VectorField([Series(2, 5, {(2, 0): 1})], 2)


def test_scale_conjugate_field():
    X = VectorField([Series(1, 5, {(2,): 1, (4,): 3})], 2)
    Y = scale_conjugate_field(X, Fraction(1, 2))
    assert Y.components[0] == Series(1, 5, {(2,): Fraction(1, 2), (4,): Fraction(3, 8)})
