"""Numerical verification of the majorant estimates.

Covers the series Theta, the constant C_{m,n}, the sequence b_q and its
bound, the constant A with the iterated-power estimate, the quantitative
bound on the generator under the smallness condition, and the increasing
radii sequence used below the critical Gevrey exponent.

Exact rational arithmetic is used whenever the Gevrey exponent s is an
integer. Otherwise values are computed with mpmath at
``PrecisionConfig.significant_digits`` and every comparison is tilted
against passing: the left side is inflated and the right side deflated by
``PrecisionConfig.slack``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import mpmath
import numpy as np
from scipy.special import gammaln

from .errors import InconclusiveSupError, NotInDomainError
from .exp_log import Diffeo, exp_field, log_diffeo
from .majorant import GevreyParams, gevrey_dominated
from .series import Rational, as_polynomial, truncate, variable
from .vector_field import VectorField, powers


@dataclass(frozen=True)
class PrecisionConfig:
    significant_digits: int = 50
    tail_tolerance: float = 1e-40

    def __post_init__(self):
        if self.significant_digits < 15:
            raise ValueError("need at least 15 significant digits")
        if not self.tail_tolerance > 0:
            raise ValueError("tail tolerance must be positive")

    @property
    def slack(self):
        """Relative rounding allowance applied against passing."""
        return mpmath.mpf(10) ** (10 - self.significant_digits)


DEFAULT_PRECISION = PrecisionConfig()


@dataclass
class BoundsReport:
    """Outcome of one verification sweep.

    ``violations`` holds dicts with ``params``, ``lhs`` and ``rhs``. A report
    whose hypothesis could not be established carries a ``precondition``
    message and is neither passed nor violated.
    """

    name: str
    range: Dict[str, Any]
    violations: List[Dict[str, Any]] = field(default_factory=list)
    margins: Dict[str, Any] = field(default_factory=dict)
    precondition: Optional[str] = None
    notes: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.precondition is None and not self.violations

    @property
    def status(self) -> str:
        if self.precondition is not None:
            return "precondition-failed"
        return "passed" if not self.violations else "failed"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "passed": self.passed,
            "range": _jsonable(self.range),
            "violations": _jsonable(self.violations),
            "margins": _jsonable(self.margins),
            "precondition": self.precondition,
            "notes": _jsonable(self.notes),
        }


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, float):
        return v if math.isfinite(v) else str(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, 20)
    return str(v)


class _Margins:
    """Running summary of ``rhs - lhs`` and ``lhs / rhs`` over checked points."""

    def __init__(self):
        self.points = 0
        self.min_gap = None
        self.max_ratio = None

    def add(self, lhs, rhs):
        self.points += 1
        gap = rhs - lhs
        if self.min_gap is None or gap < self.min_gap:
            self.min_gap = gap
        if rhs:
            ratio = lhs / rhs
            if self.max_ratio is None or ratio > self.max_ratio:
                self.max_ratio = ratio

    def as_dict(self):
        out = {"points": self.points}
        if self.min_gap is not None:
            out["min_gap"] = _short(self.min_gap)
            out["max_ratio"] = _short(self.max_ratio)
        return out


def _short(x):
    if isinstance(x, Fraction):
        return float(x) if abs(x) < Fraction(10) ** 300 else mpmath.mpf(x.numerator) / x.denominator
    return x


def _mp(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _up(x, cfg):
    return x * (1 + cfg.slack) if x >= 0 else x * (1 - cfg.slack)


def _down(x, cfg):
    return x * (1 - cfg.slack) if x >= 0 else x * (1 + cfg.slack)


def _is_int(s: Fraction) -> bool:
    return Fraction(s).denominator == 1


# -- Theta ------------------------------------------------------------------


def _check_y(y):
    if not 0 < y < 1:
        raise NotInDomainError(f"Theta needs 0 < y < 1, got {y}")


def _theta_sum(y, m, n, tol):
    # terms t_j = C(m-1+j, m-1) y^(j-n); t_{j+1}/t_j = y (m+j)/(j+1) decreases in j
    t = mpmath.mpf(math.comb(m - 1 + n, m - 1))
    total = mpmath.mpf(0)
    j = n
    while True:
        total += t
        rho = y * (m + j) / (j + 1)
        if rho < 1:
            tail = t * rho / (1 - rho)
            if tail < tol:
                return total, tail
        t *= rho
        j += 1


def theta(y, m: int, n: int, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """``sum_{j>=n} C(m-1+j, m-1) y^(j-n)`` by direct summation.

    Summation stops once the geometric bound on the remaining terms falls
    below ``cfg.tail_tolerance``; the returned partial sum underestimates the
    series by less than that.
    """
    _check_y(y)
    with mpmath.workdps(cfg.significant_digits):
        total, _ = _theta_sum(_mp(y), m, n, mpmath.mpf(cfg.tail_tolerance))
        return +total


def theta_bounds(y, m: int, n: int, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Enclosure ``(lo, hi)`` of Theta(y) including rounding slack."""
    _check_y(y)
    with mpmath.workdps(cfg.significant_digits):
        total, tail = _theta_sum(_mp(y), m, n, mpmath.mpf(cfg.tail_tolerance))
        return _down(total, cfg), _up(total + tail, cfg)


def theta_closed_form(y: Rational, m: int, n: int) -> Fraction:
    """Exact Theta(y) for rational y from ``y^-n/(m-1)! d^(m-1)/dy^(m-1)[y^(m+n-1)/(1-y)]``.

    The derivative is expanded with the Leibniz rule.
    """
    y = Fraction(y)
    _check_y(y)
    M, r = m + n - 1, m - 1
    acc = Fraction(0)
    for i in range(r + 1):
        d_pow = Fraction(math.perm(M, i)) * y ** (M - i)
        d_geo = Fraction(math.factorial(r - i)) / (1 - y) ** (r - i + 1)
        acc += math.comb(r, i) * d_pow * d_geo
    return acc / math.factorial(r) / y ** n


# -- C_{m,n}, b_q, A -------------------------------------------------------


def c_mn(m: int, n: int) -> Fraction:
    if m < 1 or n < 2:
        raise NotInDomainError(f"need m >= 1 and n >= 2, got m={m}, n={n}")
    return max(Fraction(1, 2), Fraction(m, m + n - 1))


def bq_ratio(m: int, n: int, q: int, j: int) -> Fraction:
    """Exact ``(j+m-n)! (q-j+1+m-n)! (q-j+m)^(n-1) / (m! (q+m-n)!)``."""
    # cancel the larger factorial against (q+m-n)! before multiplying out
    small, big = sorted((j + m - n, q - j + 1 + m - n))
    top = q + m - n
    num = math.factorial(small) * (q - j + m) ** (n - 1)
    den = math.factorial(m) * math.prod(range(big + 1, top + 1))
    return Fraction(num, den)


def bq_terms(m: int, n: int, s: Rational, q: int, cfg: PrecisionConfig = DEFAULT_PRECISION) -> list:
    """Summands of b_q for j = n .. floor((q+1)/2); empty when that range is."""
    s = Fraction(s)
    out = []
    for j in range(n, (q + 1) // 2 + 1):
        R = bq_ratio(m, n, q, j)
        w = math.comb(j + m - 1, m - 1)
        if _is_int(s):
            out.append(R ** int(s) * w)
        else:
            with mpmath.workdps(cfg.significant_digits):
                out.append(mpmath.power(_mp(R), _mp(s)) * w)
    return out


def b_q(m: int, n: int, s: Rational, q: int, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """The sequence b_q; exact Fraction for integer s, mpf otherwise."""
    if q < 2 * n - 1:
        raise NotInDomainError(f"b_q is defined for q >= 2n-1 = {2 * n - 1}, got {q}")
    terms = bq_terms(m, n, s, q, cfg)
    if _is_int(Fraction(s)):
        return sum(terms, Fraction(0))
    with mpmath.workdps(cfg.significant_digits):
        return mpmath.fsum(terms)


def bq_bound(m: int, n: int, s: Rational, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """``((m+n-1)/(m+1))^(s(n-1)) Theta(C_{m,n}^s)``.

    Exact for integer s; otherwise a lower estimate (rounded down), which is
    the safe side when it is used as an upper bound.
    """
    s = Fraction(s)
    base = Fraction(m + n - 1, m + 1)
    C = c_mn(m, n)
    if _is_int(s):
        k = int(s)
        return base ** (k * (n - 1)) * theta_closed_form(C ** k, m, n)
    with mpmath.workdps(cfg.significant_digits):
        y = mpmath.power(_mp(C), _mp(s))
        lo, _ = theta_bounds(y, m, n, cfg)
        return _down(mpmath.power(_mp(base), _mp(s) * (n - 1)) * lo, cfg)


def a_const(m: int, n: int, s: Rational, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """``A = 2 m!^s ((m+n-1)/(m+1))^(s(n-1)) Theta(C_{m,n}^s)``; exact for integer s."""
    s = Fraction(s)
    if s <= 0:
        raise NotInDomainError("A is defined for s > 0")
    if _is_int(s):
        return 2 * Fraction(math.factorial(m)) ** int(s) * bq_bound(m, n, s, cfg)
    lo, hi = a_const_bounds(m, n, s, cfg)
    with mpmath.workdps(cfg.significant_digits):
        return (lo + hi) / 2


def a_const_bounds(m: int, n: int, s: Rational, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Enclosure ``(lo, hi)`` of A as mpf values."""
    s = Fraction(s)
    if s <= 0:
        raise NotInDomainError("A is defined for s > 0")
    with mpmath.workdps(cfg.significant_digits):
        if _is_int(s):
            A = _mp(a_const(m, n, s, cfg))
            return _down(A, cfg), _up(A, cfg)
        sm = _mp(s)
        y = mpmath.power(_mp(c_mn(m, n)), sm)
        t_lo, t_hi = theta_bounds(y, m, n, cfg)
        pre = 2 * mpmath.power(math.factorial(m), sm) * mpmath.power(
            _mp(Fraction(m + n - 1, m + 1)), sm * (n - 1))
        return _down(pre * t_lo, cfg), _up(pre * t_hi, cfg)


# -- b_q sweep ----------------------------------------------------------------


def _bq_float_table(m: int, n: int, s: float, Q: int) -> np.ndarray:
    """b_q for q = 2n-1 .. Q in float64 via log-gamma, one row per q."""
    qs = np.arange(2 * n - 1, Q + 1, dtype=float)[:, None]
    jmax = (Q + 1) // 2
    js = np.arange(n, jmax + 1, dtype=float)[None, :]
    mask = js <= np.floor((qs + 1) / 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        log_r = (gammaln(js + m - n + 1) + gammaln(qs - js + 2 + m - n)
                 - gammaln(m + 1) - gammaln(qs + m - n + 1)
                 + (n - 1) * np.log(qs - js + m))
        log_w = gammaln(js + m) - gammaln(js + 1) - gammaln(m)
        terms = np.where(mask, np.exp(s * log_r + log_w), 0.0)
    return terms.sum(axis=1)


def check_bq_bounded(m: int, n: int, s: Rational, Q: int,
                     cfg: PrecisionConfig = DEFAULT_PRECISION) -> BoundsReport:
    """Verify ``b_q < ((m+n-1)/(m+1))^(s(n-1)) Theta(C^s)`` for ``2n-1 <= q <= Q``.

    Every q is screened in float64 with a relative allowance of 1e-8 on the
    left side; any q that does not clear the screen is re-evaluated with
    exact ratios at full precision before it can count as a violation.
    """
    s = Fraction(s)
    q0 = 2 * n - 1
    report = BoundsReport("bq_bounded", {"m": m, "n": n, "s": s, "q_min": q0, "Q": Q})
    if Q < q0:
        report.precondition = f"Q must be at least 2n-1 = {q0}"
        return report
    bound = bq_bound(m, n, s, cfg)
    with mpmath.workdps(cfg.significant_digits):
        bound_f = float(_mp(bound))
        table = _bq_float_table(m, n, float(s), Q)
        margins = _Margins()
        rechecked = 0
        for q, val in zip(range(q0, Q + 1), table):
            if val * (1 + 1e-8) < bound_f * (1 - 1e-12):
                margins.add(float(val), bound_f)
                continue
            rechecked += 1
            exact = b_q(m, n, s, q, cfg)
            if _is_int(s):
                lhs, rhs, ok = exact, bound, exact < bound
            else:
                lhs, rhs = _up(exact, cfg), bound
                ok = lhs < rhs
            margins.add(_short(lhs) if isinstance(lhs, Fraction) else lhs,
                        _short(rhs) if isinstance(rhs, Fraction) else rhs)
            if not ok:
                report.violations.append({"params": {"q": q}, "lhs": lhs, "rhs": rhs})
        report.margins = margins.as_dict()
        report.margins["max_bq"] = float(table.max())
        report.notes = {"bound": bound, "rechecked_at_full_precision": rechecked}
    return report


# -- iterated powers -----------------------------------------------------------


def _hypothesis_failure(X: VectorField, s: Fraction, a: Fraction, N: int) -> Optional[str]:
    if X.trunc < N:
        return f"field known only to degree {X.trunc} < N = {N}"
    P = GevreyParams(s, a, X.m, X.n)
    for j, comp in enumerate(X.components):
        if not gevrey_dominated(truncate(comp, N), P):
            return f"component {j + 1} is not dominated by H_{{s,n}}(a x) up to degree {N}"
    return None


def _polynomial_powers(X: VectorField, N: int, K: int) -> Tuple[VectorField, List[List]]:
    """Powers ``X^k(x_j)``, k <= K, of the degree-N truncation of X.

    Coefficients of degree <= N + k - 1 agree with those of X itself, since
    they only involve homogeneous parts of X of degree <= N.
    """
    T = N + K - 1
    Xp = VectorField([as_polynomial(truncate(c, N), T) for c in X.components], X.n)
    return Xp, [powers(Xp, variable(j, X.m, T), K, T) for j in range(X.m)]


def check_potencias(X: VectorField, s: Rational, a: Rational, K: int, N: int,
                    cfg: PrecisionConfig = DEFAULT_PRECISION) -> BoundsReport:
    """Check ``Coef_q(X^k) <= (aA)^(k-1) (q+m-n)!^s a^q h_q d/dx`` for k <= K, n <= q <= N+k-1."""
    s, a = Fraction(s), Fraction(a)
    m, n = X.m, X.n
    report = BoundsReport("potencias", {"m": m, "n": n, "s": s, "a": a, "K": K, "N": N})
    if s < Fraction(1, n - 1):
        report.precondition = f"needs s >= 1/(n-1) = {Fraction(1, n - 1)}"
        return report
    failure = _hypothesis_failure(X, s, a, N)
    if failure:
        report.precondition = failure
        return report
    exact = _is_int(s)
    A = a_const(m, n, s, cfg) if exact else a_const_bounds(m, n, s, cfg)[0]
    report.notes["A"] = A
    _, pw = _polynomial_powers(X, N, K)
    margins = _Margins()
    with mpmath.workdps(cfg.significant_digits):
        for j in range(m):
            for k in range(1, K + 1):
                maxima = pw[j][k - 1].max_abs_by_degree()
                for q in range(n, N + k):
                    M = maxima.get(q, Fraction(0))
                    if exact:
                        lhs = M
                        rhs = (a * A) ** (k - 1) * math.factorial(q + m - n) ** int(s) * a ** q
                    else:
                        lhs = _up(_mp(M), cfg)
                        rhs = _down((_mp(a) * A) ** (k - 1)
                                    * mpmath.power(mpmath.factorial(q + m - n), _mp(s))
                                    * _mp(a) ** q, cfg)
                    margins.add(lhs, rhs)
                    if k == 1 and not exact:
                        # the hypothesis itself, (aA)^0 = 1: decide exactly
                        bad = not GevreyParams(s, a, m, n).bound_holds(q, M)
                    else:
                        bad = lhs > rhs
                    if bad:
                        report.violations.append(
                            {"params": {"component": j + 1, "k": k, "q": q}, "lhs": lhs, "rhs": rhs})
    report.margins = margins.as_dict()
    return report


def smallness_value(a: Rational, A) -> mpmath.mpf:
    """``sum_{k>=2} z^(k-1)/k! = (e^z - 1 - z)/z`` at ``z = 2aA``."""
    z = 2 * _mp(Fraction(a)) * _mp(A)
    return (mpmath.exp(z) - 1 - z) / z


def check_theorem_bound(F: Diffeo, s: Rational, a: Rational, N: int,
                        cfg: PrecisionConfig = DEFAULT_PRECISION) -> BoundsReport:
    """Check that the generator of F is dominated by ``H_{s,n}(2a x)`` up to degree N.

    Hypotheses: F's displacement is dominated by ``H_{s,n}(a x)`` and
    ``sum_{k>=2} (2aA)^(k-1)/k! <= 1/2`` (evaluated with A and the result
    rounded up).
    """
    s, a = Fraction(s), Fraction(a)
    m, n = F.m, F.n
    report = BoundsReport("theorem", {"m": m, "n": n, "s": s, "a": a, "N": N})
    if s < Fraction(1, n - 1):
        report.precondition = f"needs s >= 1/(n-1) = {Fraction(1, n - 1)}"
        return report
    if F.trunc < N:
        report.precondition = f"diffeomorphism known only to degree {F.trunc} < N = {N}"
        return report
    P = GevreyParams(s, a, m, n)
    for j, f in enumerate(F.displacement):
        if not gevrey_dominated(truncate(f, N), P):
            report.precondition = (
                f"displacement component {j + 1} is not dominated by H_{{s,n}}(a x) up to degree {N}")
            return report
    with mpmath.workdps(cfg.significant_digits):
        _, A_hi = a_const_bounds(m, n, s, cfg)
        small = _up(smallness_value(a, A_hi), cfg)
        report.notes["A_upper"] = A_hi
        report.notes["smallness"] = small
        if small > mpmath.mpf(1) / 2:
            report.precondition = (
                f"smallness condition fails: sum_(k>=2) (2aA)^(k-1)/k! = {mpmath.nstr(small, 8)} > 1/2; "
                "shrink a with scale_conjugate")
            return report
    X = log_diffeo(F, N)
    P2 = GevreyParams(s, 2 * a, m, n)
    margins = _Margins()
    d = s.denominator
    for j, comp in enumerate(X.components):
        for q, M in sorted(comp.max_abs_by_degree().items()):
            rhs_pow = math.factorial(q + m - n) ** s.numerator * P2.a ** (q * d)
            margins.add(M ** d, rhs_pow)
            if q < n or not P2.bound_holds(q, M):
                report.violations.append(
                    {"params": {"component": j + 1, "q": q}, "lhs": M, "rhs_to_power_d": rhs_pow})
    report.margins = margins.as_dict()
    report.margins["compared"] = "|X_q|^d vs (q+m-n)!^p (2a)^(qd) with s = p/d"
    return report


# -- radii sequence ------------------------------------------------------------


@dataclass(frozen=True)
class RadiosConfig:
    t: Any
    r: Any
    m: int
    a_start: Any = 1
    K: int = 200
    q_cap: int = 10 ** 6
    run: int = 50  # consecutive decreases that end a sup scan

    def __post_init__(self):
        if not 0 < self.t < 1:
            raise ValueError(f"need 0 < t < 1, got t={self.t}")
        if not 1 - self.t < self.r < 1:
            raise ValueError(f"need 1 - t < r < 1, got r={self.r}")
        if self.m < 1 or self.K < 1 or self.a_start <= 0:
            raise ValueError("need m >= 1, K >= 1 and a_start > 0")


def _g_float(q: np.ndarray, k: int, cfg: RadiosConfig) -> np.ndarray:
    t, r = float(cfg.t), float(cfg.r)
    return ((1 - t) * np.log(q + cfg.m) - r * math.log(k + 1)) / (q + k)


def _g_mp(q: int, k: int, cfg: RadiosConfig):
    return ((1 - _mp(cfg.t)) * mpmath.log(q + cfg.m) - _mp(cfg.r) * mpmath.log(k + 1)) / (q + k)


def _sup_scan(k: int, cfg: RadiosConfig):
    """``(q*, log of the sup factor, count of q scanned)`` for step k -> k+1.

    Scans q = 1, 2, ... until g has decreased ``cfg.run`` times in a row;
    raises InconclusiveSupError at ``cfg.q_cap``.
    """
    hi = 4096
    while True:
        hi = min(hi, cfg.q_cap)
        q = np.arange(1, hi + 1, dtype=float)
        g = _g_float(q, k, cfg)
        dec = (np.diff(g) < 0).astype(int)
        # stops[i] true when steps i .. i+run-1 all decrease
        stops = np.convolve(dec, np.ones(cfg.run, dtype=int), "valid") == cfg.run
        hits = np.flatnonzero(stops)
        if len(hits):
            stop = int(hits[0]) + cfg.run
            qstar = int(np.argmax(g[: stop + 1])) + 1
            break
        if hi >= cfg.q_cap:
            raise InconclusiveSupError(
                f"sup over q for k={k} not located below q_cap={cfg.q_cap}")
        hi *= 4
    candidates = range(max(1, qstar - 3), qstar + 4)
    best = max(candidates, key=lambda qq: _g_mp(qq, k, cfg))
    return best, _g_mp(best, k, cfg), stop + 1


def a_seq(cfg: RadiosConfig, prec: PrecisionConfig = DEFAULT_PRECISION):
    """The radii ``a_1 = a_start``, ``a_{k+1} = sup_q ((q+m)^(1-t)/(k+1)^r)^(1/(q+k)) a_k``.

    Returns ``(values, report)``; the report checks strict growth, the
    per-step bound ``a_{k+1} < (1 + (k+1)^(-r/(1-t)))^(1-t) a_k`` for k > m,
    the partial-product bound on ``a_k / a_m``, and the defining inequality
    ``k^r a_k^(k+q-1) >= (q+m)^(1-t) a_{k-1}^(k+q-1)`` over every scanned q >= 2.
    """
    report = BoundsReport("a_seq", {"t": cfg.t, "r": cfg.r, "m": cfg.m,
                                    "a_start": cfg.a_start, "K": cfg.K, "q_cap": cfg.q_cap})
    with mpmath.workdps(prec.significant_digits):
        t, r = _mp(cfg.t), _mp(cfg.r)
        expo = r / (1 - t)
        values = [_mp(cfg.a_start)]
        log_factors = []
        argmax = []
        for k in range(1, cfg.K):
            qstar, lf, scanned = _sup_scan(k, cfg)
            log_factors.append(lf)
            argmax.append(qstar)
            values.append(values[-1] * mpmath.exp(lf))
            # defining inequality, float screen then exact recheck near equality
            q = np.arange(2, scanned + 1, dtype=float)
            gaps = float(lf) - _g_float(q, k, cfg)
            for qq in (q[gaps < 1e-12 * max(1.0, abs(float(lf)))]).astype(int):
                if _g_mp(int(qq), k, cfg) > lf:
                    report.violations.append({"check": "key_inequality",
                                              "params": {"k": k + 1, "q": int(qq)},
                                              "lhs": _g_mp(int(qq), k, cfg), "rhs": lf})

        # a_k <= (prod_{j=m+1}^{k} (1 + j^-e))^(1-t) a_m for k > m
        partial = mpmath.mpf(1)
        a_m = values[cfg.m - 1] if cfg.m <= len(values) else None
        margins = _Margins()
        for k in range(1, cfg.K):
            a_k, a_next = values[k - 1], values[k]
            if not _down(a_next, prec) > _up(a_k, prec):
                report.violations.append({"check": "increasing", "params": {"k": k},
                                          "lhs": a_next, "rhs": a_k})
            if k > cfg.m:
                step = mpmath.power(1 + mpmath.power(k + 1, -expo), 1 - t)
                lhs, rhs = _up(a_next / a_k, prec), _down(step, prec)
                margins.add(lhs, rhs)
                if not lhs < rhs:
                    report.violations.append({"check": "bernoulli", "params": {"k": k},
                                              "lhs": lhs, "rhs": rhs})
            if k >= cfg.m:
                partial *= 1 + mpmath.power(k + 1, -expo)
                lhs = _up(a_next, prec)
                rhs = _down(mpmath.power(partial, 1 - t) * a_m, prec)
                if not lhs <= rhs:
                    report.violations.append({"check": "partial_product", "params": {"k": k + 1},
                                              "lhs": lhs, "rhs": rhs})
        # bound on the limit from the infinite product, with an integral tail estimate
        J = 10 ** 5
        head = mpmath.fsum(mpmath.log1p(mpmath.power(j, -expo)) for j in range(cfg.m + 1, J + 1))
        tail = mpmath.power(J, 1 - expo) / (expo - 1)
        a_m = values[min(cfg.m, len(values)) - 1]
        limit_bound = mpmath.exp((1 - t) * (head + tail)) * a_m
        report.margins = margins.as_dict()
        report.notes = {
            "final": values[-1],
            "limit_upper_bound": limit_bound,
            "final_ratio": values[-1] / values[-2] if len(values) > 1 else None,
            "max_argmax_q": max(argmax) if argmax else None,
        }
        if values[-1] > limit_bound:
            report.violations.append({"check": "limit_bound", "params": {"K": cfg.K},
                                      "lhs": values[-1], "rhs": limit_bound})
    return values, report


def _exp_prefactor_lower(cA, r, max_terms: int = 10 ** 7):
    """Lower bound for ``sum_{k>=1} (cA)^(k-1) / k!^(1-r)``.

    Summed in log space over k up to twice the peak index; a partial sum of
    positive terms can only underestimate, and the float result is deflated
    by a relative 1e-9.
    """
    x, b = float(mpmath.log(cA)), 1 - float(r)
    peak = math.exp(x / b) if x > 0 else 1.0
    K = int(min(max_terms, 2 * peak + 200))
    ks = np.arange(1, K + 1, dtype=float)
    L = (ks - 1) * x - b * gammaln(ks + 1)
    top = L.max()
    return mpmath.exp(top) * mpmath.mpf(float(np.exp(L - top).sum())) * (1 - mpmath.mpf(10) ** -9)


def check_biendefinido(X: VectorField, s: Rational, a: Rational, cfg: RadiosConfig, N: int,
                       prec: PrecisionConfig = DEFAULT_PRECISION) -> BoundsReport:
    """Checks below the critical exponent ``0 < s < 1/(n-1)``.

    With ``t = s(n-1)`` and the radii ``a_k`` started at ``a_1 = a``, verifies
    ``Coef_q(X^k) <= (a_k A)^(k-1) k!^r (q+m-n)!^s a_k^q`` for k <= cfg.K and
    ``n <= q <= N+k-1``, then that ``Exp(X)`` is dominated up to degree N by
    ``sum_k (cA)^(k-1)/k!^(1-r) H_{s,n}(c x)``. The limit c is replaced by the
    last computed radius, a lower estimate, which only makes the check harder.
    """
    s, a = Fraction(s), Fraction(a)
    m, n = X.m, X.n
    if not 0 < s < Fraction(1, n - 1):
        raise NotInDomainError(f"needs 0 < s < 1/(n-1) = {Fraction(1, n - 1)}, got s = {s}")
    t = s * (n - 1)
    if abs(float(t) - cfg.t) > 1e-12:
        raise ValueError(f"RadiosConfig.t = {cfg.t} does not match s(n-1) = {t}")
    report = BoundsReport("biendefinido", {"m": m, "n": n, "s": s, "a": a, "r": cfg.r,
                                           "K": cfg.K, "N": N})
    failure = _hypothesis_failure(X, s, a, N)
    if failure:
        report.precondition = failure
        return report
    K_seq = max(cfg.K, (N - 1) // (n - 1), 2)
    seq_cfg = RadiosConfig(t=cfg.t, r=cfg.r, m=m, a_start=a, K=K_seq,
                           q_cap=cfg.q_cap, run=cfg.run)
    radii, seq_report = a_seq(seq_cfg, prec)
    report.notes["radii"] = radii[: cfg.K]
    report.notes["a_seq_status"] = seq_report.status
    report.violations.extend(dict(v, check="a_seq:" + v.get("check", "")) for v in seq_report.violations)
    _, pw = _polynomial_powers(X, N, cfg.K)
    margins = _Margins()
    with mpmath.workdps(prec.significant_digits):
        A, _ = a_const_bounds(m, n, s, prec)
        sm, r = _mp(s), _mp(cfg.r)
        report.notes["A_lower"] = A
        for j in range(m):
            for k in range(1, cfg.K + 1):
                ak = radii[k - 1]
                maxima = pw[j][k - 1].max_abs_by_degree()
                for q in range(n, N + k):
                    M = maxima.get(q, Fraction(0))
                    lhs = _up(_mp(M), prec)
                    rhs = _down((ak * A) ** (k - 1) * mpmath.power(mpmath.factorial(k), r)
                                * mpmath.power(mpmath.factorial(q + m - n), sm) * ak ** q, prec)
                    margins.add(lhs, rhs)
                    if k == 1:
                        # the hypothesis itself; a_1 = a is rational, so decide exactly
                        bad = not GevreyParams(s, a, m, n).bound_holds(q, M)
                    else:
                        bad = lhs > rhs
                    if bad:
                        report.violations.append({"check": "power",
                                                  "params": {"component": j + 1, "k": k, "q": q},
                                                  "lhs": lhs, "rhs": rhs})
        c = radii[K_seq - 1]
        cA = c * A
        total = _exp_prefactor_lower(cA, r)
        report.notes["c"] = c
        report.notes["exp_prefactor"] = total
        F = exp_field(VectorField([truncate(comp, N) for comp in X.components], n), N)
        for j, f in enumerate(F.displacement):
            maxima = f.max_abs_by_degree()
            for q in range(n, N + 1):
                lhs = _up(_mp(maxima.get(q, Fraction(0))), prec)
                rhs = _down(total * mpmath.power(mpmath.factorial(q + m - n), sm) * c ** q, prec)
                margins.add(lhs, rhs)
                if lhs > rhs:
                    report.violations.append({"check": "exp",
                                              "params": {"component": j + 1, "q": q},
                                              "lhs": lhs, "rhs": rhs})
    report.margins = margins.as_dict()
    return report
