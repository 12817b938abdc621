"""Padé and Hermite-Padé (type I and type II) polynomials from Laurent coefficients.

Coefficient sequences are the Laurent coefficients ``c_k`` of a function at
infinity, ``F(z) = sum_k c_k z^-k``. Index conventions follow the common
denominator degree: Padé ``n`` (deg Q = n), pairs ``m`` (deg Q = 2m), triples
``l`` (deg Q = 3l), type I ``m``/``l`` (each polynomial of degree <= index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf

from . import linalg
from .errors import (
    KindMismatchError,
    ParameterDomainError,
    PrecisionExhaustedError,
    RankDeficiencyError,
)
from .polynomial import Polynomial

KINDS = ("pade", "type2_pair", "type2_triple", "type1_pair", "type1_triple")

INFINITE_ORDER = math.inf


@dataclass(frozen=True)
class HPSystemResult:
    """Solution of one defining linear system.

    ``polynomials`` is ``(Q, P_1, ...)`` for Padé/type II (denominator first) and
    ``(Q_0, Q_1, ...)`` for type I.
    """

    kind: str
    index: int
    N: int
    polynomials: tuple
    residual_order: float
    condition_estimate: mpf
    rank_deficiency: int = 0
    notes: tuple = field(default=())

    @property
    def denominator(self):
        if self.kind.startswith("type1"):
            raise KindMismatchError("type I results have no common denominator")
        return self.polynomials[0]

    @property
    def numerators(self):
        return self.polynomials[1:]


def required_coefficients(kind, index):
    """Number of Laurent coefficients that determine the system of this kind."""
    return {
        "pade": 2 * index + 1,
        "type2_pair": 3 * index + 1,
        "type2_triple": 4 * index + 1,
        "type1_pair": 3 * index + 2,
        "type1_triple": 4 * index + 3,
    }[kind]


def tail_coefficient(Q, c, i):
    """Coefficient of z^-i in Q(z) * sum_k c_k z^-k (i may be negative)."""
    q = Q.coefficients if isinstance(Q, Polynomial) else Q
    lo = max(0, -i)
    hi = min(len(q) - 1, len(c) - 1 - i)
    if any(q[j] != 0 for j in range(max(lo, hi + 1), len(q))):
        raise ParameterDomainError(f"not enough coefficients for the z^-{i} term")
    if hi < lo:
        return mpf(0)
    return mpmath.fdot((q[j], c[i + j]) for j in range(lo, hi + 1))


def polynomial_part(Q, c):
    """Polynomial part of Q(z) * F(z) for F with Laurent coefficients c."""
    d = Q.degree
    return Polynomial([tail_coefficient(Q, c, -p) for p in range(d + 1)] if d >= 0 else [mpf(0)])


def _check_length(coeffs, needed, what):
    if len(coeffs) < needed:
        raise ParameterDomainError(f"{what} needs {needed} coefficients, got {len(coeffs)}")


def _precision_guard(cond):
    if cond * mpf(10) ** (-mp.dps) > mpf(10) ** -20:
        raise PrecisionExhaustedError(
            f"condition estimate {mpmath.nstr(cond, 5)} too large for {mp.dps} digits"
        )


def _solve_monic_denominator(series, deg, conditions):
    """Monic Q of degree ``deg`` killing z^-1..z^-conditions of Q*F for every F in ``series``.

    Returns (Q, condition_estimate).
    """
    rows, rhs = [], []
    for c in series:
        for i in range(1, conditions + 1):
            rows.append([c[i + j] for j in range(deg)])
            rhs.append(-c[i + deg])
    if deg == 0:
        return Polynomial([mpf(1)]), mpf(1)
    lu = linalg.lu_factor(rows)
    q = lu.solve(rhs)
    cond = linalg.condition_estimate(rows, lu)
    return Polynomial(q + [mpf(1)]), cond


def _minimal_degree_denominator(series, deg, conditions):
    """Lowest-degree monic Q (deg <= ``deg``) satisfying all conditions (degenerate case)."""
    for d in range(0, deg + 1):
        eqs = [(c, i) for c in series for i in range(1, conditions + 1)]
        if d == 0:
            Q = Polynomial([mpf(1)])
        else:
            rows = [[c[i + j] for j in range(d)] for c, i in eqs]
            rhs = [-c[i + d] for c, i in eqs]
            # square subsystem from the best-conditioned leading equations
            try:
                sub_rows, sub_rhs = _independent_rows(rows, rhs, d)
                q = linalg.solve(sub_rows, sub_rhs)
            except RankDeficiencyError:
                continue
            Q = Polynomial(q + [mpf(1)])
        scale = max(abs(x) for c in series for x in c[: conditions + d + 1])
        tol = mpf(10) ** (-(mp.dps // 2)) * max(scale, 1) * max(1, Q.norm())
        if all(abs(tail_coefficient(Q, c, i)) <= tol for c, i in eqs):
            return Q, d
    raise RankDeficiencyError("no denominator of degree <= %d satisfies the conditions" % deg)


def _independent_rows(rows, rhs, d):
    picked, prhs = [], []
    for r, b in zip(rows, rhs):
        trial = picked + [r]
        if len(trial) > d:
            break
        picked, prhs = trial, prhs + [b]
        if len(picked) == d:
            break
    if len(picked) < d:
        raise RankDeficiencyError("too few equations")
    return picked, prhs


def _type2(series, deg, conditions, kind, index, N):
    notes = []
    deficiency = 0
    try:
        Q, cond = _solve_monic_denominator(series, deg, conditions)
    except RankDeficiencyError as exc:
        Q, d = _minimal_degree_denominator(series, deg, conditions)
        deficiency = deg - d
        cond = mpf("inf")
        notes.append(f"rank deficient system ({exc}); minimal degree {d} returned")
    else:
        _precision_guard(cond)
    numerators = [polynomial_part(Q, c) for c in series]
    order = min(_order_from_windows(Q, c) for c in series)
    return HPSystemResult(kind, index, N, (Q, *numerators), order, cond, deficiency, tuple(notes))


def pade(coeffs, n):
    """Diagonal Padé [n/n] at infinity: monic Q, deg Q <= n, Q*F - P = O(z^-(n+1))."""
    if n < 0:
        raise ParameterDomainError("n must be >= 0")
    _check_length(coeffs, 2 * n + 1, "pade")
    return _type2([list(coeffs)], n, n, "pade", n, 2 * n + 1)


def hp_type2(coeffs_f, coeffs_f2, coeffs_f3=None, order=2, m=1):
    """Type II Hermite-Padé polynomials for (f, f^2) or (f, f^2, f^3).

    order 2: Q of degree 2m with Q f^k - P_k = O(z^-(m+1)), k = 1, 2.
    order 3: Q of degree 3m with the same for k = 1, 2, 3.
    """
    if order not in (2, 3):
        raise ParameterDomainError(f"order must be 2 or 3, got {order}")
    if m < 0:
        raise ParameterDomainError("index must be >= 0")
    if order == 2:
        series = [list(coeffs_f), list(coeffs_f2)]
        kind, N = "type2_pair", 3 * m + 1
    else:
        if coeffs_f3 is None:
            raise ParameterDomainError("order 3 needs the coefficients of f^3")
        series = [list(coeffs_f), list(coeffs_f2), list(coeffs_f3)]
        kind, N = "type2_triple", 4 * m + 1
    for c in series:
        _check_length(c, N, kind)
    return _type2(series, order * m, m, kind, m, N)


def hp_type1(coeffs, order=2, m=1):
    """Type I Hermite-Padé polynomials for (1, f, f^2) or (1, f, f^2, f^3).

    ``coeffs`` is the list of coefficient sequences of f, f^2 (and f^3). Each Q_j
    has degree <= m and Q_0 + sum_j Q_j f^j = O(z^-(order*m + order)). The leading
    coefficient of the highest-index nonzero polynomial is normalized to 1.
    """
    if order not in (2, 3):
        raise ParameterDomainError(f"order must be 2 or 3, got {order}")
    series = [list(c) for c in coeffs[:order]]
    if len(series) < order:
        raise ParameterDomainError(f"order {order} needs {order} coefficient sequences")
    kind = "type1_pair" if order == 2 else "type1_triple"
    N = required_coefficients(kind, m)
    for c in series:
        _check_length(c, N, kind)
    conditions = order * m + order - 1
    # unknowns: coefficients of Q_1..Q_order, each of length m+1
    rows = []
    for i in range(1, conditions + 1):
        row = []
        for c in series:
            row.extend(c[i + j] for j in range(m + 1))
        rows.append(row)
    vec, nullity = linalg.nullspace_vector(rows)
    polys = [Polynomial(vec[k * (m + 1):(k + 1) * (m + 1)]) for k in range(order)]
    top = max(k for k in range(order) if polys[k].degree >= 0)
    lead = polys[top].leading
    polys = [p.scale(1 / lead) for p in polys]
    Q0 = -_sum_polys([polynomial_part(p, c) for p, c in zip(polys, series)])
    tup = (Q0, *polys)
    order_found = combination_order(tup, series)
    notes = () if nullity == 1 else (f"null space dimension {nullity}",)
    cond = _type1_condition(rows)
    return HPSystemResult(kind, m, N, tup, order_found, cond, nullity - 1, notes)


def _type1_condition(rows):
    # condition of the square system obtained by fixing the last unknown
    sq = [r[:-1] for r in rows]
    try:
        return linalg.condition_estimate(sq)
    except RankDeficiencyError:
        return mpf("inf")


def _sum_polys(ps):
    out = Polynomial([mpf(0)])
    for p in ps:
        out = out + p
    return out


def _vanishes(value, Q, c, i):
    terms = [abs(q) * abs(c[i + j]) for j, q in enumerate(Q.coefficients) if 0 <= i + j < len(c)]
    scale = max(terms) if terms else mpf(0)
    return abs(value) <= mpf(10) ** (-(mp.dps // 2)) * max(scale, mp.eps)


def _order_from_windows(Q, c):
    """First i >= 1 where the z^-i coefficient of Q*F - P is numerically nonzero."""
    last = len(c) - 1 - max(Q.degree, 0)
    for i in range(1, last + 1):
        if not _vanishes(tail_coefficient(Q, c, i), Q, c, i):
            return i
    return INFINITE_ORDER


def remainder_order(Q, P, coeffs):
    """Verified vanishing order at infinity of Q*F - P.

    ``P`` may be a tuple of numerators with a matching tuple of coefficient
    sequences (type II); the minimum over components is returned. The answer is
    an integer i (remainder ~ z^-i) or ``INFINITE_ORDER`` when every coefficient
    in the available window vanishes.
    """
    if isinstance(P, Polynomial):
        P, coeffs = (P,), (coeffs,)
    orders = []
    for Pk, c in zip(P, coeffs):
        c = list(c)
        if len(c) < max(Q.degree, 0) + 2:
            raise ParameterDomainError("insufficient coefficients to verify any order")
        for p in range(max(Q.degree, Pk.degree) + 1):
            expected = Pk.coefficients[p] if p <= Pk.degree else 0
            got = tail_coefficient(Q, c, -p)
            if abs(got - expected) > mpf(10) ** (-(mp.dps // 2)) * max(1, abs(got)):
                return 0
        orders.append(_order_from_windows(Q, c))
    return min(orders)


def combination_order(polys, series):
    """Vanishing order at infinity of Q_0 + sum_j Q_j F_j (type I remainder)."""
    Q0, rest = polys[0], polys[1:]
    maxdeg = max(p.degree for p in polys)
    avail = min(len(c) for c in series) - 1 - max(maxdeg, 0)
    for i in range(-maxdeg, avail + 1):
        total = sum(tail_coefficient(p, c, i) for p, c in zip(rest, series))
        if i <= 0:
            total += Q0.coefficients[-i] if -i <= Q0.degree else 0
        terms = []
        for p, c in zip(rest, series):
            terms += [abs(q) * abs(c[i + j]) for j, q in enumerate(p.coefficients) if 0 <= i + j < len(c)]
        scale = max(terms) if terms else mpf(1)
        if abs(total) > mpf(10) ** (-(mp.dps // 2)) * max(scale, mp.eps):
            return i if i > 0 else 0
    return INFINITE_ORDER


def discriminant(result):
    """Discriminant polynomial of the type I tuple (quadratic or cubic)."""
    if result.kind == "type1_pair":
        Q0, Q1, Q2 = result.polynomials
        return Q1 * Q1 - Q0 * Q2 * 4
    if result.kind == "type1_triple":
        Q0, Q1, Q2, Q3 = result.polynomials
        return (
            Q3 * Q2 * Q1 * Q0 * 18
            - (Q2 ** 3) * Q0 * 4
            + (Q2 * Q2) * (Q1 * Q1)
            - Q3 * (Q1 ** 3) * 4
            - (Q3 * Q3) * (Q0 * Q0) * 27
        )
    raise KindMismatchError(f"discriminant needs a type I result, got {result.kind}")
