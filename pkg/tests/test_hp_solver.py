import mpmath
import pytest
from mpmath import mp, mpf

from hprates import (
    HPSystemResult,
    KindMismatchError,
    ParameterDomainError,
    Polynomial,
    discriminant,
    hp_type1,
    hp_type2,
    laurent_coeffs_power,
    pade,
    remainder_order,
)
from hprates.hp_solver import INFINITE_ORDER, combination_order
from hprates.polynomial import real_roots_in_interval


def geometric(N):
    # 1/(z - 2) = sum_{k>=1} 2^(k-1) z^-k
    return [mpf(0)] + [mpf(2) ** (k - 1) for k in range(1, N)]


def coeffs(model, N):
    return [laurent_coeffs_power(model, N, p) for p in (1, 2, 3)]


def dense_type2(series, deg, m):
    """Independent oracle: solve the defining equations with mpmath's own LU."""
    rows, rhs = [], []
    for c in series:
        for i in range(1, m + 1):
            rows.append([c[i + j] for j in range(deg)])
            rhs.append(-c[i + deg])
    q = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
    return [q[j] for j in range(deg)] + [mpf(1)]


def test_pade_reproduces_rational_function():
    with mp.workdps(60):
        res = pade(geometric(5), 1)
        Q, P = res.denominator, res.numerators[0]
        assert [float(x) for x in Q.coefficients] == [-2.0, 1.0]
        assert abs(P.coefficients[0] - 1) < mpf(10) ** -50 and P.degree == 0
        assert remainder_order(Q, P, geometric(12)) == INFINITE_ORDER


def test_pade_degree_zero_is_constant():
    with mp.workdps(60):
        c = [mpf(3), mpf(1), mpf(2)]
        res = pade(c, 0)
        assert list(res.denominator.coefficients) == [1]
        assert list(res.numerators[0].coefficients) == [3]


def test_pade_rank_deficient_returns_minimal_degree():
    with mp.workdps(60):
        res = pade(geometric(5), 2)
        assert res.rank_deficiency == 1
        assert res.denominator.degree == 1
        assert res.notes


def test_pade_needs_enough_coefficients():
    with pytest.raises(ParameterDomainError):
        pade([mpf(1)] * 4, 2)


def test_pade_model_zeros_simple_in_E(model):
    with model.precision.workdps():
        res = pade(laurent_coeffs_power(model, 21, 1), 10)
        roots = real_roots_in_interval(res.denominator, -1, 1)
        assert len(roots) == 10
        assert min(b - a for a, b in zip(roots, roots[1:])) > 0


def test_pade_generic_order_reported(model):
    with model.precision.workdps():
        n = 8
        res = pade(laurent_coeffs_power(model, 2 * n + 1, 1), n)
        order = remainder_order(res.denominator, res.numerators[0], laurent_coeffs_power(model, 40, 1))
        assert order >= n + 1
        assert order == n + 1


def test_type2_pair_small(model):
    with model.precision.workdps():
        c = coeffs(model, 4)
        res = hp_type2(c[0], c[1], order=2, m=1)
        assert res.denominator.degree == 2
        roots = real_roots_in_interval(res.denominator, -1, 1)
        assert len(roots) == 2
        assert res.N == 4


@pytest.mark.parametrize("m", [1, 2, 3])
def test_type2_pair_matches_dense_solve(model, m):
    with model.precision.workdps():
        c = coeffs(model, 3 * m + 1)
        res = hp_type2(c[0], c[1], order=2, m=m)
        ref = dense_type2(c[:2], 2 * m, m)
        diff = max(abs(x - y) for x, y in zip(res.denominator.coefficients, ref))
        assert diff < mpf(10) ** -(model.digits // 2)


@pytest.mark.parametrize("l", [1, 2, 3])
def test_type2_triple_matches_dense_solve(model, l):
    with model.precision.workdps():
        c = coeffs(model, 4 * l + 1)
        res = hp_type2(*c, order=3, m=l)
        ref = dense_type2(c, 3 * l, l)
        diff = max(abs(x - y) for x, y in zip(res.denominator.coefficients, ref))
        assert diff < mpf(10) ** -(model.digits // 2)
        assert res.denominator.degree == 3 * l
        assert len(real_roots_in_interval(res.denominator, -1, 1)) == 3 * l


@pytest.mark.parametrize("m", [2, 6, 10])
def test_type2_pair_remainders_vanish(model, m):
    with model.precision.workdps():
        c = coeffs(model, 3 * m + 20)
        res = hp_type2(c[0][: 3 * m + 1], c[1][: 3 * m + 1], order=2, m=m)
        order = remainder_order(res.denominator, res.numerators, (c[0], c[1]))
        assert order >= m + 1
        assert res.residual_order >= m + 1


def test_type2_triple_needs_cube_coefficients(model):
    c = coeffs(model, 5)
    with pytest.raises(ParameterDomainError):
        hp_type2(c[0], c[1], None, order=3, m=1)
    with pytest.raises(ParameterDomainError):
        hp_type2(c[0], c[1], order=4, m=1)


def test_type1_pair_degree_zero_brute_force(model):
    with model.precision.workdps():
        c = coeffs(model, 2)
        res = hp_type1(c, order=2, m=0)
        Q0, Q1, Q2 = (p.coefficients[0] for p in res.polynomials)
        # z^-1 coefficient of Q1 f + Q2 f^2 vanishes, Q0 cancels the constant
        assert Q2 == 1
        assert abs(Q1 * c[0][1] + Q2 * c[1][1]) < mpf(10) ** -190
        assert abs(Q0 + Q1 * c[0][0] + Q2 * c[1][0]) < mpf(10) ** -190


@pytest.mark.parametrize("order,m", [(2, 3), (2, 8), (3, 2), (3, 5)])
def test_type1_residual_window(model, order, m):
    with model.precision.workdps():
        N = 3 * m + 2 if order == 2 else 4 * m + 3
        c = coeffs(model, N + 15)
        res = hp_type1([x[:N] for x in c], order=order, m=m)
        assert res.N == N
        assert all(p.degree <= m for p in res.polynomials)
        assert res.polynomials[-1].leading == 1
        got = combination_order(res.polynomials, c[:order])
        assert got >= order * m + order


def test_type1_scaling_invariance(model):
    with model.precision.workdps():
        m = 4
        c = coeffs(model, 3 * m + 12)
        res = hp_type1([x[: 3 * m + 2] for x in c], order=2, m=m)
        scaled = tuple(p.scale(mpf("-7.5")) for p in res.polynomials)
        assert combination_order(scaled, c[:2]) == combination_order(res.polynomials, c[:2])


def _fake(kind, polys):
    return HPSystemResult(kind, 0, 1, tuple(Polynomial([mpf(x)]) for x in polys), INFINITE_ORDER, mpf(1))


def test_discriminant_formulas():
    with mp.workdps(60):
        D = discriminant(_fake("type1_pair", [0, 1, 0]))
        assert list(D.coefficients) == [1]
        D = discriminant(_fake("type1_triple", [0, 0, 0, 1]))
        assert all(x == 0 for x in D.coefficients)
        # cubic z^3 - z has discriminant 4
        D = discriminant(_fake("type1_triple", [0, -1, 0, 1]))
        assert D.coefficients[0] == 4


def test_discriminant_kind_mismatch():
    with pytest.raises(KindMismatchError):
        discriminant(_fake("pade", [1, 1]))


def test_remainder_order_insufficient_coefficients():
    with mp.workdps(60):
        Q = Polynomial([mpf(-2), mpf(1)])
        with pytest.raises(ParameterDomainError):
            remainder_order(Q, Polynomial([mpf(1)]), geometric(2))


def test_precision_guard_and_rank_report():
    # at 50 digits the pair system loses its digits around m = 10
    from hprates import PrecisionExhaustedError, make_model

    M = make_model(2, 3, 50)
    with M.precision.workdps():
        c = coeffs(M, 91)
        with pytest.raises(PrecisionExhaustedError):
            hp_type2(c[0][:31], c[1][:31], order=2, m=10)
        res = hp_type2(c[0], c[1], order=2, m=30)
        assert res.rank_deficiency > 0 and res.notes
