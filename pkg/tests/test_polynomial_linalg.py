import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from hprates import NonConvergenceError, ParameterDomainError, Polynomial, RankDeficiencyError, poly_roots
from hprates import linalg
from hprates.polynomial import real_roots_in_interval


def test_roots_of_z_squared_minus_one():
    with mp.workdps(60):
        zs = poly_roots(Polynomial([mpf(-1), mpf(0), mpf(1)]))
        assert zs.degree == 2
        assert sorted(float(x) for x in zs.real_parts()) == [-1.0, 1.0]
        assert all(w == mpf(1) / 2 for _, w in zs.normalized_counting_measure())


def test_clustered_roots_resolved():
    with mp.workdps(120):
        exact = [mpf(k) / 20 for k in range(1, 16)]
        P = Polynomial.from_roots(exact)
        got = sorted(poly_roots(P).real_parts())
        assert max(abs(a - b) for a, b in zip(got, exact)) < mpf(10) ** -30


def test_root_residuals_small():
    with mp.workdps(80):
        P = Polynomial([mpf(k % 5) - 2 for k in range(12)] + [mpf(1)])
        zs = poly_roots(P)
        assert zs.degree == P.degree
        assert max(zs.residuals) < mpf(10) ** -(mp.dps // 4)


def test_double_root_converges():
    with mp.workdps(60):
        P = Polynomial.from_roots([mpf("0.3"), mpf("0.3"), mpf(-2)])
        got = sorted(poly_roots(P).real_parts())
        assert abs(got[0] + 2) < mpf(10) ** -50
        assert abs(got[1] - mpf("0.3")) < mpf(10) ** -25


def test_iteration_cap_reported():
    with mp.workdps(60):
        P = Polynomial.from_roots([mpf(k) for k in range(1, 9)])
        with pytest.raises(NonConvergenceError):
            poly_roots(P, max_iter=1)


def test_roots_need_positive_degree():
    with pytest.raises(ParameterDomainError):
        poly_roots(Polynomial([mpf(3)]))


def test_real_roots_in_interval_counts():
    with mp.workdps(60):
        roots = [mpf(k) / 7 for k in range(-6, 7)]
        got = real_roots_in_interval(Polynomial.from_roots(roots), -1, 1)
        assert len(got) == 13
        assert max(abs(a - b) for a, b in zip(got, roots)) < mpf(10) ** -40


small = st.integers(min_value=-9, max_value=9)


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=2, max_size=6), st.lists(small, min_size=2, max_size=6))
def test_polynomial_arithmetic_matches_evaluation(a, b):
    with mp.workdps(40):
        P, Q = Polynomial([mpf(x) for x in a]), Polynomial([mpf(x) for x in b])
        z = mpf("0.37")
        assert abs((P * Q)(z) - P(z) * Q(z)) < mpf(10) ** -30
        assert abs((P + Q)(z) - P(z) - Q(z)) < mpf(10) ** -30
        assert abs((P - Q)(z) - P(z) + Q(z)) < mpf(10) ** -30


def test_lu_solve_matches_mpmath():
    with mp.workdps(80):
        n = 12
        A = [[1 / mpf(i + j + 1) for j in range(n)] for i in range(n)]  # Hilbert
        b = [mpf(1)] * n
        x = linalg.solve(A, b)
        ref = mpmath.lu_solve(mpmath.matrix(A), mpmath.matrix(b))
        assert max(abs(x[i] - ref[i]) for i in range(n)) / max(abs(v) for v in x) < mpf(10) ** -50


def test_condition_estimate_close_to_true_value():
    with mp.workdps(80):
        n = 8
        A = [[1 / mpf(i + j + 1) for j in range(n)] for i in range(n)]
        inv = mpmath.inverse(mpmath.matrix(A))
        true = linalg.norm1(A) * max(sum(abs(inv[i, j]) for i in range(n)) for j in range(n))
        est = linalg.condition_estimate(A)
        assert true / 10 <= est <= true * (1 + mpf(10) ** -40)


def test_singular_matrix_rejected():
    with mp.workdps(50):
        A = [[mpf(1), mpf(2)], [mpf(2), mpf(4)]]
        with pytest.raises(RankDeficiencyError):
            linalg.lu_factor(A)


def test_nullspace_vector():
    with mp.workdps(50):
        A = [[mpf(1), mpf(2), mpf(3)], [mpf(4), mpf(5), mpf(6)]]
        v, nullity = linalg.nullspace_vector(A)
        assert nullity == 1
        assert max(abs(sum(a * x for a, x in zip(r, v))) for r in A) < mpf(10) ** -45


def test_roots_of_large_modulus_pass_the_residual_check():
    # a tiny leading coefficient puts one root far out; its backward error is still small
    with mp.workdps(60):
        P = Polynomial.from_roots([mpf(1), mpf(-2), mpf(10) ** 25])
        zs = poly_roots(P)
        big = max(zs.roots, key=abs)
        assert abs(big - mpf(10) ** 25) / mpf(10) ** 25 < mpf(10) ** -40
        assert max(zs.residuals) < mpf(10) ** -(mp.dps // 4)
