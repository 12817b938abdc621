"""Dense Gaussian elimination at working precision.

Partial pivoting, no iterative refinement: the same input and precision always
reproduce the same output bits.
"""

from __future__ import annotations

from mpmath import mp, mpf

from .errors import RankDeficiencyError


class LU:
    def __init__(self, rows, perm, max_entry):
        self.rows = rows
        self.perm = perm
        self.max_entry = max_entry

    @property
    def n(self):
        return len(self.rows)

    def pivots(self):
        return [self.rows[k][k] for k in range(self.n)]

    def solve(self, b):
        n = self.n
        y = [b[p] for p in self.perm]
        for i in range(n):
            row = self.rows[i]
            acc = y[i]
            for j in range(i):
                acc -= row[j] * y[j]
            y[i] = acc
        for i in range(n - 1, -1, -1):
            row = self.rows[i]
            acc = y[i]
            for j in range(i + 1, n):
                acc -= row[j] * y[j]
            y[i] = acc / row[i]
        return y

    def solve_transpose(self, b):
        n = self.n
        # A = P^T L U, so A^T x = b  <=>  U^T L^T (P x) = b
        y = list(b)
        for i in range(n):
            acc = y[i]
            for j in range(i):
                acc -= self.rows[j][i] * y[j]
            y[i] = acc / self.rows[i][i]
        for i in range(n - 1, -1, -1):
            acc = y[i]
            for j in range(i + 1, n):
                acc -= self.rows[j][i] * y[j]
            y[i] = acc
        x = [mpf(0)] * n
        for i, p in enumerate(self.perm):
            x[p] = y[i]
        return x


def lu_factor(A, rank_tol=None):
    """LU with partial pivoting of a square matrix given as a list of rows.

    Raises RankDeficiencyError when a pivot falls below ``rank_tol`` times the
    largest entry (default 10^(-0.8*dps)).
    """
    n = len(A)
    rows = [list(r) for r in A]
    perm = list(range(n))
    max_entry = max((abs(x) for r in rows for x in r), default=mpf(0))
    if rank_tol is None:
        rank_tol = mpf(10) ** (-int(0.8 * mp.dps))
    threshold = rank_tol * max_entry
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(rows[i][k]))
        if not abs(rows[p][k]) > threshold:
            raise RankDeficiencyError(f"pivot {k} of {n} below threshold; rank <= {k}")
        if p != k:
            rows[k], rows[p] = rows[p], rows[k]
            perm[k], perm[p] = perm[p], perm[k]
        rk = rows[k]
        pivot = rk[k]
        tail = rk[k + 1:]
        for i in range(k + 1, n):
            ri = rows[i]
            l = ri[k] / pivot
            ri[k] = l
            if l:
                ri[k + 1:] = [a - l * b for a, b in zip(ri[k + 1:], tail)]
    return LU(rows, perm, max_entry)


def solve(A, b, rank_tol=None):
    return lu_factor(A, rank_tol).solve(b)


def norm1(A):
    n = len(A)
    return max(sum(abs(A[i][j]) for i in range(n)) for j in range(n))


def condition_estimate(A, lu=None, iterations=5):
    """Hager's 1-norm condition estimate ||A||_1 * est(||A^-1||_1)."""
    lu = lu or lu_factor(A)
    n = len(A)
    x = [mpf(1) / n] * n
    est = mpf(0)
    for _ in range(iterations):
        y = lu.solve(x)
        new_est = sum(abs(v) for v in y)
        xi = [mpf(1) if v >= 0 else mpf(-1) for v in y]
        z = lu.solve_transpose(xi)
        j = max(range(n), key=lambda i: abs(z[i]))
        if new_est <= est or abs(z[j]) <= sum(zi * xv for zi, xv in zip(z, x)):
            est = max(est, new_est)
            break
        est = new_est
        x = [mpf(0)] * n
        x[j] = mpf(1)
    return norm1(A) * est


def nullspace_vector(A, pivot_tol=None):
    """One null vector of an m x (m+1) (or wider) matrix via full-pivot elimination.

    Returns (vector, nullity). The free column chosen last by full pivoting is
    set to 1; with nullity > 1 the remaining free columns are set to 0.
    """
    m = len(A)
    ncol = len(A[0])
    rows = [list(r) for r in A]
    cols = list(range(ncol))
    max_entry = max((abs(x) for r in rows for x in r), default=mpf(0))
    if pivot_tol is None:
        pivot_tol = mpf(10) ** (-int(0.8 * mp.dps))
    threshold = pivot_tol * max_entry
    rank = 0
    for k in range(min(m, ncol)):
        best, bi, bj = mpf(0), -1, -1
        for i in range(k, m):
            r = rows[i]
            for j in range(k, ncol):
                v = abs(r[j])
                if v > best:
                    best, bi, bj = v, i, j
        if not best > threshold:
            break
        rows[k], rows[bi] = rows[bi], rows[k]
        for r in rows:
            r[k], r[bj] = r[bj], r[k]
        cols[k], cols[bj] = cols[bj], cols[k]
        rk = rows[k]
        pivot = rk[k]
        for i in range(k + 1, m):
            ri = rows[i]
            l = ri[k] / pivot
            if l:
                ri[k:] = [a - l * b for a, b in zip(ri[k:], rk[k:])]
        rank += 1
    nullity = ncol - rank
    # free variable: first non-pivot column set to 1
    y = [mpf(0)] * ncol
    y[rank] = mpf(1)
    for i in range(rank - 1, -1, -1):
        r = rows[i]
        acc = mpf(0)
        for j in range(i + 1, ncol):
            if y[j]:
                acc += r[j] * y[j]
        y[i] = -acc / r[i]
    x = [mpf(0)] * ncol
    for k, c in enumerate(cols):
        x[c] = y[k]
    return x, nullity
