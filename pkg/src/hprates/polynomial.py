"""Dense polynomials over mpmath reals and simultaneous root finding."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf, mpc

from .errors import NonConvergenceError, ParameterDomainError


@dataclass(frozen=True)
class Polynomial:
    """Coefficients in ascending degree; trailing zeros are stripped."""

    coefficients: tuple

    def __init__(self, coefficients):
        c = list(coefficients)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [mpf(0)]
        object.__setattr__(self, "coefficients", tuple(c))

    @property
    def degree(self):
        if len(self.coefficients) == 1 and self.coefficients[0] == 0:
            return -1
        return len(self.coefficients) - 1

    @property
    def leading(self):
        return self.coefficients[-1]

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def value_and_derivative(self, z):
        p = dp = 0
        for c in reversed(self.coefficients):
            dp = dp * z + p
            p = p * z + c
        return p, dp

    def abs_bound(self, z):
        """sum |c_k| |z|^k, the scale of rounding errors in evaluating P(z)."""
        r = abs(z)
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * r + abs(c)
        return acc

    def monic(self):
        lead = self.leading
        return Polynomial([c / lead for c in self.coefficients])

    def scale(self, s):
        return Polynomial([c * s for c in self.coefficients])

    def norm(self):
        """Max-norm of the coefficient vector."""
        return max(abs(c) for c in self.coefficients)

    def __add__(self, other):
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        return Polynomial([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        a, b = self.coefficients, other.coefficients
        out = [mpf(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Polynomial([mpf(1)])
        for _ in range(k):
            out = out * self
        return out

    @classmethod
    def from_roots(cls, roots):
        out = cls([mpf(1)])
        for r in roots:
            out = out * cls([-r, mpf(1)])
        return out


@dataclass(frozen=True)
class ZeroSet:
    """Roots of a polynomial; each carries weight 1/degree in the counting measure."""

    roots: tuple
    residuals: tuple

    @property
    def degree(self):
        return len(self.roots)

    def normalized_counting_measure(self):
        w = mpf(1) / len(self.roots)
        return [(r, w) for r in self.roots]

    def real_parts(self):
        return sorted(mpf(mpmath.re(r)) for r in self.roots)


def _backward_error(P, r):
    v = abs(P(r))
    return v / P.abs_bound(r) if v else mpf(0)


def _initial_circle(coeffs, n):
    # Fujiwara-type radius bound, start points slightly off the real axis
    lead = abs(coeffs[-1])
    rad = max(mpf(abs(coeffs[n - k]) / lead) ** (mpf(1) / k) for k in range(1, n + 1))
    rad = max(rad, mpf("1e-3"))
    return [rad * mpmath.expjpi(mpf(2 * k + mpf("0.5")) / n) for k in range(n)]


def poly_roots(P, initial=None, max_iter=None):
    """All roots of ``P`` by Aberth-Ehrlich simultaneous iteration at working precision.

    ``initial`` may supply starting points; real starts on a real polynomial keep
    the iteration in real arithmetic. Raises NonConvergenceError past ``max_iter``
    sweeps (default 500 + 2 * precision bits, since convergence is only linear at
    multiple roots).
    """
    if max_iter is None:
        max_iter = 500 + 2 * mp.prec
    n = P.degree
    if n < 1:
        raise ParameterDomainError("poly_roots needs degree >= 1")
    coeffs = P.coefficients
    tol = mp.eps * 64
    noise = mp.eps * 4 * (n + 1)
    z = list(initial) if initial is not None else _initial_circle(coeffs, n)
    if len(z) != n:
        raise ParameterDomainError(f"need {n} initial points, got {len(z)}")
    real_mode = all(isinstance(x, mpf) for x in z)
    z = [mpf(x) if real_mode else mpc(x) for x in z]
    converged = [False] * n
    for _ in range(max_iter):
        moved = False
        for i in range(n):
            if converged[i]:
                continue
            zi = z[i]
            p, dp = P.value_and_derivative(zi)
            if abs(p) <= noise * P.abs_bound(zi):
                # value is at rounding level: no further step is meaningful
                converged[i] = True
                continue
            ratio = p / dp if dp != 0 else mpf(1)
            s = 0
            for j in range(n):
                if j != i:
                    d = zi - z[j]
                    if d != 0:
                        s += 1 / d
            step = ratio / (1 - ratio * s)
            z[i] = zi - step
            if abs(step) <= tol * max(1, abs(z[i])):
                converged[i] = True
            else:
                moved = True
        if not moved:
            break
    else:
        raise NonConvergenceError(f"Aberth iteration did not converge in {max_iter} sweeps (degree {n})")
    # backward error: |P(r)| against sum |c_k| |r|^k, fair to roots of any modulus
    residuals = tuple(_backward_error(P, r) for r in z)
    bound = mpf(10) ** (-(mp.dps // 4))
    worst = max(residuals)
    if worst > bound:
        raise NonConvergenceError(f"root residual {mpmath.nstr(worst, 5)} above {mpmath.nstr(bound, 3)}")
    return ZeroSet(tuple(z), residuals)


def real_root_brackets(P, lo, hi, samples_per_degree=8):
    """Sign changes of a real polynomial on a cosine-spaced grid over (lo, hi).

    Returns a list of (left, right) brackets. Cosine spacing follows the
    endpoint clustering of zeros of orthogonal-type polynomials.
    """
    n = max(P.degree, 1)
    K = samples_per_degree * n + 1
    lo, hi = mpf(lo), mpf(hi)
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    xs = [mid - half * mpmath.cospi(mpf(k) / K) for k in range(1, K)]
    vals = [P(x) for x in xs]
    out = []
    for k in range(len(xs) - 1):
        if vals[k] == 0:
            out.append((xs[k], xs[k]))
        elif vals[k] * vals[k + 1] < 0:
            out.append((xs[k], xs[k + 1]))
    return out


def refine_bracket(P, left, right, bits=40):
    """Bisection down to about ``bits`` relative bits, then the midpoint."""
    if left == right:
        return left
    fl = P(left)
    for _ in range(bits):
        m = (left + right) / 2
        fm = P(m)
        if fm == 0:
            return m
        if (fm < 0) == (fl < 0):
            left, fl = m, fm
        else:
            right = m
    return (left + right) / 2


def real_roots_in_interval(P, lo, hi):
    """Real zeros of P inside (lo, hi), located by sign changes and polished by Aberth.

    Only a complete set (one sign change per degree) is polished jointly; otherwise the
    bisection estimates are returned as found.
    """
    brackets = real_root_brackets(P, lo, hi)
    guesses = [refine_bracket(P, a, b) for a, b in brackets]
    if len(guesses) == P.degree:
        return poly_roots(P, initial=guesses).real_parts()
    return sorted(guesses)
