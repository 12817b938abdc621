"""Orthogonality relations of the type II denominators, checked independently.

The measure in f^p = const + Cauchy transform has density -Im f^p(x + i0)/pi on E.
For p = 1 it is sigma; for p = 2 it is (1/sqrt(AB) + sigma_2^)(x) dsigma(x), and
for p = 3 the three-term weight of the triple relations. A type II denominator Q
satisfies, for k below the index,

    integral over E of Q(x) x^k (-Im f^p(x + i0)/pi) dx = 0,

and equivalently the contour moments of R_p = Q f^p - P_p vanish on any curve
separating E from F. Both forms are evaluated here without the Laurent series:
boundary values and contour values of f come from the closed form.
"""

from __future__ import annotations

import math

import mpmath
from mpmath import mp, mpf, mpc

from .errors import KindMismatchError
from .model import _f_from_w


def _pow2_at_least(x):
    return 1 << max(int(math.ceil(x)) - 1, 1).bit_length()


def _nested_levels(node_values, count, M):
    """Trapezoid sums over M and 2M nodes from values at the 2M nodes (nested rule)."""
    fine = [mpf(0)] * count if not isinstance(node_values[0][0], mpc) else [mpc(0)] * count
    coarse = list(fine)
    absolute = [mpf(0)] * count
    for j, (v0, step) in enumerate(node_values):
        v = v0
        for k in range(count):
            fine[k] += v
            absolute[k] += abs(v)
            if j % 2 == 0:
                coarse[k] += v
            v *= step
    return [c / M for c in coarse], [f / (2 * M) for f in fine], [a / (2 * M) for a in absolute]


def real_line_moments(model, Q, powers, count):
    """Relative residuals |int Q x^k w_p| / int |Q| |x|^k w_p for k < count, per power.

    x = cos t turns each integral into a smooth even periodic one, so the
    trapezoid rule converges like A^(-2M). The rule is run with M and 2M nodes;
    the difference is returned as the quadrature error estimate.
    """
    digits = model.digits
    with mp.workdps(digits + 20):
        deg = max(Q.degree, 0) + count
        M = _pow2_at_least(digits * math.log(10) / (2 * math.log(float(model.A))) + 2 * deg + 32)
        nodes = []
        for j in range(1, 2 * M):  # the weight vanishes at t = 0 and t = pi
            t = mp.pi * j / (2 * M)
            x, st = mpmath.cos(t), mpmath.sin(t)
            nodes.append((x, Q(x) * st / mp.pi, _f_from_w(model, mpc(x, -st))))
        out = {}
        for p in powers:
            vals = [(-(f ** p).imag * q, x) for x, q, f in nodes]
            coarse, fine, absolute = _nested_levels(vals, count, M)
            out[p] = [(abs(b) / a, abs(c - b) / a) for c, b, a in zip(coarse, fine, absolute)]
    with mp.workdps(digits):
        return {p: [(+r, +e) for r, e in v] for p, v in out.items()}


def contour_moments(model, Q, numerators, count):
    """Relative residuals of (1/2 pi i) contour integral of R_p(z) z^k dz, k < count.

    R_p = Q f^p - P_p with P_p = numerators[p - 1]. The contour is the ellipse
    |phi(z)| = sqrt(A), which separates E from F; the normalization is the
    integral of |R_p z^k| |dz|.
    """
    digits = model.digits
    with mp.workdps(digits + 20):
        rho = mpmath.sqrt(model.A)
        deg = max([Q.degree, 0] + [P.degree for P in numerators]) + count
        # truncation target 10^(-2 digits/3): far below any residual threshold in use
        target = 2 * digits / 3 * math.log(10)
        M = _pow2_at_least(target / math.log(float(rho)) + 2 * deg * math.log(float(rho) + 1) + 32)
        nodes = []
        for j in range(2 * M):
            phi = rho * mpmath.expjpi(mpf(j) / M)
            z = (phi + 1 / phi) / 2
            dz = (1 - 1 / (phi * phi)) / 2 * phi  # dz/dtheta divided by i
            nodes.append((z, dz, Q(z), _f_from_w(model, 1 / phi)))
        out = {}
        for p, P in enumerate(numerators, start=1):
            vals = [((q * f ** p - P(z)) * dz, z) for z, dz, q, f in nodes]
            coarse, fine, absolute = _nested_levels(vals, count, M)
            out[p] = [(abs(b) / a, abs(c - b) / a) for c, b, a in zip(coarse, fine, absolute)]
    with mp.workdps(digits):
        return {p: [(+r, +e) for r, e in v] for p, v in out.items()}


RELATIONS = {
    "type2_pair": ("weight_f", "weight_f2"),
    "type2_triple": ("weight_f", "weight_f2", "weight_f3"),
}


def orthogonality_report(model, result):
    """Worst relative residual for each relation of a type II result.

    Keys: ``real:<name>`` for the weighted integrals on E and ``contour:R<p>`` for
    the contour moments. Each value is (residual, quadrature error estimate).
    """
    if result.kind not in RELATIONS:
        raise KindMismatchError(f"no orthogonality relations for kind {result.kind}")
    Q = result.denominator
    count = result.index
    report = {}
    if count == 0:
        return report
    names = RELATIONS[result.kind]
    powers = range(1, len(names) + 1)
    real = real_line_moments(model, Q, powers, count)
    contour = contour_moments(model, Q, result.numerators, count)
    for p, name in zip(powers, names):
        report[f"real:{name}"] = max(real[p], key=lambda r: r[0])
        report[f"contour:R{p}"] = max(contour[p], key=lambda r: r[0])
    return report
