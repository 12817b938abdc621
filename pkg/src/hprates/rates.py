"""Empirical convergence rates and zero distributions of the approximants.

Kinds: ``pade`` (diagonal [n/n], N = 2n + 1), ``hp2`` (type II for f, f^2,
N = 3m + 1) and ``hp3`` (type II for f, f^2, f^3, N = 4l + 1). The approximant
to f is P_1/Q in each case.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import mpmath
import numpy as np
from mpmath import mp, mpf

from . import hp_solver
from .equilibrium import cached_equilibrium, monotony_gap, predicted_log_rate
from .errors import (
    KindMismatchError,
    ParameterDomainError,
    PoleProximityError,
    SamplingResolutionError,
)
from .model import eval_f, laurent_coeffs_power, to_mpc
from .polynomial import real_roots_in_interval, poly_roots

RATE_KINDS = ("pade", "hp2", "hp3")
MIN_FIT_SAMPLES = 8

_SOLVER_KIND = {"pade": "pade", "hp2": "type2_pair", "hp3": "type2_triple"}
_cache = {}
_lock = threading.Lock()


def _check_kind(kind):
    if kind not in RATE_KINDS:
        raise ParameterDomainError(f"kind must be one of {RATE_KINDS}, got {kind!r}")


def n_of(kind, index):
    """N = 2n + 1, 3m + 1 or 4l + 1."""
    _check_kind(kind)
    return {"pade": 2, "hp2": 3, "hp3": 4}[kind] * index + 1


def approximant(model, kind, index):
    """Solved system for (kind, index), memoized per model; results are immutable."""
    _check_kind(kind)
    if index < 1:
        raise ParameterDomainError("index must be >= 1")
    key = (model.key(), kind, int(index))
    with _lock:
        hit = _cache.get(key)
    if hit is not None:
        return hit
    N = hp_solver.required_coefficients(_SOLVER_KIND[kind], index)
    with model.precision.workdps():
        if kind == "pade":
            res = hp_solver.pade(laurent_coeffs_power(model, N, 1), index)
        else:
            order = 2 if kind == "hp2" else 3
            series = [laurent_coeffs_power(model, N, p) for p in range(1, order + 1)]
            res = hp_solver.hp_type2(*series, order=order, m=index)
    with _lock:
        return _cache.setdefault(key, res)


def clear_approximant_cache():
    with _lock:
        _cache.clear()


def empirical_error(model, kind, index, z):
    """|f(z) - P_1(z)/Q(z)| at working precision.

    Raises PoleProximityError when |Q(z)| < 10^(-digits/2) sum |q_k| |z|^k.
    """
    res = approximant(model, kind, index)
    Q, P = res.denominator, res.numerators[0]
    with model.precision.workdps():
        z = to_mpc(z)
        q = Q(z)
        if abs(q) < mpf(10) ** (-(model.digits // 2)) * Q.abs_bound(z):
            raise PoleProximityError(f"{kind} index {index}: z={mpmath.nstr(z, 8)} is near a zero of Q")
        return +abs(eval_f(model, z) - P(z) / q)


@dataclass(frozen=True)
class RateReport:
    kind: str
    z: complex
    index_range: tuple
    fitted_slope: float
    predicted_slope: float
    relative_gap: float
    table: tuple  # (N, log_error) pairs
    skipped: tuple = field(default=())


def fit_slope(table):
    """Least-squares slope of log_error against N."""
    N = np.array([float(n) for n, _ in table])
    y = np.array([float(e) for _, e in table])
    return float(np.polyfit(N, y, 1)[0])


def predicted_slope(model, kind, z, node_count=256):
    """log delta_kind(z) from the equilibrium module (theta = 3 for hp2, 1 for hp3)."""
    _check_kind(kind)
    sols = []
    if kind == "hp2":
        sols = [cached_equilibrium(model, 3.0, node_count)]
    elif kind == "hp3":
        sols = [cached_equilibrium(model, 1.0, node_count)]
    return float(predicted_log_rate(sols, kind, complex(z)))


def rate_fit(model, kind, index_range, z, node_count=256):
    """Fit the slope of log|error| against N over the index range and compare to the theory."""
    _check_kind(kind)
    indices = list(index_range)
    if len(indices) < MIN_FIT_SAMPLES:
        raise ParameterDomainError(f"need at least {MIN_FIT_SAMPLES} indices, got {len(indices)}")
    table, skipped = [], []
    for k in indices:
        try:
            err = empirical_error(model, kind, k, z)
        except PoleProximityError as exc:
            skipped.append(str(exc))
            continue
        with model.precision.workdps():
            table.append((n_of(kind, k), float(mpmath.log(err))))
    if len(table) < MIN_FIT_SAMPLES:
        raise PoleProximityError(f"only {len(table)} usable indices after pole-proximity skips")
    fitted = fit_slope(table)
    pred = predicted_slope(model, kind, z, node_count)
    return RateReport(
        kind=kind,
        z=complex(z),
        index_range=(indices[0], indices[-1]),
        fitted_slope=fitted,
        predicted_slope=pred,
        relative_gap=abs(fitted - pred) / abs(pred),
        table=tuple(table),
        skipped=tuple(skipped),
    )


# ---------------------------------------------------------------------------
# zeros


def denominator_zeros(model, kind, index):
    """Zeros of the denominator, sorted. For hp2/hp3 these are located in (-1, 1) by sign
    changes; if fewer than deg Q are found there, all zeros are computed in the plane."""
    res = approximant(model, kind, index)
    Q = res.denominator
    with model.precision.workdps():
        roots = real_roots_in_interval(Q, -1, 1)
        if len(roots) == Q.degree:
            return roots, True
        zs = poly_roots(Q)
        return sorted(zs.roots, key=lambda r: (mpmath.re(r), mpmath.im(r))), False


def kolmogorov_distance(points, cdf):
    """sup |F_emp - F| for the normalized counting measure of the points and a reference CDF."""
    x = np.sort(np.asarray([float(mpmath.re(p)) for p in points]))
    n = len(x)
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(i / n - F)), np.max(np.abs((i - 1) / n - F))))


def zero_distribution_distance(model, kind, index, reference):
    """Kolmogorov distance between the zero-counting measure of Q (normalized by deg Q)
    and a probability measure on E given as a SegmentMeasure."""
    from .potential import measure_cdf

    zeros, _ = denominator_zeros(model, kind, index)
    return kolmogorov_distance(zeros, lambda x: measure_cdf(reference, x))


def remainder_sign_changes_on_F(model, kind, index, samples_per_index=64, end_levels=64):
    """Sign changes of R(y) = Q(y) f(y) - P_1(y) on [a, b].

    R is sampled on 64*index equispaced cells of F, endpoints included. Each cell
    is also bisected; a crossing seen only at half spacing in an interior cell
    is a SamplingResolutionError. The two end cells, where zeros pile up, are
    refined geometrically toward a and b (``end_levels`` halvings).
    """
    if kind not in ("hp2", "hp3"):
        raise KindMismatchError(f"sign changes on F are only claimed for hp2/hp3, not {kind!r}")
    res = approximant(model, kind, index)
    Q, P = res.denominator, res.numerators[0]
    K = samples_per_index * index

    def R(y):
        return Q(y) * eval_f(model, y).real - P(y)

    with model.precision.workdps():
        a, b = model.a, model.b
        h = (b - a) / (2 * K)
        vals = [R(a + h * j) for j in range(2 * K + 1)]
        inner = vals[2:-2]
        coarse = _sign_changes(inner[::2])
        fine = _sign_changes(inner)
        if fine > coarse:
            raise SamplingResolutionError(
                f"{fine - coarse} oscillations missed at {K} samples ({kind}, index {index})"
            )
        left = [vals[0]] + [R(a + 2 * h * mpf(2) ** -k) for k in range(end_levels, 0, -1)] + vals[2:3]
        right = vals[-3:-2] + [R(b - 2 * h * mpf(2) ** -k) for k in range(1, end_levels + 1)] + [vals[-1]]
    return _sign_changes(left) + fine + _sign_changes(right)


def _sign_changes(vals):
    signs = [v > 0 for v in vals if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


# ---------------------------------------------------------------------------
# predicted orderings


@dataclass(frozen=True)
class OrderingReport:
    points: int
    delta_violations: tuple
    gap_violations: tuple
    min_delta_gaps: tuple  # (min delta_1 - delta_2, min delta_2 - delta_3)
    min_monotony_gaps: dict
    argmin_monotony: dict


MONOTONY_PAIRS = ((1.0, 2.0), (1.0, 3.0), (2.0, 3.0))


def default_grid(model, count=100):
    """Points on confocal ellipses around E: 10 levels |phi| in [1.15, 4], 10 angles."""
    rhos = np.geomspace(1.15, 4.0, 10)
    thetas = (np.arange(10) + 0.25) * 2 * np.pi / 10
    pts = [0.5 * (r * np.exp(1j * t) + np.exp(-1j * t) / r) for r in rhos for t in thetas]
    return np.array(pts[:count])


def theorem_ordering_check(model, z_grid=None, node_count=256):
    """Verify delta_3 < delta_2 < delta_1 < 1 and the monotony gaps on a grid in D."""
    z = default_grid(model) if z_grid is None else np.asarray(z_grid, dtype=complex)
    sols = [cached_equilibrium(model, t, node_count) for t in (1.0, 2.0, 3.0)]
    d1 = np.exp(predicted_log_rate(sols, "pade", z))
    d2 = np.exp(predicted_log_rate(sols, "hp2", z))
    d3 = np.exp(predicted_log_rate(sols, "hp3", z))
    bad = tuple(complex(p) for p, ok in zip(z, (0 < d3) & (d3 < d2) & (d2 < d1) & (d1 < 1)) if not ok)
    gaps, where, gap_bad = {}, {}, []
    for t1, t2 in MONOTONY_PAIRS:
        g = monotony_gap(sols, t1, t2, z)
        i = int(np.argmin(g))
        gaps[(t1, t2)] = float(g[i])
        where[(t1, t2)] = complex(z[i])
        gap_bad += [((t1, t2), complex(p)) for p, v in zip(z, g) if not v > 0]
    return OrderingReport(
        points=len(z),
        delta_violations=bad,
        gap_violations=tuple(gap_bad),
        min_delta_gaps=(float(np.min(d1 - d2)), float(np.min(d2 - d3))),
        min_monotony_gaps=gaps,
        argmin_monotony=where,
    )


def matched_error_ordering(model, z_grid, N=121, min_distance=0.5):
    """At matched N, check err_hp3 < err_hp2 < err_pade at grid points with dist(z, E) >= min_distance.

    Returns (checked points, violations) where violations lists (z, errors).
    """
    if (N - 1) % 12:
        raise ParameterDomainError("N - 1 must be divisible by 2, 3 and 4")
    idx = {"pade": (N - 1) // 2, "hp2": (N - 1) // 3, "hp3": (N - 1) // 4}
    checked, bad = 0, []
    for z in np.asarray(z_grid, dtype=complex):
        if _distance_to_E(z) < min_distance:
            continue
        checked += 1
        e = {k: empirical_error(model, k, i, z) for k, i in idx.items()}
        if not (e["hp3"] < e["hp2"] < e["pade"]):
            bad.append((complex(z), {k: float(v) for k, v in e.items()}))
    return checked, bad


def _distance_to_E(z):
    x = min(max(z.real, -1.0), 1.0)
    return abs(z - x)
