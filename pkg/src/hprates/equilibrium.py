"""Mixed Green-logarithmic equilibrium problems on E = [-1, 1] and F = [a, b].

On E:  theta V^lam(x) + G^lam_F(x) = c_E                      (lam on E)
On F:  theta V^lam(y) + G^lam_E(y) + theta g_E(y, inf) = c_F  (lam on F)

Both are solved by Chebyshev collocation. The unknowns are the density values
against the arcsine measure of the segment at n first-kind nodes plus the
constant, closed by the mass-one row. Full support is assumed, which is the
case for these fields; a nonpositive density value is reported as an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.fft import dct
from scipy.optimize import minimize

from .errors import (
    IdentityViolationError,
    NegativeDensityError,
    NonConvergenceError,
    ParameterDomainError,
)
from .potential import (
    LOG2,
    SegmentMeasure,
    _on_segment,
    balayage_onto_segment,
    chebyshev_nodes,
    from_unit,
    green_potential,
    green_regular_part,
    green_segment,
    log_potential,
    measure_cdf,
    robin_measure,
)

MIN_NODES = 32
SOLVER_TOL = 1e-8
IDENTITY_TOL = 1e-7
GAMMA_E = LOG2


@dataclass(frozen=True, eq=False)
class PartialSolution:
    """Equilibrium measure on one segment with its constant and probe residual."""

    measure: SegmentMeasure
    constant: float
    residual: float
    theta: float


@dataclass(frozen=True, eq=False)
class EquilibriumSolution:
    theta: float
    lambda_E: SegmentMeasure
    lambda_F: SegmentMeasure
    c_E: float
    c_F: float
    residual_E: float
    residual_F: float
    identity_residuals: dict = field(default_factory=dict)

    @property
    def segment_E(self):
        return self.lambda_E.segment

    @property
    def segment_F(self):
        return self.lambda_F.segment


def model_segments(model):
    """(E, F) as float tuples."""
    return (-1.0, 1.0), (float(model.a), float(model.b))


def _analysis_matrix(n):
    """Matrix taking node values to Chebyshev coefficients."""
    C = dct(np.eye(n), type=2, axis=0) / n
    C[0] /= 2
    return C


def _log_rows(x, seg, n):
    """Rows mapping Chebyshev coefficients to V^mu at real points x on the segment."""
    alpha, beta = seg
    u = np.clip((2 * x - alpha - beta) / (beta - alpha), -1, 1)
    k = np.arange(1, n)
    T = np.cos(np.multiply.outer(np.arccos(u), k))
    rows = np.empty((len(x), n))
    rows[:, 0] = LOG2 - np.log((beta - alpha) / 2)
    rows[:, 1:] = T / k
    return rows


def _operator(x, seg, kappa, rho, green_seg, n):
    """Matrix of  h -> kappa V^mu(x) + rho G^mu_S(x)  for mu = h d tau_seg."""
    t = from_unit(chebyshev_nodes(n), seg)
    M = (kappa + rho) * (_log_rows(x, seg, n) @ _analysis_matrix(n))
    if rho:
        M += rho * green_regular_part(x[:, None], t[None, :], green_seg) / n
    return M


def probe_points(seg, n):
    """4n points strictly between and around the collocation nodes (midpoints in angle)."""
    s = (np.arange(4 * n) + 1.0) * np.pi / (4 * n + 1)
    return from_unit(np.cos(s), seg)


def solve_field_problem(seg, n, kappa=1.0, rho=0.0, green_seg=None, field=None, check=True):
    """Solve kappa V^lam + rho G^lam_S + field = c on seg for a probability measure lam.

    ``field`` is a vectorized callable on real points of the segment. Returns a
    PartialSolution with the sup residual measured at 4n probe points.
    """
    if n < MIN_NODES:
        raise ParameterDomainError(f"node_count must be >= {MIN_NODES}, got {n}")
    if kappa + rho <= 0:
        raise ParameterDomainError("the logarithmic part of the kernel must be positive")
    x = from_unit(chebyshev_nodes(n), seg)
    Q = field(x) if field is not None else np.zeros(n)
    S = np.zeros((n + 1, n + 1))
    S[:n, :n] = _operator(x, seg, kappa, rho, green_seg, n)
    S[:n, n] = -1.0
    S[n, :n] = 1.0 / n
    rhs = np.concatenate([-Q, [1.0]])
    sol = np.linalg.solve(S, rhs)
    h, c = sol[:n], float(sol[n])
    mu = SegmentMeasure(seg, h)
    p = probe_points(seg, n)
    Qp = field(p) if field is not None else 0.0
    resid = float(np.max(np.abs(_operator(p, seg, kappa, rho, green_seg, n) @ h + Qp - c)))
    if check:
        if np.any(h <= 0):
            raise NegativeDensityError(f"density minimum {h.min():.3e} <= 0: full-support assumption failed")
        if not resid < SOLVER_TOL:
            raise NonConvergenceError(f"equilibrium residual {resid:.3e} >= {SOLVER_TOL:g} at n={n}")
    return PartialSolution(mu, c, resid, float(kappa))


def _theta(theta):
    theta = float(theta)
    if not theta >= 0:
        raise ParameterDomainError(f"theta must be >= 0, got {theta}")
    return theta


def solve_lambda_E(model, theta, node_count=256):
    """lam_E(theta): theta V + G_F = c_E on E."""
    theta = _theta(theta)
    E, F = model_segments(model)
    return solve_field_problem(E, node_count, kappa=theta, rho=1.0, green_seg=F)


def solve_lambda_F(model, theta, node_count=256):
    """lam_F(theta): theta V + G_E + theta g_E(., inf) = c_F on F."""
    theta = _theta(theta)
    E, F = model_segments(model)

    def field(y):
        return theta * green_segment(y, np.inf, E)

    return solve_field_problem(F, node_count, kappa=theta, rho=1.0, green_seg=E, field=field)


def sample_points(model, count=20):
    """Deterministic off-segment sample points in the plane, away from E and F."""
    E, F = model_segments(model)
    rng = np.random.default_rng(20240601)
    out = []
    while len(out) < count:
        z = complex(rng.uniform(-3, 4), rng.uniform(-2.5, 2.5))
        if abs(z.imag) > 0.1 or (z.real > 1.1 and not F[0] - 0.1 < z.real < F[1] + 0.1):
            out.append(z)
    return np.array(out)


def identity_residuals(theta, lam_E, lam_F, c_E, c_F, z):
    """Worst residuals and locations of the two potential identities and the constant relations."""
    E, F = lam_E.segment, lam_F.segment
    gE = green_segment(z, np.inf, E)
    GF_E = green_potential(lam_E, z, F)
    GE_F = green_potential(lam_F, z, E)
    r1 = theta * log_potential(lam_F, z) + GE_F + theta * gE + (1 + theta) * GF_E - c_F
    r2 = theta * log_potential(lam_E, z) + GF_E + theta * gE + GE_F - c_E
    GF_inf = green_potential(lam_E, np.inf, F)
    GE_inf = green_potential(lam_F, np.inf, E)
    r3 = max(
        abs(c_E - (GF_inf + theta * GAMMA_E + GE_inf)),
        abs(c_F - (c_E + theta * GF_inf)),
    )
    out = {}
    for name, r in (("potential_F", r1), ("potential_E", r2)):
        i = int(np.argmax(np.abs(r)))
        out[name] = (float(abs(r[i])), complex(z[i]))
    out["constants"] = (float(r3), None)
    return out


def solve_equilibrium(model, theta, node_count=256, check_identities=True, points=None):
    """Both equilibrium measures for theta, with the identities between them verified."""
    e = solve_lambda_E(model, theta, node_count)
    f = solve_lambda_F(model, theta, node_count)
    z = sample_points(model) if points is None else np.asarray(points, dtype=complex)
    ids = identity_residuals(e.theta, e.measure, f.measure, e.constant, f.constant, z)
    if check_identities:
        for name, (r, loc) in ids.items():
            if not r < IDENTITY_TOL:
                raise IdentityViolationError(name, r, loc)
    return EquilibriumSolution(
        theta=e.theta,
        lambda_E=e.measure,
        lambda_F=f.measure,
        c_E=e.constant,
        c_F=f.constant,
        residual_E=e.residual,
        residual_F=f.residual,
        identity_residuals=ids,
    )


@lru_cache(maxsize=32)
def _cached_solution(key, theta, node_count):
    from .model import make_model

    A, B, digits = key
    return solve_equilibrium(make_model(A, B, digits), theta, node_count)


def cached_equilibrium(model, theta, node_count=256):
    """Memoized solve_equilibrium; solutions are immutable so sharing is safe."""
    return _cached_solution(model.key(), float(theta), int(node_count))


# ---------------------------------------------------------------------------
# predictions


def _check_in_D(z, E=(-1.0, 1.0)):
    z = np.asarray(z, dtype=complex)
    if np.any(_on_segment(z, E)):
        raise ParameterDomainError("z lies on E")
    return z


def predicted_log_rate(solutions, kind, z):
    """log delta_kind(z): -g_E for pade, minus G^{lam_F(3)}_E/3 for hp2, G^{lam_F(1)}_E/2 for hp3."""
    z = _check_in_D(z)
    E = (-1.0, 1.0)
    g = green_segment(z, np.inf, E)
    if kind == "pade":
        return -g
    if kind == "hp2":
        return -green_potential(_pick(solutions, 3.0).lambda_F, z, E) / 3 - g
    if kind == "hp3":
        return -green_potential(_pick(solutions, 1.0).lambda_F, z, E) / 2 - g
    raise ParameterDomainError(f"no predicted rate for kind {kind!r}")


def predicted_rate(solutions, kind, z):
    """delta_1, delta_2 or delta_3 at z, in (0, 1) for z off E."""
    return np.exp(predicted_log_rate(solutions, kind, z))


def _pick(solutions, theta):
    if isinstance(solutions, EquilibriumSolution):
        solutions = [solutions]
    for s in solutions:
        if abs(s.theta - theta) < 1e-12:
            return s
    raise ParameterDomainError(f"no equilibrium solution for theta={theta}")


def monotony_gap(solutions, theta1, theta2, z):
    """(1 + 1/t1) G^{lam_F(t1)}_E(z) - (1 + 1/t2) G^{lam_F(t2)}_E(z), for 1 <= t1 < t2 <= 3."""
    t1, t2 = float(theta1), float(theta2)
    if not (1 <= t1 < t2 <= 3):
        raise ParameterDomainError(f"need 1 <= theta1 < theta2 <= 3, got ({t1}, {t2})")
    z = _check_in_D(z)
    E = (-1.0, 1.0)
    G1 = green_potential(_pick(solutions, t1).lambda_F, z, E)
    G2 = green_potential(_pick(solutions, t2).lambda_F, z, E)
    return (1 + 1 / t1) * G1 - (1 + 1 / t2) * G2


# ---------------------------------------------------------------------------
# cross-checks


def mixture_field_solution(model, t, mu=None, node_count=256):
    """Equilibrium on E in the field -t V^mu (default mu = tau_F), by collocation."""
    E, F = model_segments(model)
    if mu is None:
        mu, _ = robin_measure(F, node_count)
    return solve_field_problem(E, node_count, field=lambda x: -t * log_potential(mu, x))


def mixture_prediction(model, t, mu=None, node_count=256):
    """(1 - t) tau_E + t beta_E(mu), the closed-form answer for the field -t V^mu."""
    E, F = model_segments(model)
    if mu is None:
        mu, _ = robin_measure(F, node_count)
    tau, _ = robin_measure(E, node_count)
    bal = balayage_onto_segment(mu, E, n=node_count)
    return SegmentMeasure(E, (1 - t) * tau.density_values + t * bal.density_values)


def _cell_log_integral(a1, b1, a2, b2):
    """Integral of log|x - y| over [a1, b1] x [a2, b2]."""

    def F2(u):
        au = np.abs(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = 0.5 * u * u * np.log(au) - 0.75 * u * u
        return np.where(au == 0, 0.0, v)

    return F2(b1 - a2) - F2(a1 - a2) - F2(b1 - b2) + F2(a1 - b2)


def _angle_cell_log_kernel(lo, hi, gx, gw):
    """Cell-pair averages of log|cos s - cos s'| for cells [lo_i, hi_i] in angle.

    Uses log|cos s - cos s'| = log 2 + log|sin((s+s')/2)| + log|sin((s-s')/2)|.
    The log|s - s'|, log(s + s') and log(2 pi - s - s') singularities are
    integrated exactly; what remains is smooth and goes to Gauss-Legendre.
    """
    w = hi - lo
    area = np.outer(w, w)
    L, H = lo[:, None], hi[:, None]
    Lj, Hj = lo[None, :], hi[None, :]
    exact = (
        _cell_log_integral(L, H, Lj, Hj)
        + _cell_log_integral(L, H, -Hj, -Lj)
        + _cell_log_integral(2 * np.pi - H, 2 * np.pi - L, Lj, Hj)
    ) / area
    s = (0.5 * (lo + hi))[:, None] + 0.5 * w[:, None] * gx[None, :]
    a = s.reshape(-1)
    u = a[:, None] - a[None, :]
    v = a[:, None] + a[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        sm = np.where(u == 0, -LOG2, np.log(np.abs(np.sin(u / 2))) - np.log(np.abs(u)))
        sp = np.log(np.sin(v / 2)) - np.log(v) - np.log(2 * np.pi - v)
    W = np.repeat(0.5 * gw[None, :], len(lo), axis=0).reshape(-1)
    smooth = (W[:, None] * (sm + sp) * W[None, :]).reshape(len(lo), len(gx), len(lo), len(gx)).sum(axis=(1, 3))
    return LOG2 + exact + smooth, s


def energy_minimizer(model, theta, cells=400):
    """Minimize theta J(mu) + I_F(mu) over probability measures on E, cell by cell.

    With x = cos s, each cell is an interval in s carrying a mass uniform in s,
    i.e. piecewise-constant density against the arcsine measure. Log interactions
    are integrated exactly up to a smooth remainder; the smooth part of the Green
    kernel uses 4-point Gauss-Legendre per cell. Returns (angle edges, masses).
    The stationary point of the equality-constrained quadratic is the minimizer
    when all masses come out positive; otherwise a bound-constrained solve runs.
    """
    E, F = model_segments(model)
    edges = np.linspace(0.0, np.pi, cells + 1)
    lo, hi = edges[:-1], edges[1:]
    gx, gw = np.polynomial.legendre.leggauss(4)
    logk, s = _angle_cell_log_kernel(lo, hi, gx, gw)
    x = np.cos(s).reshape(-1)
    W = np.repeat(0.5 * gw[None, :], cells, axis=0).reshape(-1)
    H = green_regular_part(x[:, None], x[None, :], F)
    H = (W[:, None] * H * W[None, :]).reshape(cells, 4, cells, 4).sum(axis=(1, 3))
    K = -(theta + 1) * logk + H
    K = 0.5 * (K + K.T)
    S = np.zeros((cells + 1, cells + 1))
    S[:cells, :cells] = 2 * K
    S[:cells, cells] = -1.0
    S[cells, :cells] = 1.0
    sol = np.linalg.solve(S, np.concatenate([np.zeros(cells), [1.0]]))
    m = sol[:cells]
    if np.any(m <= 0):
        res = minimize(
            lambda v: v @ K @ v,
            np.full(cells, 1.0 / cells),
            jac=lambda v: 2 * K @ v,
            bounds=[(0, None)] * cells,
            constraints=[{"type": "eq", "fun": lambda v: v.sum() - 1}],
            method="SLSQP",
            options={"maxiter": 500, "ftol": 1e-15},
        )
        m = res.x
    return edges, m


def energy_oracle_difference(model, theta, node_count=256, cells=400):
    """Sup over cells of |cell-averaged arcsine density| differences: minimizer vs collocation."""
    lam = solve_lambda_E(model, theta, node_count).measure
    edges, m = energy_minimizer(model, theta, cells)
    x = np.cos(edges)
    ref = measure_cdf(lam, x[:-1]) - measure_cdf(lam, x[1:])
    return float(np.max(np.abs(m - ref)) * cells)
