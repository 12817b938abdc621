"""Potential theory on real segments: Green functions, potentials, Robin measures, balayage.

Measures on a segment ``[alpha, beta]`` are stored as densities against the
segment's arcsine (Robin) probability measure, sampled at first-kind Chebyshev
nodes. Endpoint singularities of equilibrium-type densities then disappear from
the representation, and Gauss-Chebyshev quadrature and the Chebyshev expansion
of the logarithmic kernel converge spectrally. Arithmetic is float64 numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.fft import dct

from .errors import ParameterDomainError

LOG2 = np.log(2.0)


def chebyshev_nodes(n):
    """First-kind Chebyshev nodes cos((j + 1/2) pi / n) on [-1, 1], descending."""
    return np.cos((np.arange(n) + 0.5) * np.pi / n)


def _segment(seg):
    alpha, beta = float(seg[0]), float(seg[1])
    if not beta > alpha:
        raise ParameterDomainError(f"degenerate segment [{alpha}, {beta}]")
    return alpha, beta


def to_unit(z, seg):
    alpha, beta = seg
    return (2 * np.asarray(z) - alpha - beta) / (beta - alpha)


def from_unit(u, seg):
    alpha, beta = seg
    return 0.5 * (alpha + beta) + 0.5 * (beta - alpha) * np.asarray(u)


def inverse_joukowski(u):
    """u + (u^2 - 1)^(1/2) with |.| >= 1, the exterior map of [-1, 1]; vectorized."""
    u = np.asarray(u, dtype=complex)
    u = np.where(u.imag == 0, u.real + 0j, u)  # avoid the -0.0 side of the cut
    return u + np.sqrt(u - 1) * np.sqrt(u + 1)


def _inv_phi(z, seg):
    return 1.0 / inverse_joukowski(to_unit(z, seg))


def _on_segment(z, seg, tol=1e-14):
    z = np.asarray(z, dtype=complex)
    alpha, beta = seg
    scale = max(1.0, abs(alpha), abs(beta))
    return (np.abs(z.imag) <= tol * scale) & (z.real >= alpha - tol * scale) & (z.real <= beta + tol * scale)


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True, eq=False)
class SegmentMeasure:
    """Positive measure h(x) d tau_[alpha,beta](x) with h sampled at Chebyshev nodes."""

    segment: tuple
    density_values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "segment", _segment(self.segment))
        vals = np.asarray(self.density_values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "density_values", vals)

    @property
    def n(self):
        return len(self.density_values)

    @cached_property
    def unit_nodes(self):
        return chebyshev_nodes(self.n)

    @cached_property
    def density_nodes(self):
        return from_unit(self.unit_nodes, self.segment)

    @property
    def mass(self):
        return float(np.mean(self.density_values))

    @cached_property
    def coefficients(self):
        """Chebyshev coefficients a_k of h on the unit segment."""
        a = dct(self.density_values, type=2) / self.n
        a[0] /= 2
        return a

    def quadrature(self):
        return self.density_nodes, self.density_values / self.n

    def reference_density(self, x):
        """h(x): density against the arcsine probability measure of the segment."""
        return cheb.chebval(to_unit(np.asarray(x, dtype=float), self.segment), self.coefficients)

    def density(self, x):
        """Lebesgue density h(x) / (pi sqrt((x - alpha)(beta - x)))."""
        x = np.asarray(x, dtype=float)
        alpha, beta = self.segment
        return self.reference_density(x) / (np.pi * np.sqrt((x - alpha) * (beta - x)))

    def resample(self, n):
        if n == self.n:
            return self
        return SegmentMeasure(self.segment, cheb.chebval(chebyshev_nodes(n), self.coefficients))

    def scaled(self, s):
        return SegmentMeasure(self.segment, s * self.density_values)

    def __add__(self, other):
        if other.segment != self.segment:
            raise ParameterDomainError("cannot add measures on different segments")
        n = max(self.n, other.n)
        return SegmentMeasure(self.segment, self.resample(n).density_values + other.resample(n).density_values)


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finite sum of point masses (zero-counting measures, point charges)."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", np.atleast_1d(np.asarray(self.points, dtype=complex)))
        object.__setattr__(self, "weights", np.atleast_1d(np.asarray(self.weights, dtype=float)))

    @property
    def mass(self):
        return float(np.sum(self.weights))

    def quadrature(self):
        return self.points, self.weights


def point_mass(x, mass=1.0):
    return DiscreteMeasure([x], [mass])


def mixture(weights, measures, n=None):
    """sum_i w_i mu_i for measures on a common segment."""
    n = n or max(m.n for m in measures)
    seg = measures[0].segment
    vals = sum(w * m.resample(n).density_values for w, m in zip(weights, measures))
    return SegmentMeasure(seg, vals)


# ---------------------------------------------------------------------------
# Green functions and potentials


def green_segment(z, w, segment):
    """Green function g_S(z, w) of the complement of the segment S (w may be np.inf).

    Zero on S (boundary values are allowed for z); the pole w must lie off S.
    """
    seg = _segment(segment)
    z = np.asarray(z, dtype=complex)
    vz = _inv_phi(z, seg)
    if w is None or (np.isscalar(w) and np.isinf(w)):
        return -np.log(np.abs(vz))
    if np.any(_on_segment(w, seg)):
        raise ParameterDomainError("pole of the Green function lies on the segment")
    vw = _inv_phi(np.asarray(w, dtype=complex), seg)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(1 - np.conj(vw) * vz)) - np.log(np.abs(vz - vw))


def green_regular_part(z, t, segment):
    """h_S(z, t) = g_S(t, z) + log|z - t|, smooth for t off S (including z = t)."""
    seg = _segment(segment)
    alpha, beta = seg
    vz = _inv_phi(z, seg)
    vt = _inv_phi(t, seg)
    return (
        np.log(np.abs(1 - np.conj(vt) * vz))
        + np.log(np.abs(1 - vz * vt))
        - np.log(np.abs(vz))
        - np.log(np.abs(vt))
        - np.log(4.0 / (beta - alpha))
    )


def _log_kernel_matrix(u, n):
    """Row i: integrals of log(1/|u_i - t|) T_k(t) d tau(t) over [-1, 1], k < n."""
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    v = 1.0 / inverse_joukowski(u)
    k = np.arange(1, n)
    out = np.empty((len(u), n))
    out[:, 0] = LOG2 + np.log(np.abs(v))
    if n > 1:
        with np.errstate(under="ignore"):
            powers = np.cumprod(np.repeat(v[:, None], n - 1, axis=1), axis=1)
        out[:, 1:] = powers.real / k
    return out


def log_potential(mu, z):
    """V^mu(z) = integral of log(1/|z - t|) d mu(t); vectorized in z."""
    z = np.asarray(z, dtype=complex)
    if isinstance(mu, DiscreteMeasure):
        pts, w = mu.quadrature()
        with np.errstate(divide="ignore"):
            return -np.log(np.abs(z[..., None] - pts)) @ w
    alpha, beta = mu.segment
    shape = z.shape
    K = _log_kernel_matrix(to_unit(z.ravel(), mu.segment), mu.n)
    vals = K @ mu.coefficients - mu.coefficients[0] * np.log((beta - alpha) / 2)
    return vals.reshape(shape)


def _check_disjoint(mu, seg):
    if isinstance(mu, SegmentMeasure):
        a, b = mu.segment
        if not (b < seg[0] or a > seg[1]):
            raise ParameterDomainError(f"support {mu.segment} meets the segment {seg}")
    elif np.any(_on_segment(mu.points, seg)):
        raise ParameterDomainError("a point mass lies on the segment")


def green_potential(mu, z, pole_segment):
    """G^mu_S(z) = integral of g_S(t, z) d mu(t); z may be np.inf.

    Evaluated as V^mu(z) plus quadrature of the smooth part g_S + log|z - t|, so
    points z on or near supp(mu) are handled without loss.
    """
    seg = _segment(pole_segment)
    _check_disjoint(mu, seg)
    pts, w = mu.quadrature()
    if np.isscalar(z) and np.isinf(z):
        return float(np.sum(w * green_segment(pts, np.inf, seg)))
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    zf = z.ravel()
    if isinstance(mu, DiscreteMeasure):
        vals = np.array([np.sum(w * green_segment(pts, zi, seg)) for zi in zf])
    else:
        H = green_regular_part(zf[:, None], pts[None, :], seg)
        vals = log_potential(mu, zf) + H @ w
    vals = np.where(_on_segment(zf, seg), 0.0, vals)
    return vals.reshape(shape)


def robin_measure(segment, n=64):
    """Arcsine (Robin) probability measure of a segment and its Robin constant."""
    seg = _segment(segment)
    gamma = -np.log((seg[1] - seg[0]) / 4)
    return SegmentMeasure(seg, np.ones(n)), gamma


def harmonic_measure_density(zeta, x, segment):
    """Density of harmonic measure at zeta for the segment complement, against d tau.

    Pulled back from the exterior Poisson kernel of the unit disk through phi.
    """
    seg = _segment(segment)
    W = inverse_joukowski(to_unit(np.asarray(zeta, dtype=complex), seg))
    s = np.arccos(np.clip(to_unit(np.asarray(x, dtype=float), seg), -1, 1))
    e = np.exp(1j * s)
    return 0.5 * (np.abs(W) ** 2 - 1) * (1 / np.abs(W - e) ** 2 + 1 / np.abs(W - np.conj(e)) ** 2)


def balayage_onto_segment(mu, target_segment, n=None):
    """Balayage of mu (supported off the target) onto the target segment.

    The result satisfies V^beta(mu) = V^mu + const on the target and keeps the mass.
    A measure already on the target is returned unchanged (resampled to n).
    """
    seg = _segment(target_segment)
    if isinstance(mu, SegmentMeasure) and mu.segment == seg:
        return mu.resample(n or mu.n)
    _check_disjoint(mu, seg)
    n = n or (mu.n if isinstance(mu, SegmentMeasure) else 128)
    x = from_unit(chebyshev_nodes(n), seg)
    pts, w = mu.quadrature()
    P = harmonic_measure_density(pts[:, None], x[None, :], seg)
    return SegmentMeasure(seg, w @ P)


def measure_cdf(mu, x):
    """mu([alpha, x]) for a segment measure, from the Chebyshev expansion in closed form."""
    x = np.asarray(x, dtype=float)
    s = np.arccos(np.clip(to_unit(x, mu.segment), -1, 1))
    a = mu.coefficients
    k = np.arange(1, len(a))
    tail = np.sin(np.multiply.outer(s, k)) @ (a[1:] / k) if len(a) > 1 else 0.0
    return (a[0] * (np.pi - s) - tail) / np.pi
