"""The model function f(z) = [(A - 1/phi(z)) (B - 1/phi(z))]^(-1/2) and its expansion at infinity.

``phi(z) = z + (z^2 - 1)^(1/2)`` is the inverse Joukowski map of the exterior of
``E = [-1, 1]``. The function ``f`` is holomorphic off ``E``, real and positive on
``(1, inf)`` and tends to ``1/sqrt(AB)`` at infinity. Everything here runs in
mpmath at the digits carried by the model.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf, mpc

from .errors import BranchCutError, ParameterDomainError, PrecisionExhaustedError

MIN_DIGITS = 50


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision (decimal digits) for all arithmetic downstream."""

    decimal_digits: int = 200

    def __post_init__(self):
        if int(self.decimal_digits) != self.decimal_digits or self.decimal_digits < MIN_DIGITS:
            raise ParameterDomainError(
                f"decimal_digits must be an integer >= {MIN_DIGITS}, got {self.decimal_digits!r}"
            )

    def workdps(self, extra=0):
        return mp.workdps(self.decimal_digits + extra)


@dataclass(frozen=True)
class ModelParams:
    A: mpf
    B: mpf
    a: mpf
    b: mpf
    precision: PrecisionContext = field(default_factory=PrecisionContext)

    @property
    def digits(self):
        return self.precision.decimal_digits

    @property
    def segment_E(self):
        return (mpf(-1), mpf(1))

    @property
    def segment_F(self):
        return (self.a, self.b)

    def key(self):
        """Hashable identity used for caches and file names."""
        return (mp_to_str(self.A, 30), mp_to_str(self.B, 30), self.digits)


def mp_to_str(x, digits):
    """Decimal string for an mpf that round-trips at ``digits`` decimal digits."""
    # use the value's own mantissa: mpf(x) would round to the ambient precision
    raw = x._mpf_ if isinstance(x, mpf) else mpf(x)._mpf_
    return mpmath.libmp.to_str(raw, int(digits) + 3)


def _parse_real(value):
    if isinstance(value, str):
        return mpf(value.strip())
    if isinstance(value, float):
        # floats go through repr so "2.5" and 2.5 give the same model
        return mpf(repr(value))
    return mpf(value)


def make_model(A, B, digits=200):
    """Build the model for ``1 < A < B`` with ``a = (A + 1/A)/2`` and ``b = (B + 1/B)/2``.

    ``A`` and ``B`` may be decimal strings, ints, floats or mpf values.
    """
    precision = PrecisionContext(int(digits))
    with precision.workdps():
        A_ = _parse_real(A)
        B_ = _parse_real(B)
        if not A_ > 1:
            raise ParameterDomainError(f"need 1 < A, got A={A}")
        if not B_ > A_:
            raise ParameterDomainError(f"need A < B, got A={A}, B={B}")
        a = (A_ + 1 / A_) / 2
        b = (B_ + 1 / B_) / 2
    return ModelParams(A_, B_, a, b, precision)


def is_infinity(z):
    if isinstance(z, str):
        return z.strip().lower() in ("inf", "infinity", "oo")
    try:
        return mpmath.isinf(z)
    except (TypeError, ValueError):
        return False


def to_mpc(z):
    if isinstance(z, str):
        return mpc(complex(z.replace(" ", ""))) if "j" in z else mpc(mpf(z))
    if isinstance(z, (tuple, list)):
        return mpc(_parse_real(z[0]), _parse_real(z[1]))
    if isinstance(z, float):
        return mpc(mpf(repr(z)))
    return mpc(z)


def _check_off_E(z):
    tol = 16 * mp.eps
    if abs(z.imag) <= tol and abs(z.real) <= 1 + tol:
        raise BranchCutError(f"z={mpmath.nstr(z, 15)} lies on the cut [-1, 1]")


def _phi(z):
    return z + mpmath.sqrt(z - 1) * mpmath.sqrt(z + 1)


def eval_phi(model, z):
    """phi(z) = z + (z^2 - 1)^(1/2) on the branch with |phi| > 1 off [-1, 1]."""
    with model.precision.workdps():
        z = to_mpc(z)
        _check_off_E(z)
        return +_phi(z)


def _f_from_w(model, w):
    return 1 / (mpmath.sqrt(model.A - w) * mpmath.sqrt(model.B - w))


def eval_f(model, z, power=1):
    """Value of f(z)**power for z off [-1, 1]; ``z`` may be ``mpmath.inf``."""
    if power not in (1, 2, 3):
        raise ParameterDomainError(f"power must be 1, 2 or 3, got {power}")
    with model.precision.workdps():
        if is_infinity(z):
            return mpc(1 / mpmath.sqrt(model.A * model.B) ** power)
        z = to_mpc(z)
        _check_off_E(z)
        # each square root has a factor with positive real part, so no cut crosses D
        return +(_f_from_w(model, 1 / _phi(z)) ** power)


def sigma_density(model, x):
    """Density of the measure sigma in f = 1/sqrt(AB) + Cauchy transform of sigma.

    Uses the boundary value from the upper half plane: sigma'(x) = -Im f(x + i0)/pi.
    """
    with model.precision.workdps():
        x = mpf(x)
        if not -1 < x < 1:
            raise ParameterDomainError(f"sigma_density needs x in (-1, 1), got {x}")
        # 1/phi(x + i0) = x - i sqrt(1 - x^2)
        w = mpc(x, -mpmath.sqrt(1 - x * x))
        return +(-_f_from_w(model, w).imag / mp.pi)


# ---------------------------------------------------------------------------
# Laurent coefficients at infinity

CONTOUR_RADIUS = 2
_MAX_NODES = 2 ** 17
_cache = {}
_cache_lock = threading.Lock()


def _block_size(N):
    return max(64, 1 << (int(N) - 1).bit_length())


def _contour_coefficients(model, power, block, radius):
    """Trapezoidal rule on |z| = radius with node doubling.

    Returns (coefficients, error_estimate) at the model's digits. The rounding
    amplification radius**k is absorbed by guard digits.
    """
    digits = model.digits
    R = mpf(radius)
    guard = int(block * math.log10(float(radius))) + 20
    with mp.workdps(digits + guard):
        M = 1 << max(2 * block - 1, int(math.ceil(digits * math.log(10) / math.log(float(radius))))).bit_length()
        fvals = {}

        def level(M):
            half = M // 2
            fr, fi = [], []
            for j in range(half + 1):
                key = (j * (_MAX_NODES // M))
                v = fvals.get(key)
                if v is None:
                    z = R * mpmath.expjpi(mpf(2 * j) / M)
                    if j == 0:
                        z = mpc(R)
                    elif 2 * j == M:
                        z = mpc(-R)
                    v = _f_from_w(model, 1 / _phi(z)) ** power
                    fvals[key] = v
                fr.append(v.real)
                fi.append(v.imag)
            cos_t = [mpmath.cospi(mpf(2 * m) / M) for m in range(M)]
            sin_t = [mpmath.sinpi(mpf(2 * m) / M) for m in range(M)]
            out = []
            Rk = mpf(1)
            for k in range(block):
                idx = [(j * k) % M for j in range(1, half)]
                s = mpmath.fdot(zip(fr[1:half], [cos_t[i] for i in idx]))
                s -= mpmath.fdot(zip(fi[1:half], [sin_t[i] for i in idx]))
                total = fr[0] + (fr[half] if k % 2 == 0 else -fr[half]) + 2 * s
                out.append(Rk * total / M)
                Rk *= R
            return out

        prev = level(M)
        while True:
            if 2 * M > _MAX_NODES:
                raise PrecisionExhaustedError(
                    f"Laurent extraction did not converge with {M} nodes at {digits} digits"
                )
            M *= 2
            cur = level(M)
            err = max(abs(x - y) / max(1, abs(y)) for x, y in zip(prev, cur))
            if err <= mpf(10) ** (-digits):
                break
            prev = cur
    with mp.workdps(digits):
        if err > mpf(10) ** (-(digits // 2)):
            raise PrecisionExhaustedError(f"Laurent error estimate {err} exceeds 10^-{digits // 2}")
        return [+c for c in cur], err


def _cached(model, power, N, radius=CONTOUR_RADIUS):
    if N < 1:
        raise ParameterDomainError(f"need N >= 1, got {N}")
    block = _block_size(N)
    key = (model.key(), power, block, radius)
    with _cache_lock:
        hit = _cache.get(key)
        if hit is None:
            # a larger block serves any prefix; its values agree to 10^-digits
            larger = [k for k in _cache if k[:2] == key[:2] and k[3] == radius and k[2] > block]
            if larger:
                hit = _cache[min(larger, key=lambda k: k[2])]
    if hit is None:
        coeffs, _ = _contour_coefficients(model, power, block, radius)
        with _cache_lock:
            hit = _cache.setdefault(key, tuple(coeffs))
    return list(hit[:N])


def laurent_coeffs(model, N):
    """First N Laurent coefficients c_0..c_{N-1} of f at infinity (real mpf values)."""
    return _cached(model, 1, N)


def laurent_coeffs_power(model, N, power):
    """First N Laurent coefficients of f**power at infinity, power in {2, 3}."""
    if power not in (1, 2, 3):
        raise ParameterDomainError(f"power must be 1, 2 or 3, got {power}")
    return _cached(model, power, N)


def coefficient_block(model, power, N):
    """The cached block that serves requests of length N (used for persistence)."""
    return _cached(model, power, _block_size(N))


def seed_laurent_cache(model, power, coeffs):
    """Insert a previously computed block (its length must be a block size)."""
    block = len(coeffs)
    if block != _block_size(block):
        raise ParameterDomainError(f"block length {block} is not a cache block size")
    with _cache_lock:
        _cache.setdefault((model.key(), power, block, CONTOUR_RADIUS), tuple(coeffs))


def clear_laurent_cache():
    with _cache_lock:
        _cache.clear()
