"""Gamma, log-Gamma, Pochhammer symbols and the Stirling remainder on C minus the poles.

Evaluation goes through two routes that share the Stirling series:

* shift route: ``log G(z) = S(z + k) - sum_{j<k} log(z + j)`` with ``Re(z + k) >= threshold``.
  Summing principal logarithms keeps the result on the principal branch of
  log-Gamma, so this route backs :func:`eval_log_gamma`.
* reflection route: ``log G(z) = log pi - log sin(pi z) - log G(1 - z)`` for
  ``Re z < 1/2``; this is what :func:`eval_gamma` uses on the left half plane.

The functional-equation residuals deliberately mix the two routes (and two
different Stirling anchors) so that none of them holds by construction.

Array functions (``loggamma``, ``log_rgamma``, ``digamma`` ...) work on numpy
complex128 input.  Functions prefixed ``mp_`` take and return mpmath scalars
and are used wherever native floats run out of room (certification radii near
deep poles).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, PoleError

EULER_GAMMA = 0.577215664901532860606512090082
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
LOG_PI = math.log(math.pi)

POLE_TOL = 1e-12
SHIFT_THRESHOLD = 20.0
# second Stirling anchor used by the residual checks
ALT_THRESHOLD = 27.0
# |mu(z)| < 1 on |arg z| < 3pi/4, |z| > M_SECTOR (checked by validate_sector_constant)
M_SECTOR = 10.0
SECTOR_THETA = 0.75 * math.pi

_EPS = float(np.finfo(float).eps)
_FLOAT_TERMS = 10


@dataclass(frozen=True)
class PrecisionConfig:
    working_digits: int = 15
    series_truncation_K: int = 10**6
    stirling_terms: int = 40
    tol_residual: float = 1e-10

    def __post_init__(self):
        if self.working_digits < 15:
            raise ValueError("working_digits must be >= 15")
        if self.series_truncation_K < 100:
            raise ValueError("series_truncation_K must be >= 100")
        if self.stirling_terms < 1:
            raise ValueError("stirling_terms must be >= 1")
        if not self.tol_residual > 0:
            raise ValueError("tol_residual must be > 0")

    @property
    def extended(self) -> bool:
        return self.working_digits > 15

    def with_digits(self, digits: int) -> "PrecisionConfig":
        return PrecisionConfig(digits, self.series_truncation_K, self.stirling_terms, self.tol_residual)


DEFAULT = PrecisionConfig()
CERT_DIGITS = 50


def precision_from_env(env=None) -> PrecisionConfig:
    """Default precision, overridable through ``GAMMALAB_DIGITS``."""
    env = os.environ if env is None else env
    raw = env.get("GAMMALAB_DIGITS")
    if not raw:
        return DEFAULT
    return DEFAULT.with_digits(int(raw))


class Backend(str, Enum):
    STIRLING_RECURRENCE = "stirling_recurrence"
    WEIERSTRASS_PARTIAL = "weierstrass_partial"
    REFLECTION = "reflection"


@dataclass(frozen=True)
class ComplexSample:
    """A complex number kept both directly and as (log modulus, argument).

    ``re``/``im`` overflow to +-inf or underflow to 0 when ``log_abs`` leaves
    the float range; the log form is always exact to working precision.
    """

    re: float
    im: float
    log_abs: float
    arg_cont: float

    @classmethod
    def from_log(cls, logval) -> "ComplexSample":
        la = float(logval.real)
        arg = float(logval.imag)
        if la > 709.0:
            mag = math.inf
            re = math.copysign(mag, math.cos(arg)) if math.cos(arg) != 0 else 0.0
            im = math.copysign(mag, math.sin(arg)) if math.sin(arg) != 0 else 0.0
        else:
            mag = math.exp(la)
            re, im = mag * math.cos(arg), mag * math.sin(arg)
        return cls(re, im, la, arg)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def log(self) -> complex:
        return complex(self.log_abs, self.arg_cont)


@dataclass(frozen=True)
class GammaValue:
    value: ComplexSample
    error_estimate: float
    backend: Backend

    @property
    def complex(self) -> complex:
        return self.value.value


# ---------------------------------------------------------------------------
# small helpers


def principal_arg(re: float, im: float) -> float:
    """Argument in (-pi, pi]; the negative real axis maps to +pi."""
    if re == 0 and im == 0:
        raise DomainError("arg is undefined at 0")
    if im == 0:
        return 0.0 if re > 0 else math.pi
    # atan2 equals sign(im) * arccos(re/|z|) without the cancellation near the axis
    return math.atan2(im, re)


def nearest_pole(z) -> tuple[int, float] | None:
    """Nearest non-positive integer to ``z`` and its distance, if Re z < 1/2."""
    z = complex(z)
    if z.real >= 0.5:
        return None
    n = int(round(-z.real))
    n = max(n, 0)
    return -n, abs(z + n)


def check_pole(z, tol: float = POLE_TOL) -> None:
    hit = nearest_pole(z)
    if hit is not None and hit[1] < tol:
        raise PoleError(hit[0], complex(z), hit[1])


def _check_pole_array(z: np.ndarray, tol: float = POLE_TOL) -> None:
    n = np.maximum(np.round(-z.real), 0.0)
    d = np.abs(z + n)
    bad = (z.real < 0.5) & (d < tol)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise PoleError(-int(n.flat[i]), complex(z.flat[i]), float(d.flat[i]))


def _on_cut(z: np.ndarray) -> np.ndarray:
    return (z.imag == 0) & (z.real <= 0)


def _as_complex(z) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    if scalar:
        v = arr.item() if isinstance(arr, np.ndarray) else arr
        return v
    return arr


def reduce_arg(L):
    """Map the imaginary part of a logarithm into (-pi, pi]."""
    im = np.asarray(L).imag
    red = im - 2 * np.pi * np.ceil((im - np.pi) / (2 * np.pi))
    return np.asarray(L).real + 1j * red


def rel_residual_from_log(L):
    """|exp(L) - 1| evaluated without cancellation for small L."""
    L = reduce_arg(L)
    a, b = L.real, L.imag
    em = np.expm1(a)
    ea = em + 1.0
    re = em * np.cos(b) - 2.0 * np.sin(0.5 * b) ** 2
    im = ea * np.sin(b)
    return np.hypot(re, im)


@lru_cache(maxsize=None)
def stirling_fractions(nterms: int) -> tuple[Fraction, ...]:
    """Exact coefficients B_2k / (2k (2k - 1)), k = 1..nterms."""
    out = []
    for k in range(1, nterms + 1):
        p, q = mpmath.bernfrac(2 * k)
        out.append(Fraction(int(p), int(q)) / (2 * k * (2 * k - 1)))
    return tuple(out)


@lru_cache(maxsize=None)
def _digamma_fractions(nterms: int) -> tuple[Fraction, ...]:
    out = []
    for k in range(1, nterms + 1):
        p, q = mpmath.bernfrac(2 * k)
        out.append(Fraction(int(p), int(q)) / (2 * k))
    return tuple(out)


_STIRLING_F = np.array([float(c) for c in stirling_fractions(_FLOAT_TERMS)])
_DIGAMMA_F = np.array([float(c) for c in _digamma_fractions(_FLOAT_TERMS)])


# ---------------------------------------------------------------------------
# native float path (vectorised)


def _stirling_tail(w: np.ndarray) -> np.ndarray:
    inv = 1.0 / w
    inv2 = inv * inv
    acc = np.zeros_like(w)
    for c in _STIRLING_F[::-1]:
        acc = acc * inv2 + c
    return acc * inv


def _stirling_main(w: np.ndarray) -> np.ndarray:
    return (w - 0.5) * np.log(w) - w + LOG_SQRT_2PI + _stirling_tail(w)


def _shift_counts(z: np.ndarray, threshold: float) -> np.ndarray:
    return np.maximum(0, np.ceil(threshold - z.real)).astype(int)


def _loggamma_shift(z: np.ndarray, threshold: float = SHIFT_THRESHOLD) -> np.ndarray:
    k = _shift_counts(z, threshold)
    out = _stirling_main(z + k)
    kmax = int(k.max()) if k.size else 0
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(kmax):
            out = out - np.where(j < k, np.log(z + j), 0.0)
    return out


def log_sin_pi(z):
    """A logarithm of sin(pi z), stable for large |Im z| and near integers."""
    z, scalar = _as_complex(z)
    x, y = z.real, z.imag
    k = np.round(x)
    w = (x - k) + 1j * np.abs(y)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        direct = np.log(np.sin(np.pi * w))
        # sin(pi w) = (i/2) e^{-i pi w} (1 - e^{2 i pi w}) for Im w > 0
        q = np.exp(2j * np.pi * w)
        asym = -1j * np.pi * w + complex(math.log(0.5), math.pi / 2) + np.log(1.0 - q)
    res = np.where(np.abs(y) > 1.0, asym, direct)
    res = np.where(y < 0, np.conj(res), res)
    res = res + 1j * np.pi * np.mod(k, 2.0)
    return _out(res, scalar)


def loggamma(z, threshold: float = SHIFT_THRESHOLD):
    """Principal log-Gamma via the shift route (any branch on the negative axis)."""
    z, scalar = _as_complex(z)
    return _out(_loggamma_shift(np.atleast_1d(z), threshold).reshape(z.shape), scalar)


def log_gamma_reflect(z, threshold: float = SHIFT_THRESHOLD):
    """Some logarithm of Gamma(z): reflection for Re z < 1/2, shift route otherwise."""
    z, scalar = _as_complex(z)
    zz = np.atleast_1d(z)
    left = zz.real < 0.5
    out = np.empty_like(zz)
    if np.any(~left):
        out[~left] = _loggamma_shift(zz[~left], threshold)
    if np.any(left):
        zl = zz[left]
        out[left] = LOG_PI - log_sin_pi(zl) - _loggamma_shift(1.0 - zl, threshold)
    return _out(out.reshape(z.shape), scalar)


def log_rgamma(z):
    """A logarithm of 1/Gamma(z); -inf real part exactly at the poles."""
    z, scalar = _as_complex(z)
    zz = np.atleast_1d(z)
    left = zz.real < 0.5
    out = np.empty_like(zz)
    if np.any(~left):
        out[~left] = -_loggamma_shift(zz[~left])
    if np.any(left):
        zl = zz[left]
        out[left] = log_sin_pi(zl) + _loggamma_shift(1.0 - zl) - LOG_PI
    return _out(out.reshape(z.shape), scalar)


def _digamma_asym(w: np.ndarray) -> np.ndarray:
    inv2 = 1.0 / (w * w)
    acc = np.zeros_like(w)
    for c in _DIGAMMA_F[::-1]:
        acc = acc * inv2 + c
    return np.log(w) - 0.5 / w - acc * inv2


def digamma(z, threshold: float = SHIFT_THRESHOLD):
    """psi(z) = Gamma'(z)/Gamma(z) by upward recurrence and the asymptotic series."""
    z, scalar = _as_complex(z)
    zz = np.atleast_1d(z)
    k = _shift_counts(zz, threshold)
    out = _digamma_asym(zz + k)
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(int(k.max()) if k.size else 0):
            out = out - np.where(j < k, 1.0 / (zz + j), 0.0)
    return _out(out.reshape(z.shape), scalar)


def trigamma_real(x: float) -> float:
    """psi'(x) for real x > 0 (series shift plus asymptotic expansion)."""
    s = 0.0
    while x < 20.0:
        s += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    # 1/x + 1/(2x^2) + sum B_2k / x^(2k+1)
    tail = 0.0
    for k in range(_FLOAT_TERMS, 0, -1):
        p, q = mpmath.bernfrac(2 * k)
        tail = tail * inv2 + float(p) / float(q)
    return s + inv + 0.5 * inv2 + tail * inv2 * inv


# ---------------------------------------------------------------------------
# mpmath path (scalars)


def _mp_threshold(dps: int) -> int:
    return max(int(SHIFT_THRESHOLD), dps)


def _mp_stirling(w, dps: int, max_terms: int):
    s = (w - mpmath.mpf(0.5)) * mpmath.log(w) - w + mpmath.log(2 * mpmath.pi) / 2
    inv = 1 / w
    inv2 = inv * inv
    p = inv
    tol = mpmath.mpf(10) ** (-dps - 5) * max(1, abs(s))
    for c in stirling_fractions(max_terms):
        term = mpmath.mpf(c.numerator) / c.denominator * p
        s += term
        if abs(term) < tol:
            break
        p *= inv2
    return s


def mp_loggamma(z, dps: int = CERT_DIGITS, max_terms: int = 60):
    """Principal log-Gamma at ``dps`` digits (shift route)."""
    with mpmath.workdps(dps + 10):
        z = mpmath.mpc(z)
        k = max(0, int(math.ceil(_mp_threshold(dps) - float(z.real))))
        out = _mp_stirling(z + k, dps, max_terms)
        for j in range(k):
            out -= mpmath.log(z + j)
        return +out


def mp_digamma(z, dps: int = CERT_DIGITS, max_terms: int = 60):
    with mpmath.workdps(dps + 10):
        z = mpmath.mpc(z)
        k = max(0, int(math.ceil(_mp_threshold(dps) - float(z.real))))
        w = z + k
        inv2 = 1 / (w * w)
        out = mpmath.log(w) - 1 / (2 * w)
        p = inv2
        tol = mpmath.mpf(10) ** (-dps - 5)
        for c in _digamma_fractions(max_terms):
            term = mpmath.mpf(c.numerator) / c.denominator * p
            out -= term
            if abs(term) < tol:
                break
            p *= inv2
        for j in range(k):
            out -= 1 / (z + j)
        return +out


def mp_log_sin_pi(z, dps: int = CERT_DIGITS):
    with mpmath.workdps(dps + 10):
        return mpmath.log(mpmath.sinpi(mpmath.mpc(z)))


# ---------------------------------------------------------------------------
# public scalar operations


def _error_estimate(z: complex, L: complex, shifts: int, eps: float) -> float:
    return eps * (16.0 + 4.0 * shifts + abs(L) + math.pi * abs(z))


def eval_gamma(z, cfg: PrecisionConfig = DEFAULT) -> GammaValue:
    """Gamma(z) with its log form and an estimate of the relative error."""
    check_pole(z)
    zc = complex(z)
    if zc.real >= SHIFT_THRESHOLD:
        backend = Backend.STIRLING_RECURRENCE
    elif zc.real < 0.5:
        backend = Backend.REFLECTION
    else:
        backend = Backend.STIRLING_RECURRENCE
    if cfg.extended:
        dps = cfg.working_digits
        with mpmath.workdps(dps + 10):
            if backend is Backend.REFLECTION:
                Lm = mpmath.log(mpmath.pi) - mp_log_sin_pi(zc, dps) - mp_loggamma(1 - mpmath.mpc(zc), dps, cfg.stirling_terms)
            else:
                Lm = mp_loggamma(zc, dps, cfg.stirling_terms)
        L = complex(Lm)
        eps = 10.0 ** (-dps)
        shifts = max(0, math.ceil(_mp_threshold(dps) - abs(zc.real)))
    else:
        L = complex(log_gamma_reflect(zc))
        eps = _EPS
        shifts = max(0, math.ceil(SHIFT_THRESHOLD - (zc.real if zc.real >= 0.5 else 1 - zc.real)))
    err = _error_estimate(zc, L, shifts, eps)
    return GammaValue(ComplexSample.from_log(L), err, backend)


def eval_log_gamma(z, cfg: PrecisionConfig = DEFAULT) -> ComplexSample:
    """Principal branch of log Gamma, continuous on C minus (-inf, 0]."""
    zc = complex(z)
    if zc.imag == 0 and zc.real <= 0:
        raise DomainError(f"log Gamma has its branch cut at z={zc!r}")
    if cfg.extended:
        L = complex(mp_loggamma(zc, cfg.working_digits, cfg.stirling_terms))
    else:
        L = complex(loggamma(zc))
    return ComplexSample.from_log(L)


def gamma(z, cfg: PrecisionConfig = DEFAULT) -> complex:
    return eval_gamma(z, cfg).complex


def weierstrass_partial(z, K: int) -> complex:
    """Partial Weierstrass product of length K.

    Its relative deviation from Gamma(z) is about |z|^2 / (2K), so it is only
    suitable as a slow, independent cross-check.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    check_pole(z)
    zc = complex(z)
    total = -EULER_GAMMA * zc - np.log(zc)
    chunk = 1 << 18
    for start in range(1, K + 1, chunk):
        k = np.arange(start, min(K, start + chunk - 1) + 1, dtype=float)
        t = zc / k
        small = np.abs(t) < 1e-3
        series = t * t * (0.5 - t * (1.0 / 3.0 - t * (0.25 - t / 5.0)))
        with np.errstate(all="ignore"):
            direct = t - np.log1p(t)
        total += np.sum(np.where(small, series, direct))
    return complex(np.exp(total))


def pochhammer(z, k: int) -> complex:
    """m_k(z): z(z+1)...(z+k-1) for k >= 0, 1/((z-1)...(z-|k|)) for k < 0."""
    zc = complex(z)
    if k >= 0:
        out = complex(1.0)
        for j in range(k):
            out *= zc + j
        return out
    out = complex(1.0)
    for j in range(1, -k + 1):
        f = zc - j
        if abs(f) < POLE_TOL:
            raise PoleError(j, zc, abs(f))
        out *= f
    return 1.0 / out


def recurrence_residual(z):
    """Relative residual of Gamma(z+1) = z Gamma(z) (log form)."""
    z, scalar = _as_complex(z)
    zz = np.atleast_1d(z)
    _check_pole_array(zz)
    _check_pole_array(zz + 1)
    L = log_gamma_reflect(zz + 1) - np.log(zz) - loggamma(zz, ALT_THRESHOLD)
    return _out(rel_residual_from_log(L).reshape(z.shape), scalar)


def reflection_residual(z):
    """|Gamma(z) Gamma(1-z) sin(pi z) - pi| / pi, both Gammas by the shift route."""
    z, scalar = _as_complex(z)
    zz = np.atleast_1d(z)
    if np.any((zz.imag == 0) & (zz.real == np.round(zz.real))):
        raise DomainError("reflection residual is undefined at integers")
    L = loggamma(zz, SHIFT_THRESHOLD) + loggamma(1.0 - zz, ALT_THRESHOLD) + log_sin_pi(zz) - LOG_PI
    return _out(rel_residual_from_log(L).reshape(z.shape), scalar)


def multiplication_residual(z, n: int):
    """Relative residual of the Gauss multiplication formula for integer n >= 2."""
    if n < 2:
        raise ValueError("multiplication formula needs n >= 2")
    z, scalar = _as_complex(z)
    zz = np.atleast_1d(z)
    if np.any(_on_cut(zz)):
        raise DomainError("multiplication residual needs z off (-inf, 0]")
    lhs = np.zeros_like(zz)
    for k in range(n):
        _check_pole_array(zz + k / n)
        lhs = lhs + log_gamma_reflect(zz + k / n)
    _check_pole_array(n * zz)
    rhs = 0.5 * (n - 1) * math.log(2 * math.pi) + (0.5 - n * zz) * math.log(n) + loggamma(n * zz, ALT_THRESHOLD)
    return _out(rel_residual_from_log(lhs - rhs).reshape(z.shape), scalar)


def stirling_mu(z, cfg: PrecisionConfig = DEFAULT) -> complex:
    """mu(z) = log Gamma(z) - (z - 1/2) log z + z - log sqrt(2 pi)."""
    zc = complex(z)
    if zc.imag == 0 and zc.real <= 0:
        raise DomainError("mu is defined off (-inf, 0]")
    if cfg.extended:
        with mpmath.workdps(cfg.working_digits + 10):
            zm = mpmath.mpc(zc)
            mu = mp_loggamma(zm, cfg.working_digits) - (zm - 0.5) * mpmath.log(zm) + zm - mpmath.log(2 * mpmath.pi) / 2
            return complex(mu)
    if zc.real >= SHIFT_THRESHOLD:
        # no subtraction needed: mu is exactly the series tail here
        return complex(_stirling_tail(np.array([zc]))[0])
    L = complex(loggamma(zc))
    return L - (zc - 0.5) * complex(np.log(zc)) + zc - LOG_SQRT_2PI


def sector_constant(theta: float) -> float:
    """M_theta for the Stirling bounds; only the 3pi/4 sector is validated."""
    if not (math.pi / 2 < theta < math.pi):
        raise DomainError("theta must lie in (pi/2, pi)")
    if theta > SECTOR_THETA + 1e-15:
        raise DomainError("M_theta is only calibrated for theta <= 3pi/4")
    return M_SECTOR


def stirling_bounds_check(z, theta: float = SECTOR_THETA) -> bool:
    """Check sqrt(2pi)/e B <= |Gamma(z)| <= e sqrt(2pi) B in log form.

    ``B = |z|^(x - 1/2) exp(-y arg z - x)``.
    """
    zc = complex(z)
    M = sector_constant(theta)
    if zc == 0 or abs(principal_arg(zc.real, zc.imag)) >= theta or abs(zc) <= M:
        raise DomainError(f"z={zc!r} is outside the sector |arg z| < {theta}, |z| > {M}")
    x, y = zc.real, zc.imag
    base = LOG_SQRT_2PI + (x - 0.5) * math.log(abs(zc)) - y * principal_arg(x, y) - x
    la = float(np.real(log_gamma_reflect(zc)))
    return base - 1.0 <= la <= base + 1.0


def validate_sector_constant(theta: float = SECTOR_THETA, count: int = 10**4, seed: int = 0,
                             r_max: float = 1e4) -> float:
    """Largest |mu| found on a seeded sample of the sector |arg z| < theta, |z| > M_theta."""
    M = sector_constant(theta)
    rng = np.random.default_rng(seed)
    r = M * np.exp(rng.uniform(1e-9, math.log(r_max / M), count))
    a = rng.uniform(-theta, theta, count)
    worst = 0.0
    for zc in r * np.exp(1j * a):
        worst = max(worst, abs(stirling_mu(zc)))
    return worst


@dataclass(frozen=True)
class Constants:
    euler_gamma: float
    alpha_root: float
    pi: float


@lru_cache(maxsize=None)
def constants() -> Constants:
    """gamma, the positive zero of Gamma' (where psi vanishes), and pi."""
    alpha = brentq(lambda x: float(np.real(digamma(x))), 1.4, 1.5, xtol=1e-15, rtol=4 * _EPS)
    return Constants(EULER_GAMMA, alpha, math.pi)


def gamma_min_positive() -> float:
    """Gamma(alpha), the minimum of Gamma on (0, inf)."""
    return math.exp(float(np.real(loggamma(constants().alpha_root))))
