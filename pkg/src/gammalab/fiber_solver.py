"""Solutions of Gamma(z) = c, counted and certified through the entire function 1/Gamma.

All root counting is the winding number of ``g(z) = 1/Gamma(z) - 1/c`` along a
closed contour, and all Newton work is done on ``g``; ``g`` has no poles, and
its zeros are exactly the fiber.  Near the pole -n we write ``z = -n + d`` and
use ``1/Gamma(-n + d) = (-1)^n sin(pi d) Gamma(n + 1 - d) / pi`` so that the
offset ``d`` (which can be 1e-30 and smaller) keeps full relative precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import mpmath
import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import gamma_core as gc
from .errors import CertificationError, ContourError, DomainError, ResolutionError

M_SECTOR = gc.M_SECTOR
DEFAULT_M = 1024
MIN_M = 256
ARG_STEP = math.pi / 2
MARGIN = 1e-7
MAX_DEPTH = 20
POLE_CLEARANCE = 1e-6
EXTENDED_LOGGAMMA = 30.0


@dataclass(frozen=True)
class FiberPoint:
    """A solution of Gamma(z) = c.

    ``offset`` is ``z + nearest_pole`` carried at full relative precision;
    ``z`` itself is rounded to a double.  ``regime`` is ``"lemma"`` when the
    point comes from :func:`left_fiber` with n >= N_c, ``"below_threshold"``
    for left_fiber with smaller n, and ``"strip"`` for points found by
    :func:`fibers_in_strip`.
    """

    c: complex
    z: complex
    residual: float
    cert_radius_log: float
    winding: int
    nearest_pole: int | None
    offset: complex | None = None
    certified: bool = True
    regime: str = "strip"

    def to_dict(self) -> dict:
        return {
            "c": [self.c.real, self.c.imag],
            "z": [self.z.real, self.z.imag],
            "residual": self.residual,
            "cert_radius_log": self.cert_radius_log,
            "winding": self.winding,
            "nearest_pole": self.nearest_pole,
            "offset": None if self.offset is None else [self.offset.real, self.offset.imag],
            "certified": self.certified,
            "regime": self.regime,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FiberPoint":
        off = d.get("offset")
        return cls(
            complex(*d["c"]), complex(*d["z"]), d["residual"], d["cert_radius_log"], d["winding"],
            d["nearest_pole"], None if off is None else complex(*off),
            d.get("certified", True), d.get("regime", "strip"),
        )

    @property
    def sort_key(self):
        n = -1 if self.nearest_pole is None else self.nearest_pole
        return (-n, self.z.real, self.z.imag)


@dataclass(frozen=True)
class Rectangle:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ValueError(f"degenerate rectangle {self}")
        if self.pole_distance() < POLE_CLEARANCE:
            raise ContourError(f"boundary of {self} passes within {POLE_CLEARANCE} of a pole")

    def pole_distance(self) -> float:
        """Distance from the boundary to the nearest non-positive integer."""
        best = math.inf
        n_lo = max(0, math.floor(-self.x_hi) - 1)
        n_hi = max(0, math.ceil(-self.x_lo) + 1)
        for n in range(n_lo, n_hi + 1):
            px = -float(n)
            inside_x = self.x_lo <= px <= self.x_hi
            inside_y = self.y_lo <= 0.0 <= self.y_hi
            if inside_x and inside_y:
                d = min(px - self.x_lo, self.x_hi - px, -self.y_lo, self.y_hi)
            else:
                dx = max(self.x_lo - px, 0.0, px - self.x_hi)
                dy = max(self.y_lo, 0.0, -self.y_hi)
                d = math.hypot(dx, dy)
            best = min(best, d)
        return best

    def contains(self, z: complex, tol: float = 0.0) -> bool:
        return (self.x_lo - tol <= z.real <= self.x_hi + tol) and (self.y_lo - tol <= z.imag <= self.y_hi + tol)

    @property
    def width(self) -> float:
        return self.x_hi - self.x_lo

    @property
    def height(self) -> float:
        return self.y_hi - self.y_lo

    def boundary(self, t: np.ndarray) -> np.ndarray:
        """Counter-clockwise boundary point for parameter t in [0, 4)."""
        side = np.floor(t).astype(int) % 4
        s = t - np.floor(t)
        x = np.select(
            [side == 0, side == 1, side == 2, side == 3],
            [self.x_lo + s * self.width, np.full_like(s, self.x_hi), self.x_hi - s * self.width, np.full_like(s, self.x_lo)],
        )
        y = np.select(
            [side == 0, side == 1, side == 2, side == 3],
            [np.full_like(s, self.y_lo), self.y_lo + s * self.height, np.full_like(s, self.y_hi), self.y_hi - s * self.height],
        )
        return x + 1j * y

    def poles_inside(self) -> list[int]:
        if not (self.y_lo < 0 < self.y_hi):
            return []
        return [n for n in range(max(0, math.ceil(-self.x_hi)), math.floor(-self.x_lo) + 1)
                if self.x_lo < -n < self.x_hi]


# ---------------------------------------------------------------------------
# evaluation of g = 1/Gamma - 1/c in log form


def _log_g(logR: np.ndarray, c: complex) -> tuple[np.ndarray, np.ndarray]:
    """log(e^logR - 1/c) and the relative modulus |g| / max(|1/Gamma|, |1/c|)."""
    K = -np.log(complex(c))
    big = logR.real >= K.real
    with np.errstate(over="ignore", invalid="ignore"):
        w = np.where(big, np.exp(K - logR), np.exp(logR - K))
    one_minus = 1.0 - w
    base = np.where(big, logR, K + 1j * np.pi)
    return base + np.log(one_minus), np.abs(one_minus)


def _wrap(d: np.ndarray) -> np.ndarray:
    return d - 2 * np.pi * np.round(d / (2 * np.pi))


def winding_number(log_values, t: np.ndarray, closed: bool = True) -> float:
    """Total argument change / 2pi of samples ``log_values`` taken at increasing t."""
    im = np.imag(log_values)
    d = np.diff(np.append(im, im[0])) if closed else np.diff(im)
    return float(np.sum(_wrap(d)) / (2 * np.pi))


def _count_on_contour(logR_fn, param_fn, c: complex, m: int, period: float,
                      margin: float = MARGIN, max_rounds: int = 14) -> int:
    t = np.linspace(0.0, period, m, endpoint=False)
    lg, rho = _log_g(logR_fn(param_fn(t)), c)
    for _ in range(max_rounds):
        if rho.min() < margin:
            raise ContourError(f"|1/Gamma - 1/c| drops to {rho.min():.3g} (relative) on the contour")
        d = _wrap(np.diff(np.append(lg.imag, lg.imag[0])))
        bad = np.flatnonzero(np.abs(d) >= ARG_STEP)
        if bad.size == 0:
            total = float(np.sum(d)) / (2 * np.pi)
            k = int(round(total))
            if abs(total - k) > 1e-6:
                raise ContourError(f"winding sum {total} is not an integer")
            return k
        nxt = np.append(t[1:], period)
        t_new = 0.5 * (t[bad] + nxt[bad])
        lg_new, rho_new = _log_g(logR_fn(param_fn(t_new)), c)
        t = np.concatenate([t, t_new])
        order = np.argsort(t, kind="stable")
        t, lg, rho = t[order], np.concatenate([lg, lg_new])[order], np.concatenate([rho, rho_new])[order]
    raise ContourError("argument increments stayed >= pi/2 after refinement")


def count_roots_rectangle(c, rect: Rectangle, m: int = DEFAULT_M, margin: float = MARGIN) -> int:
    """Number of solutions of Gamma(z) = c inside ``rect`` (with multiplicity).

    Computed as the winding number of 1/Gamma - 1/c along the boundary, with
    ``m`` initial samples per side and bisection of any segment whose argument
    increment reaches pi/2.
    """
    if m < MIN_M:
        raise ValueError(f"m must be >= {MIN_M}")
    c = complex(c)
    if c == 0:
        raise DomainError("c must be nonzero")
    return _count_on_contour(gc.log_rgamma, rect.boundary, c, 4 * m, 4.0, margin)


# ---------------------------------------------------------------------------
# constants of the left-half-plane analysis


def _log_size_bound(x: float) -> float:
    # log of 2 e sqrt(2 pi e) (e / (1 - x))^(1/2 - x)
    return math.log(2 * math.e * math.sqrt(2 * math.pi * math.e)) + (0.5 - x) * (1.0 - math.log(1.0 - x))


@lru_cache(maxsize=None)
def gamma_size_constant() -> float:
    """C = sup_{x < 1/2} 2e sqrt(2 pi e) (e/(1-x))^(1/2 - x), located numerically."""
    res = minimize_scalar(lambda x: -_log_size_bound(x), bounds=(-50.0, 0.5), method="bounded",
                          options={"xatol": 1e-12})
    grid = np.linspace(-50.0, 0.4999, 20001)
    best = max(-res.fun, max(_log_size_bound(float(x)) for x in grid[::50]))
    return math.exp(best)


def verify_gamma_size_bound(M: float, count: int = 1000, seed: int = 0) -> float:
    """max over a sample (x < 1/2, |y| > M) of log|Gamma| - log(C exp(-pi |y| / 2))."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(-30.0, 0.5, count)
    y = (M + rng.exponential(5.0, count) + 1e-9) * rng.choice([-1.0, 1.0], count)
    la = np.real(gc.log_gamma_reflect(x + 1j * y))
    return float(np.max(la - (math.log(gamma_size_constant()) - math.pi * np.abs(y) / 2)))


@lru_cache(maxsize=None)
def im_bound_constant() -> float:
    """M = max(M_{3pi/4}, (6/pi) log C); above it solutions with Re z < 1/2 are confined."""
    M = max(M_SECTOR, 6.0 / math.pi * math.log(gamma_size_constant()))
    worst = verify_gamma_size_bound(M)
    if worst >= 0:
        raise ArithmeticError(f"size bound violated on the spot-check sample (excess {worst})")
    return M


def _log_abs_gamma_half_minus(n: int) -> float:
    # log |Gamma(1/2 - n)| = log sqrt(pi) - sum_{j=1..n} log(j - 1/2)
    return 0.5 * gc.LOG_PI - sum(math.log(j - 0.5) for j in range(1, n + 1))


def threshold_Nc(c) -> int:
    """Smallest N_c >= max(e^{3/2}, N) with Gamma(N_c) > 4 pi |c|.

    ``N = ceil(max(M, N0, -log|c|, log|c|))`` with N0 the least positive
    integer for which |Gamma(1/2 - N0)| < |c|.
    """
    c = complex(c)
    if c == 0:
        raise DomainError("c must be nonzero")
    logc = math.log(abs(c))
    n0 = 1
    while _log_abs_gamma_half_minus(n0) >= logc:
        n0 += 1
    N = math.ceil(max(im_bound_constant(), n0, -logc, logc))
    nc = max(math.ceil(math.exp(1.5)), N)
    while math.lgamma(nc) <= math.log(4 * math.pi) + logc:
        nc += 1
    return nc


def im_bound(c) -> float:
    """No solution with Re z < 1/2 has |Im z| above this value."""
    return max(im_bound_constant(), -math.log(abs(complex(c))))


def _log_upper_stirling(x: np.ndarray, y: float) -> np.ndarray:
    r2 = x * x + y * y
    return 1.0 + gc.LOG_SQRT_2PI + (x - 0.5) * 0.5 * np.log(r2) - abs(y) * np.arctan2(abs(y), x) - x


def right_im_bound(c, x_lo: float, x_hi: float) -> float:
    """Y >= M_{3pi/4} with |Gamma(x+iy)| < |c|/2 for x in [max(x_lo,1/2), x_hi], |y| >= Y.

    Uses the Stirling upper bound, which decreases in |y| for x > 0.
    """
    a = max(x_lo, 0.5)
    xs = np.linspace(a, x_hi, 257)
    target = math.log(abs(complex(c))) - math.log(2.0)
    f = lambda y: float(np.max(_log_upper_stirling(xs, y))) - target
    lo = M_SECTOR
    if f(lo) < 0:
        return lo
    hi = 2 * lo
    while f(hi) >= 0:
        lo, hi = hi, 2 * hi
    return brentq(f, lo, hi, xtol=1e-6)


# ---------------------------------------------------------------------------
# Newton refinement


def _offset_logR(n: int, d: complex) -> complex:
    """log(1/Gamma(-n + d)) for a double offset d."""
    return complex(gc.log_sin_pi(d) + gc.loggamma(n + 1 - d) - gc.LOG_PI) + 1j * math.pi * (n % 2)


def _offset_dlogR(n: int, d: complex) -> complex:
    return complex(math.pi * np.cos(math.pi * d) / np.sin(math.pi * d) - gc.digamma(n + 1 - d))


def _newton_offset(c: complex, n: int, d0: complex, max_step: float, max_iter: int = 80):
    """Newton on g(-n + d) in the offset variable; returns (d, residual) or None."""
    d = complex(d0)
    for _ in range(max_iter):
        L = _offset_logR(n, d)
        q = np.exp(-L) / c
        res = abs(q - 1.0)
        if res < 1e-15:
            return d, res
        step = (1.0 - q) / _offset_dlogR(n, d)
        if not np.isfinite(step) or abs(step) > max_step:
            return None
        d_new = d - step
        if abs(step) <= 1e-16 * abs(d_new):
            return d_new, abs(np.exp(-_offset_logR(n, d_new)) / c - 1.0)
        d = d_new
    L = _offset_logR(n, d)
    return d, abs(np.exp(-L) / c - 1.0)


def _newton_right(c: complex, z0: complex, max_step: float, max_iter: int = 80):
    z = complex(z0)
    for _ in range(max_iter):
        L = -complex(gc.loggamma(z))
        q = np.exp(-L) / c
        res = abs(q - 1.0)
        if res < 1e-15:
            return z, res
        step = (1.0 - q) / (-complex(gc.digamma(z)))
        if not np.isfinite(step) or abs(step) > max_step:
            return None
        z_new = z - step
        if abs(step) <= 1e-16 * abs(z_new):
            return z_new, abs(np.exp(complex(gc.loggamma(z_new))) / c - 1.0)
        z = z_new
    return z, abs(np.exp(complex(gc.loggamma(z))) / c - 1.0)


def refine_root(c, z0: complex, max_step: float = 1.0):
    """Newton from z0; returns (z, offset, nearest_pole, residual) or None on failure."""
    c = complex(c)
    with np.errstate(all="ignore"):
        return _refine(c, complex(z0), max_step)


def _refine(c: complex, z0: complex, max_step: float):
    if z0.real < 0.5:
        n = max(0, int(round(-z0.real)))
        out = _newton_offset(c, n, z0 + n, max_step)
        if out is None:
            return None
        d, res = out
        z = complex(-n + d.real, d.imag)
        n2 = max(0, int(round(-z.real))) if z.real < 0.5 else None
        if n2 is not None and n2 != n:
            # converged into a neighbouring strip; re-express the offset there
            return z, z + n2, n2, res
        return z, d, n, res
    out = _newton_right(c, z0, max_step)
    if out is None:
        return None
    z, res = out
    if z.real < 0.5:
        n = max(0, int(round(-z.real)))
        return z, z + n, n, res
    return z, None, None, res


def residue_seed(c, n: int) -> complex:
    """First-order Laurent estimate of the offset d with 1/Gamma(-n + d) = 1/c."""
    c = complex(c)
    sign = -1.0 if n % 2 else 1.0
    return complex(sign * math.exp(-math.lgamma(n + 1)) / c)


# ---------------------------------------------------------------------------
# left-half-plane fibers near -n


def _mp_integer_taylor(n: int, radius, dps: int) -> list:
    """Taylor coefficients a_k with log Gamma(n + 1 + t) = sum a_k t^k, for |t| <= radius.

    Uses psi^(k-1)(n+1) = (-1)^k (k-1)! (zeta(k) - H_n^(k)) for k >= 2 and
    psi(n+1) = H_n - gamma; a route independent of the shifted Stirling series.
    """
    with mpmath.workdps(dps + 10):
        coeffs = [mpmath.log(mpmath.factorial(n))]
        h1 = mpmath.fsum(mpmath.mpf(1) / j for j in range(1, n + 1))
        coeffs.append(h1 - mpmath.euler)
        tol = mpmath.mpf(10) ** (-dps - 5)
        k = 2
        while True:
            hk = mpmath.fsum(mpmath.mpf(1) / mpmath.mpf(j) ** k for j in range(1, n + 1))
            a = (-1) ** k * (mpmath.zeta(k) - hk) / k
            coeffs.append(a)
            if abs(a) * radius ** k < tol or k > 200:
                return coeffs
            k += 1


def _mp_offset_logR(n: int, d, dps: int):
    with mpmath.workdps(dps + 10):
        L = gc.mp_log_sin_pi(d, dps) + gc.mp_loggamma(n + 1 - d, dps) - mpmath.log(mpmath.pi)
        return L + mpmath.mpc(0, mpmath.pi * (n % 2))


def _mp_offset_dlogR(n: int, d, dps: int):
    with mpmath.workdps(dps + 10):
        return mpmath.pi * mpmath.cospi(d) / mpmath.sinpi(d) - gc.mp_digamma(n + 1 - d, dps)


def left_fiber(c, n: int, cfg: gc.PrecisionConfig = gc.DEFAULT, m: int = DEFAULT_M) -> FiberPoint:
    """The solution z_n of Gamma(z) = c near the pole -n, certified on a circle.

    Newton starts from the residue seed and runs on the offset d = z + n.  The
    circle |d| = 2 pi |c| / Gamma(n) is then sampled: 1/Gamma must exceed
    1/|c| in modulus everywhere on it, and 1/Gamma - 1/c must wind exactly once.
    Extended precision turns on for log Gamma(n) > 30.
    """
    c = complex(c)
    if c == 0:
        raise DomainError("c must be nonzero")
    if n < 1:
        raise ValueError("n must be a positive integer")
    cert_log = math.log(2 * math.pi * abs(c)) - math.lgamma(n)
    if cert_log >= math.log(0.5):
        raise CertificationError(f"radius 2 pi |c| / Gamma({n}) >= 1/2; the disk leaves the strip")
    regime = "lemma" if n >= threshold_Nc(c) else "below_threshold"
    extended = cfg.extended or math.lgamma(n) > EXTENDED_LOGGAMMA
    d0 = residue_seed(c, n)
    if extended:
        dps = max(cfg.working_digits, gc.CERT_DIGITS)
        d, res, wind, min_excess = _left_fiber_mp(c, n, d0, cert_log, dps, m)
    else:
        d, res, wind, min_excess = _left_fiber_float(c, n, d0, cert_log, m)
    z = complex(-n + d.real, d.imag)
    point = FiberPoint(c, z, res, cert_log, wind, n, d, True, regime)
    inside = math.log(abs(d)) <= cert_log if d != 0 else True
    if wind != 1 or min_excess <= 0 or not inside or res > 1e-10:
        raise CertificationError(
            f"left fiber n={n} not certified: winding={wind}, modulus excess={min_excess:.3g}, "
            f"inside={inside}, residual={res:.3g}",
            best=replace(point, certified=False),
        )
    return point


def _circle_angles(m: int) -> np.ndarray:
    return np.linspace(0.0, 2 * np.pi, m, endpoint=False)


def _left_fiber_float(c, n, d0, cert_log, m):
    eps = math.exp(cert_log)
    out = _newton_offset(c, n, d0, max_step=eps)
    if out is None:
        raise CertificationError(f"Newton diverged for n={n}", best=None)
    d, res = out
    logR = lambda theta: np.array([_offset_logR(n, eps * complex(math.cos(t), math.sin(t))) for t in theta])
    theta = _circle_angles(m)
    L = logR(theta)
    min_excess = float(np.min(L.real) + math.log(abs(c)))
    wind = _count_on_contour(logR, lambda t: t, c, m, 2 * np.pi)
    return d, res, wind, min_excess


def _left_fiber_mp(c, n, d0, cert_log, dps, m):
    with mpmath.workdps(dps + 10):
        cm = mpmath.mpc(c)
        d = mpmath.mpc(d0)
        res = None
        for _ in range(60):
            L = _mp_offset_logR(n, d, dps)
            q = mpmath.exp(-L) / cm
            step = (1 - q) / _mp_offset_dlogR(n, d, dps)
            d -= step
            if abs(step) <= mpmath.mpf(10) ** (-dps) * abs(d):
                break
        L = _mp_offset_logR(n, d, dps)
        res = float(abs(mpmath.exp(-L) / cm - 1))
        eps = mpmath.exp(mpmath.log(2 * mpmath.pi * abs(cm)) - mpmath.loggamma(n))

        coeffs = _mp_integer_taylor(n, eps, dps)

        def logR(theta):
            out = []
            for t in theta:
                d = eps * mpmath.expjpi(float(t) / math.pi)
                lg = coeffs[0] + mpmath.polyval(coeffs[:0:-1], -d) * (-d)
                L = mpmath.log(mpmath.sinpi(d)) - mpmath.log(mpmath.pi) + lg
                out.append(complex(L) + 1j * math.pi * (n % 2))
            return np.array(out)

        theta = _circle_angles(m)
        Lc = logR(theta)
        min_excess = float(np.min(Lc.real) + math.log(abs(c)))
        wind = _count_on_contour(logR, lambda t: t, c, m, 2 * np.pi)
        return complex(d), res, wind, min_excess


# ---------------------------------------------------------------------------
# enumeration in a vertical strip


class FiberList(list):
    """List of FiberPoints with the strip's bookkeeping attached."""

    def __init__(self, points, total_winding: int, y_bound: float, cells: int):
        super().__init__(points)
        self.total_winding = total_winding
        self.y_bound = y_bound
        self.cells = cells


_SPLIT_FRACTIONS = (0.5, 0.4617, 0.5383, 0.4231, 0.5769, 0.3859, 0.6141)


def _split(rect: Rectangle, frac: float) -> tuple[Rectangle, Rectangle]:
    if rect.width >= rect.height:
        s = rect.x_lo + frac * rect.width
        return Rectangle(rect.x_lo, s, rect.y_lo, rect.y_hi), Rectangle(s, rect.x_hi, rect.y_lo, rect.y_hi)
    s = rect.y_lo + frac * rect.height
    return Rectangle(rect.x_lo, rect.x_hi, rect.y_lo, s), Rectangle(rect.x_lo, rect.x_hi, s, rect.y_hi)


def _seeds(c: complex, rect: Rectangle) -> list[complex]:
    seeds = []
    for n in rect.poles_inside():
        d = residue_seed(c, n)
        if abs(d) < 0.5:
            seeds.append(complex(-n, 0.0) + d)
    cx = 0.5 * (rect.x_lo + rect.x_hi) + 0.0137 * rect.width
    cy = 0.5 * (rect.y_lo + rect.y_hi) + 0.0171 * rect.height
    seeds.append(complex(cx, cy))
    for fx in (0.23, 0.5, 0.77):
        for fy in (0.27, 0.5, 0.73):
            seeds.append(complex(rect.x_lo + fx * rect.width + 0.003, rect.y_lo + fy * rect.height + 0.004))
    return seeds


def _solve_single(c: complex, rect: Rectangle) -> FiberPoint | None:
    diam = math.hypot(rect.width, rect.height)
    tol = 1e-12 * max(1.0, diam)
    for z0 in _seeds(c, rect):
        out = refine_root(c, z0, max_step=diam)
        if out is None:
            continue
        z, off, n, res = out
        if res > 1e-12 or not rect.contains(z, tol):
            continue
        return FiberPoint(c, z, res, _local_radius_log(c, z, rect, diam), 1, n, off, True, "strip")
    return None


def _local_radius_log(c: complex, z: complex, rect: Rectangle, diam: float) -> float:
    """log of the half-width of a small square around z that winds once; the cell otherwise."""
    rho = min(1e-3 * max(1.0, abs(z)), 0.25 * min(rect.width, rect.height))
    for _ in range(3):
        try:
            sq = Rectangle(z.real - rho, z.real + rho, z.imag - rho, z.imag + rho)
            if count_roots_rectangle(c, sq, MIN_M) == 1:
                return math.log(rho)
        except ContourError:
            pass
        rho *= 0.1
    return math.log(0.5 * diam)


def fibers_in_strip(c, x_lo: float, x_hi: float, m: int = DEFAULT_M) -> FiberList:
    """All solutions of Gamma(z) = c with x_lo <= Re z <= x_hi.

    The strip is cut to |Im z| <= Y using the decay bounds of |Gamma| (Stirling
    on the right half, the reflection-based size bound on the left), then
    bisected until every cell holds a single Newton-refined root.
    """
    c = complex(c)
    if c == 0:
        raise DomainError("c must be nonzero; Gamma has no zeros")
    if not x_lo < x_hi:
        raise ValueError("x_lo must be < x_hi")
    if x_hi - x_lo > 100:
        raise ValueError("strip width must be <= 100")
    Y = 0.0
    if x_lo < 0.5:
        Y = max(Y, im_bound(c))
    if x_hi > 0.5:
        Y = max(Y, right_im_bound(c, x_lo, x_hi))
    Y += 0.5
    root = Rectangle(x_lo, x_hi, -Y, Y)
    total = count_roots_rectangle(c, root, m)
    points: list[FiberPoint] = []
    cells = 0
    stack = [(root, total, 0)]
    while stack:
        rect, count, depth = stack.pop()
        if count == 0:
            continue
        cells += 1
        if count == 1:
            p = _solve_single(c, rect)
            if p is not None:
                points.append(p)
                continue
        if depth >= MAX_DEPTH:
            raise ResolutionError(f"subdivision depth {MAX_DEPTH} exceeded in {rect}")
        for frac in _SPLIT_FRACTIONS:
            try:
                a, b = _split(rect, frac)
                ka, kb = count_roots_rectangle(c, a, m), count_roots_rectangle(c, b, m)
            except ContourError:
                continue
            if ka + kb == count:
                stack.append((b, kb, depth + 1))
                stack.append((a, ka, depth + 1))
                break
        else:
            raise ResolutionError(f"no admissible split of {rect}")
    points.sort(key=lambda p: p.sort_key)
    if len(points) != total:
        raise ResolutionError(f"found {len(points)} points but the contour counts {total}")
    return FiberList(points, total, Y, cells)
