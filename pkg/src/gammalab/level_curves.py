"""Constant-modulus curves of Gamma in the upper-right quadrant.

For r > Gamma(alpha) the set {x + iy : y > 0, |Gamma(x + iy)| = r} beyond the
real-axis seed is the graph of a C^1 function y_r.  Along it the slope is
Re(psi) / Im(psi); :func:`level_slope` evaluates that quotient from the
termwise derivative of the Weierstrass product, with the sums' tails replaced
by their integrals.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import gamma_core as gc
from .errors import DomainError, NoSeedError, TraceError

DEFAULT_K = 10**5
H_INIT = 0.05
H_MAX = 0.5
H_MIN = 1e-6
MAX_CORRECTOR_ITERS = 3
GROW_AFTER = 5


def level_slope(x, y, K: int = DEFAULT_K):
    """dy/dx along |Gamma(x+iy)| = const, from the product formula.

    The truncated sums over n = 1..K get their tails from the integral
    comparison at the midpoint ``a = K + 1/2``::

        sum_{n>K} (1/n - (n+x)/((n+x)^2+y^2)) ~ log(sqrt((a+x)^2+y^2) / a)
        sum_{n>K} y/((n+x)^2+y^2)            ~ pi/2 - arctan((a+x)/y)
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("level_slope needs x > 0 and y > 0")
    if K < 10**4:
        raise ValueError("K must be >= 10^4")
    n = np.arange(1, K + 1, dtype=float)
    a = K + 0.5
    out = np.empty(np.broadcast(xs, ys).shape)
    for i, (xi, yi) in enumerate(np.broadcast(xs, ys)):
        nx = n + xi
        d = nx * nx + yi * yi
        r2 = xi * xi + yi * yi
        num = -gc.EULER_GAMMA - xi / r2 + np.sum(1.0 / n - nx / d)
        num += 0.5 * math.log(((a + xi) ** 2 + yi * yi) / (a * a))
        den = yi / r2 + np.sum(yi / d)
        den += math.pi / 2 - math.atan((a + xi) / yi)
        out.flat[i] = num / den
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(out.flat[0])
    return out


def denominator_lower_bound(x: float, y: float) -> float:
    """The integral lower bound pi/2 - arctan(x/y) for the slope's denominator."""
    return math.pi / 2 - math.atan(x / y)


def _log_abs_gamma(x: float, y: float) -> float:
    return float(np.real(gc.loggamma(complex(x, y))))


def real_axis_seed(r: float) -> float:
    """x0 > alpha with Gamma(x0) = r."""
    alpha = gc.constants().alpha_root
    if r <= gc.gamma_min_positive():
        raise NoSeedError(f"r={r!r} <= Gamma(alpha); no level curve starts on (alpha, inf)")
    target = math.log(r)
    f = lambda t: _log_abs_gamma(t, 0.0) - target
    lo, hi = alpha, alpha + 1.0
    while f(hi) < 0:
        lo, hi = hi, 2 * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-6:
            break
    x = 0.5 * (lo + hi)
    for _ in range(20):
        step = f(x) / float(np.real(gc.digamma(x)))
        x -= step
        if abs(step) < 1e-15 * x:
            break
    # integer seeds are exact factorial values; snap when indistinguishable
    xr = round(x)
    if xr >= 2 and abs(x - xr) < 1e-12 and math.isclose(math.lgamma(xr), target, abs_tol=1e-15):
        x = float(xr)
    return x


@dataclass(frozen=True)
class LevelSample:
    x: float
    y: float
    slope: float
    residual: float


@dataclass(frozen=True)
class LevelCurveTrace:
    r: float
    samples: tuple[LevelSample, ...]
    x_start: float
    x_end: float

    @property
    def xs(self) -> np.ndarray:
        return np.array([s.x for s in self.samples])

    @property
    def ys(self) -> np.ndarray:
        return np.array([s.y for s in self.samples])

    @property
    def slopes(self) -> np.ndarray:
        return np.array([s.slope for s in self.samples])

    def lower_branch(self) -> list[LevelSample]:
        """Mirror image in the lower quadrant (Gamma commutes with conjugation)."""
        return [LevelSample(s.x, -s.y, -s.slope, s.residual) for s in self.samples]

    def crossing_x(self) -> float | None:
        """First sampled x where y_r(x) >= x, or None inside the window."""
        for s in self.samples:
            if s.y >= s.x:
                return s.x
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "slope", "residual"])
        for s in self.samples:
            w.writerow([f"{s.x:.17g}", f"{s.y:.17g}", f"{s.slope:.17g}", f"{s.residual:.17g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "x_start": self.x_start,
            "x_end": self.x_end,
            "samples": [[s.x, s.y, None if math.isinf(s.slope) else s.slope, s.residual] for s in self.samples],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LevelCurveTrace":
        samples = tuple(
            LevelSample(x, y, math.inf if sl is None else sl, res) for x, y, sl, res in d["samples"]
        )
        return cls(d["r"], samples, d["x_start"], d["x_end"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def sample_residual(x: float, y: float, r: float) -> float:
    """| |Gamma(x+iy)| - r | / r from an independent eval_gamma call."""
    la = gc.eval_gamma(complex(x, y)).value.log_abs
    return abs(math.expm1(la - math.log(r)))


def _correct(x: float, y0: float, logr: float, max_iter: int = 50) -> tuple[float, int]:
    """Newton in y on log|Gamma(x+iy)| = log r, safeguarded by bisection.

    log|Gamma(x+iy)| strictly decreases in y > 0, so the root is unique.
    Returns the root and the number of Newton iterations used.
    """
    lo, hi = 0.0, math.inf
    y = max(y0, 1e-300)
    for it in range(max_iter + 1):
        z = complex(x, y)
        f = float(np.real(gc.loggamma(z))) - logr
        if abs(f) < 1e-13:
            return y, it
        if f > 0:
            lo = max(lo, y)
        else:
            hi = min(hi, y)
        fp = -float(np.imag(gc.digamma(z)))
        step = -f / fp if fp != 0 else math.inf
        y_new = y + step
        if not (lo < y_new < hi) or not math.isfinite(y_new):
            y_new = 0.5 * (lo + hi) if math.isfinite(hi) else 2 * max(y, 1.0)
        if abs(y_new - y) <= 1e-15 * max(1.0, y):
            return y_new, it + 1
        y = y_new
    raise ArithmeticError("corrector did not converge")


def _seed_offset(x: float, logr: float) -> float:
    # near the seed log|Gamma(x+iy)| ~ log Gamma(x) - psi'(x) y^2 / 2
    drop = _log_abs_gamma(x, 0.0) - logr
    return math.sqrt(max(2.0 * drop / gc.trigamma_real(x), 0.0))


def trace_level_curve(r: float, x_end: float, cfg: gc.PrecisionConfig = gc.DEFAULT,
                      K: int = DEFAULT_K) -> LevelCurveTrace:
    """Predictor-corrector continuation of y_r from its real-axis seed to ``x_end``.

    The predictor uses :func:`level_slope`; the corrector is Newton in y.  A step
    whose corrector needs more than three iterations is retried at half the
    step; five easy steps in a row double it (capped at 0.5).
    """
    x0 = real_axis_seed(r)
    if x_end <= x0:
        raise ValueError(f"x_end={x_end!r} must exceed the seed {x0!r}")
    logr = math.log(r)
    samples = [LevelSample(x0, 0.0, math.inf, sample_residual(x0, 0.0, r))]
    x, y, slope = x0, 0.0, math.inf
    h, easy = H_INIT, 0
    while x < x_end - 1e-12:
        h_step = min(h, x_end - x)
        x_new = x + h_step
        y_pred = _seed_offset(x_new, logr) if y == 0.0 else y + h_step * slope
        try:
            y_new, iters = _correct(x_new, y_pred, logr)
            ok = iters <= MAX_CORRECTOR_ITERS and y_new > y
        except ArithmeticError:
            ok = False
        if not ok:
            h *= 0.5
            easy = 0
            if h < H_MIN:
                raise TraceError("corrector failed at minimum step", x)
            continue
        res = sample_residual(x_new, y_new, r)
        if res > 1e-8:
            raise TraceError(f"residual {res:.3g} above 1e-8", x)
        slope = level_slope(x_new, y_new, K)
        samples.append(LevelSample(x_new, y_new, slope, res))
        x, y = x_new, y_new
        easy += 1
        if easy >= GROW_AFTER:
            h = min(2 * h, H_MAX)
            easy = 0
    return LevelCurveTrace(r, tuple(samples), x0, x_end)


def implicit_y(x: float, r: float, y_hint: float | None = None) -> float:
    """y_r(x) by a direct 1-D root solve (no continuation)."""
    from scipy.optimize import brentq

    logr = math.log(r)
    f = lambda t: _log_abs_gamma(x, t) - logr
    if f(0.0) <= 0:
        raise DomainError(f"|Gamma({x})| <= r; no level point above x")
    hi = max(1.0, y_hint or 1.0)
    while f(hi) > 0:
        hi *= 2
    return brentq(f, 0.0, hi, xtol=1e-14, rtol=1e-15)


@dataclass(frozen=True)
class GrowthReport:
    r: float
    ratios_slope: tuple[tuple[float, float], ...]
    ratios_value: tuple[tuple[float, float], ...]
    c_hat: float
    c_prime_hat: float
    x_min: float = 10.0
    crossing_x: float | None = field(default=None)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "x_min": self.x_min,
            "c_hat": self.c_hat,
            "c_prime_hat": self.c_prime_hat,
            "crossing_x": self.crossing_x,
            "ratios_slope": [list(p) for p in self.ratios_slope],
            "ratios_value": [list(p) for p in self.ratios_value],
        }


def growth_ratio_report(trace: LevelCurveTrace, x_min: float = 10.0) -> GrowthReport:
    """y'/log x and y/(x log x) along the trace, with their extreme values for x >= x_min."""
    pts = [s for s in trace.samples if s.x >= x_min]
    if len(pts) < 100:
        raise ValueError(f"need >= 100 samples with x >= {x_min}, got {len(pts)}")
    rs = tuple((s.x, s.slope / math.log(s.x)) for s in pts)
    rv = tuple((s.x, s.y / (s.x * math.log(s.x))) for s in pts)
    allr = [v for _, v in rs] + [v for _, v in rv]
    return GrowthReport(trace.r, rs, rv, min(allr), max(allr), x_min, trace.crossing_x())
