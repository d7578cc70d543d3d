import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from gammalab import gamma_core as gc
from gammalab.errors import DomainError, PoleError


def mp_gamma(z):
    return complex(mpmath.gamma(mpmath.mpc(z)))


def mp_loggamma(z):
    return complex(mpmath.loggamma(mpmath.mpc(z)))


def off_pole(z, tol=1e-3):
    n = round(z.real)
    return not (n <= 0 and abs(z - n) < tol)


coords = st.floats(-20, 20, allow_nan=False)
points = st.builds(complex, coords, coords).filter(off_pole)


# --- principal_arg --------------------------------------------------------


def test_principal_arg_examples():
    assert gc.principal_arg(1, 0) == 0
    assert gc.principal_arg(-1, 0) == math.pi
    assert gc.principal_arg(0, -1) == pytest.approx(-math.pi / 2, abs=1e-15)
    with pytest.raises(DomainError):
        gc.principal_arg(0, 0)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_principal_arg_matches_atan2(re, im):
    assume(re != 0 or im != 0)
    a = gc.principal_arg(re, im)
    assert -math.pi < a <= math.pi
    assert a == pytest.approx(math.atan2(im, re) if (im != 0 or re > 0) else math.pi, abs=1e-12)


# --- precision config -----------------------------------------------------


@pytest.mark.parametrize("kw", [dict(working_digits=10), dict(series_truncation_K=50), dict(tol_residual=0.0),
                                dict(stirling_terms=0)])
def test_precision_config_rejects_invalid(kw):
    with pytest.raises(ValueError):
        gc.PrecisionConfig(**kw)


def test_precision_from_env():
    assert gc.precision_from_env({}) == gc.DEFAULT
    cfg = gc.precision_from_env({"GAMMALAB_DIGITS": "40"})
    assert cfg.working_digits == 40 and cfg.extended


# --- eval_gamma -----------------------------------------------------------


def test_eval_gamma_examples():
    assert gc.gamma(2) == pytest.approx(1.0, rel=1e-13)
    assert gc.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    g = gc.eval_gamma(-5.5)
    # recurrence chain from Gamma(1/2): Gamma(-5.5) m_6(-5.5) = Gamma(0.5)
    chain = g.complex * gc.pochhammer(-5.5, 6)
    assert abs(chain - math.sqrt(math.pi)) < 1e-10 * math.sqrt(math.pi)
    assert g.backend is gc.Backend.REFLECTION


def test_eval_gamma_pole_error():
    with pytest.raises(PoleError) as exc:
        gc.eval_gamma(-3 + 1e-14)
    assert exc.value.pole == -3


@given(points)
def test_eval_gamma_matches_mpmath(z):
    v = gc.eval_gamma(z)
    ref = mp_loggamma(z)
    # compare in log form: modulus and argument mod 2 pi
    assert abs(v.value.log_abs - ref.real) <= 1e-12 * max(1.0, abs(ref.real))
    assert abs(np.exp(1j * (v.value.arg_cont - ref.imag)) - 1) <= 1e-11 * max(1.0, abs(ref))
    assert 0 <= v.error_estimate < 1e-11


@given(points)
def test_error_estimate_covers_error(z):
    v = gc.eval_gamma(z)
    ref = mpmath.loggamma(mpmath.mpc(z))
    err = float(abs(mpmath.exp(mpmath.mpc(v.value.log) - ref) - 1))
    if abs(v.value.arg_cont) < 1e6:
        # arguments differ by multiples of 2 pi between branches; reduce
        assert err <= v.error_estimate or err <= 5e-14


def test_extended_precision_path():
    cfg = gc.DEFAULT.with_digits(40)
    v = gc.eval_gamma(3.3 - 2.1j, cfg)
    assert abs(v.complex - mp_gamma(3.3 - 2.1j)) <= 1e-15 * abs(v.complex)
    with mpmath.workdps(45):
        got = gc.mp_loggamma(mpmath.mpc("0.7", "11.2"), 40)
        ref = mpmath.loggamma(mpmath.mpc("0.7", "11.2"))
        assert abs(got - ref) < mpmath.mpf(10) ** -38


def test_complex_sample_invariants():
    for z in [2 + 3j, -4.5 + 0.2j, 0.1 - 7j, 30 + 1j]:
        s = gc.eval_gamma(z).value
        assert math.exp(s.log_abs) * math.cos(s.arg_cont) == pytest.approx(s.re, rel=1e-10, abs=1e-300)
        diff = s.arg_cont - gc.principal_arg(s.re, s.im)
        assert abs(diff / (2 * math.pi) - round(diff / (2 * math.pi))) < 1e-9


def test_overflowing_value_keeps_log_form():
    v = gc.eval_gamma(300)
    assert math.isinf(v.value.re)
    assert v.value.log_abs == pytest.approx(math.lgamma(300), rel=1e-14)


# --- eval_log_gamma -------------------------------------------------------


def test_eval_log_gamma_examples():
    lf = sum(math.log(k) for k in range(1, 171))
    assert gc.eval_log_gamma(171).log_abs == pytest.approx(lf, rel=1e-14)
    assert abs(gc.eval_log_gamma(1).log) < 1e-14
    L = gc.eval_log_gamma(2 + 3j).log
    assert abs(np.exp(L) - gc.gamma(2 + 3j)) <= 1e-12 * abs(gc.gamma(2 + 3j))
    with pytest.raises(DomainError):
        gc.eval_log_gamma(-2.5)


@given(points.filter(lambda z: z.imag != 0))
def test_eval_log_gamma_is_principal_branch(z):
    got = gc.eval_log_gamma(z).log
    ref = mp_loggamma(z)
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


def test_log_gamma_continuous_along_path():
    # a path around the origin in the upper half plane, then down to Re z = -15
    t = np.linspace(0, 1, 4001)
    path = np.concatenate([3 * np.exp(1j * np.pi * t[:-1]) + 0.5j, -3 + 0.5j - 12 * t])
    L = np.array([gc.eval_log_gamma(z).log for z in path])
    jumps = np.abs(np.diff(L.imag))
    assert jumps.max() < 0.1


# --- weierstrass_partial --------------------------------------------------


def test_weierstrass_examples():
    assert abs(gc.weierstrass_partial(1, 10**6) - 1) < 1e-5
    assert abs(gc.weierstrass_partial(-0.5, 10**6) + 2 * math.sqrt(math.pi)) < 1e-4
    vals = [gc.weierstrass_partial(3, K) for K in (10, 100, 1000, 10000)]
    gaps = [abs(v - 2) for v in vals]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    with pytest.raises(PoleError):
        gc.weierstrass_partial(-2, 10)


@pytest.mark.parametrize("z", [0.3 + 0.4j, 2.5 - 1j, -1.5 + 2j, 4.9, -3.3 - 0.5j, 1j])
def test_backends_agree(z):
    w = gc.weierstrass_partial(z, 10**6)
    g = gc.gamma(z)
    assert abs(w - g) <= 1e-4 * abs(g)


# --- pochhammer -----------------------------------------------------------


def test_pochhammer_examples():
    assert gc.pochhammer(3, 2) == 12
    assert gc.pochhammer(0.5, -2) == pytest.approx(4 / 3)
    assert gc.pochhammer(7, 0) == 1
    z = 0.7 + 0.1j
    assert abs(gc.pochhammer(z, 5) - mp_gamma(z + 5) / mp_gamma(z)) <= 1e-10 * abs(gc.pochhammer(z, 5))
    with pytest.raises(PoleError):
        gc.pochhammer(2, -3)


@given(points, st.integers(-6, 6))
def test_pochhammer_identity(z, k):
    assume(off_pole(z + k) and all(abs(z - j) > 1e-3 for j in range(1, -k + 1)))
    lhs = gc.gamma(z + k)
    rhs = gc.pochhammer(z, k) * gc.gamma(z)
    assert abs(lhs - rhs) <= 1e-10 * abs(lhs)


# --- functional equations ---------------------------------------------------


def test_reflection_examples():
    assert gc.reflection_residual(0.5) < 1e-12
    assert gc.reflection_residual(0.3 + 2j) < 1e-10
    assert gc.reflection_residual(-7.4) < 1e-10
    with pytest.raises(DomainError):
        gc.reflection_residual(3.0)


def test_multiplication_examples():
    assert gc.multiplication_residual(1, 2) < 1e-12
    assert gc.multiplication_residual(0.8 + 0.3j, 3) < 1e-10
    assert gc.multiplication_residual(5, 2) < 1e-12
    with pytest.raises(ValueError):
        gc.multiplication_residual(1, 1)


@given(points)
def test_functional_equations_hold(z):
    assume(off_pole(z + 1) and z.imag != 0)
    assert gc.recurrence_residual(z) <= 1e-10
    assert gc.reflection_residual(z) <= 1e-10
    for n in (2, 3):
        assert gc.multiplication_residual(z, n) <= 1e-10


def test_residuals_detect_a_wrong_value():
    # the residual machinery must be able to fail: perturb one side
    z = 2.3 + 1.1j
    bad = gc.loggamma(z + 1) + 1e-6 - np.log(z) - gc.loggamma(z, gc.ALT_THRESHOLD)
    assert gc.rel_residual_from_log(bad) > 5e-7


def test_conjugation_symmetry():
    rng = np.random.default_rng(11)
    z = rng.uniform(-20, 20, 500) + 1j * rng.uniform(-20, 20, 500)
    for w in z:
        a, b = gc.gamma(w.conjugate()), gc.gamma(w).conjugate()
        assert abs(a - b) <= 1e-10 * abs(b)


@pytest.mark.parametrize("x", [-5.5, -4.5, 1.5, 2.5])
def test_vertical_decay(x):
    y = np.linspace(0, 10, 101)
    la = [gc.eval_gamma(complex(x, v)).value.log_abs for v in y]
    assert all(b < a for a, b in zip(la, la[1:]))


@given(st.floats(1e-3, 150))
def test_positive_on_positive_axis(x):
    v = gc.eval_gamma(x)
    assert v.value.im == 0 and v.value.re > 0


# --- Stirling ---------------------------------------------------------------


def test_stirling_mu_examples():
    assert abs(gc.stirling_mu(100)) < 1 / 1200 + 1e-6
    assert abs(gc.stirling_mu(10j)) < 1
    assert abs(gc.stirling_mu(1e6)) < 1e-6
    with pytest.raises(DomainError):
        gc.stirling_mu(-1.0)


@pytest.mark.parametrize("sign", [1, -1])
def test_stirling_mu_decreases_along_rays(sign):
    vals = [abs(gc.stirling_mu(r * np.exp(sign * 0.75j * np.pi))) for r in (10, 100, 1000)]
    assert vals[0] > vals[1] > vals[2]


@given(st.floats(0.5, 60), st.floats(-60, 60))
def test_stirling_mu_agrees_with_mpmath(x, y):
    z = complex(x, y)
    with mpmath.workdps(40):
        zm = mpmath.mpc(z)
        ref = complex(mpmath.loggamma(zm) - (zm - 0.5) * mpmath.log(zm) + zm - mpmath.log(2 * mpmath.pi) / 2)
    assert abs(gc.stirling_mu(z) - ref) < 1e-12 * max(1.0, abs(z))


def test_stirling_fractions_are_bernoulli_terms():
    # B_2/(1*2) = 1/12, B_4/(3*4) = -1/360, B_6/(5*6) = 1/1260
    assert gc.stirling_fractions(3) == (Fraction(1, 12), Fraction(-1, 360), Fraction(1, 1260))


def test_stirling_bounds_examples():
    assert gc.stirling_bounds_check(50)
    assert gc.stirling_bounds_check(20 + 20j)
    assert gc.stirling_bounds_check(5 + 80j)
    with pytest.raises(DomainError):
        gc.stirling_bounds_check(-30 + 1j)
    with pytest.raises(DomainError):
        gc.stirling_bounds_check(5)


def test_sector_constant_validated():
    assert gc.sector_constant(gc.SECTOR_THETA) == 10
    assert gc.validate_sector_constant(count=10**4) < 1
    with pytest.raises(DomainError):
        gc.sector_constant(0.9 * math.pi)


# --- constants --------------------------------------------------------------


def test_constants():
    c = gc.constants()
    n = 10**6
    h = math.fsum(1 / k for k in range(1, n + 1))
    assert abs(h - math.log(n) - c.euler_gamma) < 1 / n
    assert 1.46 < c.alpha_root < 1.47
    assert abs(complex(mpmath.digamma(c.alpha_root))) < 1e-10
    assert c.alpha_root == pytest.approx(float(mpmath.findroot(mpmath.digamma, 1.46)), abs=1e-14)
    assert gc.gamma_min_positive() == pytest.approx(float(mpmath.gamma(mpmath.findroot(mpmath.digamma, 1.46))),
                                                    rel=1e-13)


@given(points)
def test_digamma_matches_mpmath(z):
    ref = complex(mpmath.digamma(mpmath.mpc(z)))
    assert abs(complex(gc.digamma(z)) - ref) <= 1e-11 * max(1.0, abs(ref))


def test_log_sin_pi_large_imaginary():
    z = 0.3 + 400j
    ref = complex(mpmath.log(mpmath.sinpi(mpmath.mpc(z))))
    got = complex(gc.log_sin_pi(z))
    assert abs(np.exp(1j * (got.imag - ref.imag)) - 1) < 1e-12
    assert got.real == pytest.approx(ref.real, rel=1e-14)
