import itertools
import math

import mpmath
import numpy as np
import pytest
import sympy

from gammalab import bialgebraic_lab as bl
from gammalab.errors import ConditioningError, SamplingError

THREE_TERM = {(0, 2, 0): 1, (1, 1, 0): 1, (1, 0, 1): -1}


def mp_gamma_array(pts):
    return np.array([[complex(mpmath.gamma(mpmath.mpc(z))) for z in row] for row in pts])


# --- varieties and sampling -------------------------------------------------


def test_variety_spec_validation():
    with pytest.raises(ValueError):
        bl.VarietySpec.parametrized(["t1"])  # not proper
    with pytest.raises(ValueError):
        bl.VarietySpec.parametrized(["t1", "s"])
    with pytest.raises(ValueError):
        bl.VarietySpec.implicit(["X1 - X1"])
    spec = bl.VarietySpec.from_text("param: t1, t1 + 1")
    assert spec.kind == "parametrized" and spec.ambient_dim == 2 and spec.n_params == 1
    spec = bl.VarietySpec.from_text("implicit: X1*X2 - 1")
    assert spec.kind == "implicit" and spec.ambient_dim == 2
    with pytest.raises(ValueError):
        bl.VarietySpec.from_text("what: X1")


def test_sample_examples():
    diag = bl.sample_variety(bl.VarietySpec.parametrized(["t1", "t1"]), 50, seed=1)
    assert diag.shape == (50, 2) and np.all(diag[:, 0] == diag[:, 1])
    line = bl.sample_variety(bl.VarietySpec.parametrized(["t1", "t1 + 1", "t1 + 2"]), 100, seed=2)
    assert line.shape == (100, 3)
    assert np.allclose(line[:, 1] - line[:, 0], 1) and np.allclose(line[:, 2] - line[:, 0], 1 + 1)
    # implicit X1 X2 = 1, parametrized by the caller
    hyp = bl.sample_variety(bl.VarietySpec.parametrized(["t1", "1/t1"]), 30, seed=3)
    assert np.allclose(hyp[:, 0] * hyp[:, 1], 1)


def test_sample_determinism_and_pole_avoidance():
    spec = bl.VarietySpec.parametrized(["t1", "t1 - 3"])
    region = bl.Region(-6, 0.4, -0.3, 0.3)
    a = bl.sample_variety(spec, 200, region, seed=7)
    b = bl.sample_variety(spec, 200, region, seed=7)
    assert np.array_equal(a, b)
    n = np.round(a.real)
    assert not np.any((n <= 0) & (np.abs(a - n) < 1e-6))


def test_sample_errors():
    spec = bl.VarietySpec.parametrized(["t1", "t1"])
    with pytest.raises(ValueError):
        bl.sample_variety(spec, 5)
    with pytest.raises(ValueError):
        bl.sample_variety(bl.VarietySpec.implicit(["X1 - X2"]), 50)
    with pytest.raises(SamplingError):
        bl.sample_variety(spec, 50, bl.Region(-2.0 - 1e-8, -2.0 + 1e-8, -1e-8, 1e-8))


# --- gamma push ---------------------------------------------------------------


def test_push_examples():
    r = bl.gamma_push([[2, 2], [0.5, 3]])
    assert np.allclose(r.values[0], [1, 1], rtol=1e-13)
    assert np.allclose(r.values[1], [math.sqrt(math.pi), 2], rtol=1e-13)
    r = bl.gamma_push([[2, 3], [-5 + 1e-9, 1.5]])
    assert r.kept == (0,) and r.skipped == ((1, 0, -5),)


def test_push_matches_mpmath():
    pts = bl.sample_variety(bl.VarietySpec.parametrized(["t1", "t1 + 1", "2*t1"]), 40, seed=4)
    r = bl.gamma_push(pts)
    ref = mp_gamma_array(pts)
    assert np.all(np.abs(r.values - ref) <= 1e-12 * np.abs(ref))
    assert np.all(r.max_error < 1e-12)


def test_push_flags_vanishing_derivative():
    alpha = float(mpmath.findroot(mpmath.digamma, 1.46))
    r = bl.gamma_push([[alpha, 3.0]])
    assert r.jacobian_vanishing == ((0, 0),)


# --- relation rank -------------------------------------------------------------


def test_monomials_count():
    for n in (1, 2, 3):
        for D in (1, 2, 3, 4):
            assert len(bl.monomials(n, D)) == math.comb(n + D, n)
    assert bl.monomials(2, 1) == [(0, 0), (1, 0), (0, 1)]


def push(spec_coords, count, seed, region=bl.DEFAULT_REGION):
    spec = bl.VarietySpec.parametrized(spec_coords)
    return bl.gamma_push(bl.sample_variety(spec, count, region, seed)).values


def test_diag_relation():
    rep = bl.relation_rank(push(["t1", "t1"], 100, 0), 1)
    assert rep.est_dimension == 1 and rep.kernel_dim == 1
    assert bl.kernel_similarity(rep, {(1, 0): 1, (0, 1): -1}) >= 0.999
    assert rep.holdout_residual <= 1e-6


def test_three_term_relation():
    rep = bl.relation_rank(push(["t1", "t1 + 1", "t1 + 2"], 200, 1), 2)
    assert rep.est_dimension == 2
    assert bl.kernel_similarity(rep, THREE_TERM) >= 0.999
    assert rep.holdout_residual <= 1e-6


def test_shifted_line_has_no_relation():
    vals = push(["t1", "t1 + 1"], 400, 2)
    for D in range(1, 5):
        rep = bl.relation_rank(vals, D)
        assert rep.kernel_dim == 0 and rep.kernel_coeffs is None
        assert rep.est_dimension == 2


def test_generic_points_full_rank():
    rng = np.random.default_rng(9)
    pts = rng.uniform(0.5, 2, (250, 2)) * np.exp(1j * rng.uniform(-np.pi, np.pi, (250, 2)))
    for D in range(1, 5):
        rep = bl.relation_rank(pts, D)
        assert rep.rank == len(rep.monomials) and rep.est_dimension == 2
        assert rep.rank_profile == tuple(bl.reference_profile(2, D))


def test_planted_relation_found():
    rng = np.random.default_rng(10)
    t = rng.uniform(0.5, 2, 250) * np.exp(1j * rng.uniform(-np.pi, np.pi, 250))
    pts = np.column_stack([t, t * t - 3 * t + 1])
    rep = bl.relation_rank(pts, 2)
    assert rep.kernel_dim == 1 and rep.est_dimension == 1
    planted = {(0, 1): 1, (2, 0): -1, (1, 0): 3, (0, 0): -1}
    assert bl.kernel_similarity(rep, planted) >= 0.999
    v = np.array(rep.kernel_basis[0])
    assert bl.cosine_similarity(v, bl.relation_vector(planted, rep.monomials)) >= 0.999


@pytest.mark.parametrize("k", [2, 3, 4])
def test_diag_in_higher_dimension(k):
    rep = bl.relation_rank(push(["t1"] * k, 150, k), 1)
    assert rep.kernel_dim == k - 1 and rep.est_dimension == 1
    for i in range(k - 1):
        eq = {tuple(int(j == i) for j in range(k)): 1, tuple(int(j == i + 1) for j in range(k)): -1}
        assert bl.kernel_similarity(rep, eq) >= 0.999


def test_recurrence_projection():
    # (z, Gamma(z), Gamma(z+1)): coordinates 1 and 2 of the three-term line pushed, plus z itself
    spec = bl.VarietySpec.parametrized(["t1", "t1 + 1"])
    pts = bl.sample_variety(spec, 300, bl.DEFAULT_REGION, 5)
    vals = np.column_stack([pts[:, 0], bl.gamma_push(pts).values])
    rep = bl.relation_rank(vals, 2)
    assert bl.kernel_similarity(rep, {(0, 0, 1): 1, (1, 1, 0): -1}) >= 0.999
    assert rep.holdout_residual <= 1e-6


def test_relation_rank_errors():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        bl.relation_rank(rng.uniform(1, 2, (10, 2)), 2)
    wide = np.column_stack([np.exp(np.linspace(-20, 20, 100)), np.ones(100) + 0.1j])
    with pytest.raises(ConditioningError):
        bl.relation_rank(wide, 1)


def test_report_to_dict():
    rep = bl.relation_rank(push(["t1", "t1"], 60, 0), 1)
    d = rep.to_dict()
    assert d["kernel_dim"] == 1 and len(d["kernel_coeffs"]) == 3
    assert d["singular_values"] == sorted(d["singular_values"], reverse=True)
    assert 0 <= d["est_dimension"] <= d["ambient_dim"]


# --- classifier -------------------------------------------------------------------


def test_classifier_examples():
    c = bl.classify_trivially_bialgebraic(["X1 - X2", "X3 - 5"])
    assert c.trivial and (1, 2) in c.classes and c.pinned == {3: 5}
    assert not bl.classify_trivially_bialgebraic(["X2 - X1 - 1"]).trivial
    assert bl.classify_trivially_bialgebraic(["2*X1 - 2*X3"]).trivial
    with pytest.raises(ValueError):
        bl.classify_trivially_bialgebraic(["X1 - X1"])


def expected_trivial(coefs, monos, k):
    # oracle: collect the linear form by hand over the monomial list
    lin = {}
    for c, m in zip(coefs, monos):
        if c:
            lin[m] = lin.get(m, 0) + c
    lin = {m: c for m, c in lin.items() if c}
    if any(len(m) == 2 for m in lin):
        return False
    if len(lin) == 1:
        return True
    if len(lin) == 2:
        a, b = lin.values()
        return a + b == 0 and k == 0
    return False


def test_classifier_soundness_small_grammar():
    X = sympy.symbols("X1:4")
    linear = [(i,) for i in range(3)]
    quad = [(i, j) for i in range(3) for j in range(i, 3)]
    monos = linear + quad
    checked = 0
    for m1, m2 in itertools.combinations(monos, 2):
        for c1, c2, k in itertools.product((1, -1, 2), (0, 1, -1, -2), (0, 3)):
            expr = c1 * sympy.Mul(*[X[i] for i in m1]) + c2 * sympy.Mul(*[X[i] for i in m2]) + k
            if sympy.expand(expr) == 0 or not expr.free_symbols:
                continue
            got = bl.classify_trivially_bialgebraic([expr]).trivial
            assert got == expected_trivial((c1, c2), (m1, m2), k), expr
            checked += 1
    assert checked == 864


# --- decay probe -----------------------------------------------------------------


def test_probe_diagonal():
    tab = bl.negative_integer_probe(bl.VarietySpec.implicit(["X1 - X2"]), "x", range(1, 21))
    assert all(r.gap == 0 and -r.branch_value == r.n for r in tab.rows)
    assert tab.fit.ok


def test_probe_linear_curve_disagrees_with_classifier():
    tab = bl.negative_integer_probe(bl.VarietySpec.implicit(["X1 + X2 - 1"]), "1 - x", range(1, 21))
    assert all(r.gap == 0 and r.nearest_int == 1 + r.n for r in tab.rows)
    assert not bl.classify_trivially_bialgebraic(["X1 + X2 - 1"]).trivial


def test_probe_square_root_branch():
    tab = bl.negative_integer_probe(bl.VarietySpec.implicit(["X2**2 - X1"]), "sqrt(x)", range(1, 21))
    assert sum(r.gap > 0.5 for r in tab.rows) >= 10
    assert not tab.fit.ok


def test_probe_left_fiber_branch_gets_bound():
    # a branch sampled from the certified fibers of Gamma = 2: Gamma(b_n) is constant.
    # Doubles resolve z_n + n only while 1/n! is well above eps * n, hence n <= 10.
    from gammalab import fiber_solver as fs

    vals = {n: fs.left_fiber(2, n).z for n in range(6, 11)}
    tab = bl.negative_integer_probe(bl.VarietySpec.implicit(["X1 - X2"]), lambda x: vals[int(-x)], range(6, 11))
    assert tab.constant is not None and abs(tab.constant - 2) < 1e-8
    for r in tab.rows:
        assert r.bound_log is not None and math.log(r.gap) <= r.bound_log
    assert tab.to_csv().splitlines()[0].startswith("n,")
    assert tab.fit is None and any("fewer than 10" in s for s in tab.notes)


def test_probe_skips_undefined_rows():
    tab = bl.negative_integer_probe(bl.VarietySpec.implicit(["X1*X2 - 1"]), lambda x: 1 / (x + 3), range(1, 6))
    assert [r.n for r in tab.rows] == [1, 2, 4, 5]
    assert any("n=3" in s for s in tab.notes)


# --- hypersurface ---------------------------------------------------------------


def test_hypersurface_examples():
    st = bl.hypersurface_demo(100, seed=0)
    assert st.passed and st.max_residual <= 1e-9 and st.median_residual <= st.max_residual
    assert bl.hypersurface_residual(1.0) < 1e-14
    assert bl.hypersurface_residual(10 + 3j) <= 1e-10
    with pytest.raises(ValueError):
        bl.hypersurface_demo(10)


def test_hypersurface_residual_detects_wrong_relation():
    # X2^2 + X1 X2 = X1 X3 fails if the third coordinate is shifted by 3 instead of 2
    z = 2.2 + 0.7j
    g = [complex(mpmath.gamma(z + k)) for k in (0, 1, 3)]
    assert abs(g[1] ** 2 + g[0] * g[1] - g[0] * g[2]) > 1e-3 * abs(g[0] * g[2])
