import itertools
import json
import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from gammalab import almost_integer as ai
from gammalab import fiber_solver as fs
from gammalab.almost_integer import LaurentSeries, PuiseuxPoly, Status

X = sympy.Symbol("x")

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)
poly_coeffs = st.lists(rationals, min_size=1, max_size=7)


def P(mapping):
    return PuiseuxPoly.from_exponents(mapping)


def to_sympy(p: PuiseuxPoly):
    return sympy.Add(*[sympy.Rational(c.numerator, c.denominator) * X ** sympy.Rational(k, p.m) for k, c in p.terms.items()])


def from_sympy(expr) -> PuiseuxPoly:
    expr = sympy.expand(expr)
    pairs = {}
    for t in sympy.Add.make_args(expr):
        if t == 0:
            continue
        coef, mono = t.as_independent(X, as_Add=False)
        e = sympy.Integer(0) if mono == 1 else mono.as_base_exp()[1]
        pairs[Fraction(int(e.p), int(e.q))] = Fraction(int(coef.p), int(coef.q))
    return P(pairs)


# --- normal form ---------------------------------------------------------


def test_puiseux_normalization():
    p = PuiseuxPoly(4, {2: 1, 6: Fraction(1, 2), 8: 0})
    assert p.m == 2 and p.terms == {1: 1, 3: Fraction(1, 2)}
    assert PuiseuxPoly(3, {0: 5}).m == 1
    with pytest.raises(ValueError):
        PuiseuxPoly(0, {})


# --- shift ------------------------------------------------------------------


def test_shift_examples():
    assert ai.shift_poly(PuiseuxPoly.polynomial([0, 0, 1])) == PuiseuxPoly.polynomial([1, 2, 1])
    got = ai.shift_poly(P({Fraction(1, 2): 1}), order=3)
    assert got == P({Fraction(1, 2): 1, Fraction(-1, 2): Fraction(1, 2), Fraction(-3, 2): Fraction(-1, 8)})
    assert ai.shift_poly(PuiseuxPoly.polynomial([1])) == PuiseuxPoly.polynomial([1])
    with pytest.raises(ValueError):
        ai.shift_poly(P({Fraction(1, 2): 1}))


@given(poly_coeffs)
def test_shift_matches_sympy(coeffs):
    p = PuiseuxPoly.polynomial(coeffs)
    expected = from_sympy(to_sympy(p).subs(X, X + 1))
    assert ai.shift_poly(p) == expected


def test_shift_fractional_matches_series_oracle():
    # (x+1)^(5/3) = x^(5/3) (1 + 1/x)^(5/3); sympy series in u = 1/x as the oracle
    u = sympy.Symbol("u")
    ser = sympy.series((1 + u) ** sympy.Rational(5, 3), u, 0, 6).removeO()
    want = {Fraction(5, 3) - j: Fraction(int(ser.coeff(u, j).p), int(ser.coeff(u, j).q)) for j in range(6)}
    got = ai.shift_poly(P({Fraction(5, 3): 1}), order=6)
    assert got == P(want)


# --- difference powers ----------------------------------------------------


def test_difference_examples():
    assert ai.difference_power(PuiseuxPoly.polynomial([0, 0, 1]), 2) == PuiseuxPoly.polynomial([2])
    assert ai.difference_power(PuiseuxPoly.polynomial([0, -1, 0, 5]), 3) == PuiseuxPoly.polynomial([30])
    half = PuiseuxPoly.polynomial([0, Fraction(-1, 2), Fraction(1, 2)])
    assert ai.difference_power(half, 3).is_zero
    assert ai.difference_power(half, 0) == half


@given(poly_coeffs, st.integers(0, 5))
def test_operator_algebra(coeffs, k):
    p = PuiseuxPoly.polynomial(coeffs)
    step = ai.difference_power(p, k)
    assert ai.difference_power(p, k + 1) == ai.shift_poly(step) - step


@given(poly_coeffs)
def test_leading_coefficient_identity(coeffs):
    p = PuiseuxPoly.polynomial(coeffs)
    if p.is_zero:
        return
    n = p.top
    assert ai.difference_power(p, n) == PuiseuxPoly.polynomial([math.factorial(n) * p.terms[n]])
    assert ai.difference_power(p, n + 1).is_zero


# --- binomials, Vandermonde ------------------------------------------------


def test_generalized_binom_examples():
    assert ai.generalized_binom(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert ai.generalized_binom(3, 4) == 0
    assert ai.generalized_binom(Fraction(3, 2), 2) == Fraction(3, 8)
    assert ai.generalized_binom(Fraction(-7, 3), 0) == 1


@given(rationals, st.integers(0, 10))
def test_generalized_binom_matches_sympy(z, n):
    ref = sympy.binomial(sympy.Rational(z.numerator, z.denominator), n)
    assert ai.generalized_binom(z, n) == Fraction(int(ref.p), int(ref.q))


@pytest.mark.parametrize("s", range(6))
def test_integer_binomials_vanish_past_top(s):
    assert ai.generalized_binom(s, 1 + s) == 0


@pytest.mark.parametrize("q", range(1, 9))
def test_vandermonde_nonsingular(q):
    nodes = list(range(1, q + 1))
    det = ai.vandermonde_det(nodes)
    ref = sympy.Matrix(q, q, lambda i, j: sympy.Integer(nodes[i]) ** j).det()
    assert det != 0 and det == int(ref)
    assert ai.det_exact(ai.vandermonde(nodes)) == det


def test_solve_exact_round_trip():
    A = ai.vandermonde([1, 2, 3, 4])
    x = [Fraction(1, 2), Fraction(-3), Fraction(0), Fraction(7, 5)]
    b = [sum(a * v for a, v in zip(row, x)) for row in A]
    assert ai.solve_exact(A, b) == x


# --- valuation ----------------------------------------------------------


def test_valuation_examples():
    assert ai.valuation(LaurentSeries(((1, Fraction(1)), (2, Fraction(1))))) == 1
    assert ai.valuation(LaurentSeries(())) == math.inf
    assert ai.valuation(LaurentSeries(((-2, Fraction(3)), (1, Fraction(1))))) == -2


laurent = st.lists(st.tuples(st.integers(-4, 6), rationals), min_size=1, max_size=6).map(
    lambda ts: LaurentSeries(tuple(sorted(dict(ts).items())), order=12)
)


@given(laurent)
def test_valuation_preserved_by_shift(s):
    assert ai.valuation(s.shift()) == ai.valuation(s)


def test_laurent_rejects_unsorted():
    with pytest.raises(ValueError):
        LaurentSeries(((2, Fraction(1)), (1, Fraction(1))))


# --- decision stages -----------------------------------------------------


def test_fractional_examples():
    v = ai.fractional_obstruction(P({Fraction(3, 2): 1}))
    assert v.status is Status.NOT_ALMOST_INTEGER and "a_3" in v.witness
    assert ai.fractional_obstruction(PuiseuxPoly.polynomial([0, 1, 1])) is None
    v = ai.fractional_obstruction(P({1: 1, Fraction(1, 3): 1, 0: 1}))
    assert v.status is Status.NOT_ALMOST_INTEGER and "1x1" in v.witness


def test_integer_valued_examples():
    v = ai.integer_valued_verdict(PuiseuxPoly.polynomial([0, Fraction(-1, 2), Fraction(1, 2)]))
    assert v.status is Status.INTEGER_VALUED and v.denominator_ell == 2
    v = ai.integer_valued_verdict(PuiseuxPoly.polynomial([0, 0, Fraction(1, 3)]))
    assert v.status is Status.NOT_ALMOST_INTEGER and v.stage == "ladder"
    misses = [n for n in range(1, 61) if abs(Fraction(n * n, 3) - round(Fraction(n * n, 3))) >= Fraction(1, 3)]
    assert len(misses) == 40
    assert ai.decide(PuiseuxPoly.polynomial([7])).denominator_ell == 1
    assert ai.constant_stage(PuiseuxPoly.polynomial([7])).status is Status.CONSTANT


def test_half_square_rejected_by_integrality():
    # 2! * (1/2) = 1 passes the ladder, but f(1) = 1/2
    v = ai.decide(PuiseuxPoly.polynomial([0, 0, Fraction(1, 2)]))
    assert v.status is Status.NOT_ALMOST_INTEGER and v.stage == "integrality"


def test_negative_exponents_rejected():
    v = ai.decide(P({2: 1, -1: 1}))
    assert v.status is Status.NOT_ALMOST_INTEGER and v.stage == "tail"
    v = ai.decide(P({0: 3, -2: Fraction(1, 5)}))
    assert v.status is Status.NOT_ALMOST_INTEGER and v.stage == "constant"


def test_integer_verdict_requires_ell():
    with pytest.raises(ValueError):
        ai.Verdict(Status.INTEGER_VALUED, "x")


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=6), min_size=1, max_size=5))
def test_decide_matches_sampling_oracle(coeffs):
    # integer-valued polynomials are exactly those with integer values at 0..60
    p = PuiseuxPoly.polynomial(coeffs)
    sampled = all(p(n).denominator == 1 for n in range(61))
    v = ai.decide(p)
    assert v.accepted == sampled
    if v.accepted:
        assert all((v.denominator_ell * p(n)).denominator == 1 for n in range(61))


@given(poly_coeffs, st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(5, 4), Fraction(7, 2)]),
       st.fractions(min_value=-3, max_value=3, max_denominator=5).filter(lambda c: c != 0))
def test_fractional_ingredient_always_rejected(coeffs, e, c):
    base = {k: v for k, v in enumerate(coeffs)}
    base[e] = base.get(e, 0) + c
    v = ai.decide(P(base))
    assert v.status is Status.NOT_ALMOST_INTEGER


def test_irrational_ingredient_rejected():
    assert ai.decide_text("sqrt(2)*x^2 + x").status is Status.NOT_ALMOST_INTEGER
    assert ai.decide_text("pi").status is Status.NOT_ALMOST_INTEGER


def test_binomial_basis_exhaustive():
    # every sum c_i C(x, i), deg <= 6, c_i in {-2..2}
    rejected = 0
    for cs in itertools.product(range(-2, 3), repeat=7):
        num, den = ai.binomial_combination_int(cs)
        if not ai.ladder_int(num, den).accepted:
            rejected += 1
    assert rejected == 0


def test_binomial_basis_forms_agree():
    cs = [1, -2, 0, 1, 2, 0, -1]
    p = PuiseuxPoly.binomial_basis(cs)
    num, den = ai.binomial_combination_int(cs)
    assert all(p(n) == Fraction(sum(c * n**k for k, c in enumerate(num)), den) for n in range(-5, 10))
    assert ai.decide(p).accepted


# --- text input ---------------------------------------------------------------


@pytest.mark.parametrize(
    "text,status",
    [
        ("x*(x-1)/2", Status.INTEGER_VALUED),
        ("x^(3/2)", Status.NOT_ALMOST_INTEGER),
        ("x^2/3", Status.NOT_ALMOST_INTEGER),
        ("binomial(x, 3) - 2*C(x, 2)", Status.INTEGER_VALUED),
        ("0", Status.INTEGER_VALUED),
        ("x + x^(1/3) + 1", Status.NOT_ALMOST_INTEGER),
    ],
)
def test_decide_text(text, status):
    assert ai.decide_text(text).status is status


@pytest.mark.parametrize("text", ["x^y", "0.5*x", "sin(x)", "x^(", "x^sqrt(2)"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        ai.parse_puiseux(text)


def test_verdict_json():
    v = ai.decide_text("x*(x-1)/2")
    d = json.loads(v.to_json())
    assert d["status"] == "integer_valued" and d["denominator_ell"] == 2 and d["witness"]


# --- numeric fit --------------------------------------------------------------


def test_fit_exact_integers():
    r = ai.almost_integer_fit([(n, n * n + 3) for n in range(1, 21)], 1.0)
    assert r.ok and r.nearest == tuple(n * n + 3 for n in range(1, 21))


def test_fit_constant_offset_fails():
    r = ai.almost_integer_fit([(n, n + 0.4) for n in range(1, 21)], 1.0)
    assert not r.ok and r.witness is not None


def test_fit_left_fibers():
    samples = []
    for n in range(5, 26):
        p = fs.left_fiber(1, n)
        samples.append((n, n - p.offset))
    r = ai.almost_integer_fit(samples, 1.0)
    assert r.ok and r.nearest == tuple(range(5, 26))


def test_fit_ties_go_up_and_imaginary_fails():
    r = ai.almost_integer_fit([(n, n + 0.5) for n in range(1, 11)], 1.0)
    assert r.nearest == tuple(n + 1 for n in range(1, 11))
    r = ai.almost_integer_fit([(n, complex(n, 0.01)) for n in range(1, 21)], 1.0)
    assert not r.ok


def test_fit_sensitivity_and_errors():
    samples = [(n, n + 0.5 * math.exp(-n)) for n in range(1, 21)]
    r = ai.almost_integer_fit(samples, 1.0)
    assert r.ok and r.sensitivity == {"0.1": False, "10": True}
    with pytest.raises(ValueError):
        ai.almost_integer_fit(samples[:5], 1.0)
    with pytest.raises(ValueError):
        ai.almost_integer_fit(samples[::-1], 1.0)
