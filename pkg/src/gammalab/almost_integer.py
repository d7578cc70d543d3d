"""Exact tests for almost-integer-valued algebraic functions.

A function f is almost-integer-valued when |f(n) - m_n| < C e^(-n) for
integers m_n and all large n.  For a finite Puiseux expansion at infinity the
decision runs in four exact stages: bounded inputs must be constant, negative
exponents are ruled out through (sigma - 1)^N, fractional exponents through a
Vandermonde elimination, and the remaining polynomial must pass the
leading-coefficient ladder (sigma - 1)^n g = n! b_n and be integer-valued.

Everything here is ``fractions.Fraction`` arithmetic; nothing is rounded.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Mapping, NamedTuple, Sequence

import sympy

Rational = Fraction | int


class Status(str, Enum):
    INTEGER_VALUED = "integer_valued"
    NOT_ALMOST_INTEGER = "not_almost_integer"
    CONSTANT = "constant"
    UNDECIDED_NUMERIC = "undecided_numeric"


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: str
    denominator_ell: int | None = None
    stage: str = ""
    truncation_order: int | None = None

    def __post_init__(self):
        if self.status is Status.INTEGER_VALUED and self.denominator_ell is None:
            raise ValueError("integer_valued verdicts carry the denominator ell")

    @property
    def accepted(self) -> bool:
        return self.status is Status.INTEGER_VALUED

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "witness": self.witness,
            "denominator_ell": self.denominator_ell,
            "stage": self.stage,
            "truncation_order": self.truncation_order,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# exact helpers


def generalized_binom(z: Rational, n: int) -> Fraction:
    """z (z-1) ... (z-n+1) / n!, exactly."""
    if n < 0:
        raise ValueError("n must be >= 0")
    z = Fraction(z)
    num = Fraction(1)
    for i in range(n):
        num *= z - i
    return num / math.factorial(n)


def det_exact(rows: Sequence[Sequence[Rational]]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    a = [[Fraction(v) for v in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def solve_exact(rows: Sequence[Sequence[Rational]], rhs: Sequence[Rational]) -> list[Fraction]:
    """Solve a nonsingular square system exactly."""
    n = len(rows)
    a = [[Fraction(v) for v in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def vandermonde(nodes: Sequence[Rational], size: int | None = None) -> list[list[Fraction]]:
    size = len(nodes) if size is None else size
    return [[Fraction(q) ** s for s in range(size)] for q in nodes]


def vandermonde_det(nodes: Sequence[Rational]) -> Fraction:
    """prod_{i<j} (x_j - x_i)."""
    out = Fraction(1)
    for j in range(len(nodes)):
        for i in range(j):
            out *= Fraction(nodes[j]) - Fraction(nodes[i])
    return out


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


# ---------------------------------------------------------------------------
# Puiseux polynomials


@dataclass(frozen=True)
class PuiseuxPoly:
    """Finite sum of a_k x^(k/m) with exact rational a_k; k may be negative."""

    m: int
    terms: Mapping[int, Fraction]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        clean = {int(k): Fraction(v) for k, v in self.terms.items() if Fraction(v) != 0}
        g = reduce(math.gcd, clean.keys(), self.m)
        m = self.m // g
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "terms", {k // g: v for k, v in sorted(clean.items())})

    @classmethod
    def from_exponents(cls, pairs: Mapping[Rational, Rational] | Iterable[tuple[Rational, Rational]]) -> "PuiseuxPoly":
        """Build from {exponent: coefficient} with rational exponents."""
        items = list(pairs.items()) if isinstance(pairs, Mapping) else list(pairs)
        exps = [Fraction(e) for e, _ in items]
        m = reduce(_lcm, (e.denominator for e in exps), 1)
        acc: dict[int, Fraction] = {}
        for e, (_, c) in zip(exps, items):
            k = int(e * m)
            acc[k] = acc.get(k, Fraction(0)) + Fraction(c)
        return cls(m, acc)

    @classmethod
    def polynomial(cls, coeffs: Sequence[Rational]) -> "PuiseuxPoly":
        """From coefficients b_0, b_1, ... of an ordinary polynomial."""
        return cls(1, {k: Fraction(c) for k, c in enumerate(coeffs)})

    @classmethod
    def binomial_basis(cls, coeffs: Sequence[int]) -> "PuiseuxPoly":
        """sum_i c_i C(x, i)."""
        out = [Fraction(0)] * max(1, len(coeffs))
        for i, c in enumerate(coeffs):
            if c:
                for k, b in enumerate(_binomial_poly(i)):
                    out[k] += c * b
        return cls.polynomial(out)

    def exponent(self, k: int) -> Fraction:
        return Fraction(k, self.m)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def top(self) -> int | None:
        return max(self.terms) if self.terms else None

    @property
    def is_polynomial(self) -> bool:
        return self.m == 1 and all(k >= 0 for k in self.terms)

    def with_m(self, m: int) -> dict[int, Fraction]:
        """Terms re-indexed over denominator m (a multiple of self.m)."""
        if m % self.m:
            raise ValueError("m must be a multiple of the stored denominator")
        f = m // self.m
        return {k * f: v for k, v in self.terms.items()}

    def __add__(self, other: "PuiseuxPoly") -> "PuiseuxPoly":
        m = _lcm(self.m, other.m)
        a, b = self.with_m(m), other.with_m(m)
        for k, v in b.items():
            a[k] = a.get(k, Fraction(0)) + v
        return PuiseuxPoly(m, a)

    def __neg__(self) -> "PuiseuxPoly":
        return PuiseuxPoly(self.m, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "PuiseuxPoly") -> "PuiseuxPoly":
        return self + (-other)

    def scale(self, c: Rational) -> "PuiseuxPoly":
        return PuiseuxPoly(self.m, {k: v * c for k, v in self.terms.items()})

    def __call__(self, x: Rational) -> Fraction:
        """Exact value at a rational x; only for polynomials."""
        if not self.is_polynomial:
            raise ValueError("exact evaluation needs a polynomial")
        x = Fraction(x)
        return sum((v * x**k for k, v in self.terms.items()), Fraction(0))

    def coefficients(self) -> list[Fraction]:
        if not self.is_polynomial:
            raise ValueError("not a polynomial")
        if self.is_zero:
            return [Fraction(0)]
        return [self.terms.get(k, Fraction(0)) for k in range(self.top + 1)]

    def to_laurent(self, order: int | None = None) -> "LaurentSeries":
        if self.m != 1:
            raise ValueError("Laurent form needs integer exponents")
        return LaurentSeries(tuple(sorted((-k, v) for k, v in self.terms.items())), order)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            v, e = self.terms[k], self.exponent(k)
            if e == 0:
                mono = ""
            elif e == 1:
                mono = "x"
            elif e.denominator == 1:
                mono = f"x^{e.numerator}"
            else:
                mono = f"x^({e.numerator}/{e.denominator})"
            if mono and abs(v) == 1:
                coef = "-" if v < 0 else "+"
                parts.append(f"{coef} {mono}")
            else:
                sign = "-" if v < 0 else "+"
                parts.append(f"{sign} {abs(v)}{'*' + mono if mono else ''}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


@lru_cache(maxsize=None)
def _binomial_poly(i: int) -> tuple[Fraction, ...]:
    """Coefficients of C(x, i) = x(x-1)...(x-i+1)/i!."""
    poly = [Fraction(1)]
    for j in range(i):
        nxt = [Fraction(0)] * (len(poly) + 1)
        for k, c in enumerate(poly):
            nxt[k + 1] += c
            nxt[k] -= j * c
        poly = nxt
    f = math.factorial(i)
    return tuple(c / f for c in poly)


def _needs_order(p: PuiseuxPoly) -> bool:
    return p.m != 1 or any(k < 0 for k in p.terms)


def _shift_floor(p: PuiseuxPoly, floor_k: int | None, by: Rational = 1) -> PuiseuxPoly:
    """p(x + by), keeping every term with index >= floor_k (exact there)."""
    out: dict[int, Fraction] = {}
    by = Fraction(by)
    for k, a in p.terms.items():
        e = Fraction(k, p.m)
        j = 0
        power = Fraction(1)
        while True:
            kk = k - j * p.m
            if floor_k is not None and kk < floor_k:
                break
            b = generalized_binom(e, j)
            if b == 0 and e.denominator == 1 and e >= 0 and j > e:
                break
            if b:
                out[kk] = out.get(kk, Fraction(0)) + a * b * power
            j += 1
            power *= by
            if floor_k is None and j > e:
                break
    return PuiseuxPoly(p.m, out)


def _floor_for(p: PuiseuxPoly, order: int) -> int:
    return p.top - (order - 1) * p.m


def shift_poly(p: PuiseuxPoly, order: int | None = None, by: Rational = 1) -> PuiseuxPoly:
    """sigma(p) = p(x + 1), or p(x + by).

    Polynomials expand exactly.  Fractional or negative exponents need
    ``order``: the result keeps every exponent within ``order - 1`` of the
    leading exponent, and those coefficients are exact.
    """
    if p.is_zero:
        return p
    if _needs_order(p):
        if order is None:
            raise ValueError("a truncation order is required for fractional or negative exponents")
        return _shift_floor(p, _floor_for(p, order), by)
    return _shift_floor(p, None, by)


def difference_power(p: PuiseuxPoly, k: int, order: int | None = None) -> PuiseuxPoly:
    """(sigma - 1)^k p, with the same truncation rule as :func:`shift_poly`.

    The exponent floor is fixed from p's leading term, so every retained
    coefficient is exact after all k applications.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if p.is_zero:
        return p
    if _needs_order(p):
        if order is None:
            raise ValueError("a truncation order is required for fractional or negative exponents")
        floor_k = _floor_for(p, order)
    else:
        floor_k = None
    out = p
    for _ in range(k):
        if out.is_zero:
            break
        out = _shift_floor(out, floor_k, 1) - (out if floor_k is None else _truncate(out, floor_k))
    return out


def _truncate(p: PuiseuxPoly, floor_k: int) -> PuiseuxPoly:
    return PuiseuxPoly(p.m, {k: v for k, v in p.terms.items() if k >= floor_k})


def default_order(p: PuiseuxPoly) -> int:
    d = max(0, p.top or 0)
    return 2 * (d + p.m)


# ---------------------------------------------------------------------------
# Laurent series in 1/x


@dataclass(frozen=True)
class LaurentSeries:
    """sum_j c_j x^(-j); coefficients known exactly for j < order (None: exact)."""

    terms: tuple[tuple[int, Fraction], ...]
    order: int | None = None

    def __post_init__(self):
        clean = tuple((int(j), Fraction(c)) for j, c in self.terms if Fraction(c) != 0)
        js = [j for j, _ in clean]
        if any(b <= a for a, b in zip(js, js[1:])):
            raise ValueError("exponents must be strictly increasing")
        if self.order is not None:
            clean = tuple((j, c) for j, c in clean if j < self.order)
        object.__setattr__(self, "terms", clean)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def shift(self) -> "LaurentSeries":
        """sigma: x^(-j) -> x^(-j) sum_i binom(-j, i) x^(-i), truncated at ``order``."""
        if self.order is None and any(j > 0 for j, _ in self.terms):
            raise ValueError("negative powers of x need a truncation order")
        acc: dict[int, Fraction] = {}
        for j, c in self.terms:
            i = 0
            while self.order is None or j + i < self.order:
                b = generalized_binom(-j, i)
                if b == 0 and j <= 0 and i > -j:
                    break
                acc[j + i] = acc.get(j + i, Fraction(0)) + c * b
                i += 1
        return LaurentSeries(tuple(sorted(acc.items())), self.order)


def valuation(s: LaurentSeries) -> float | int:
    """Order j_0 of the leading term c_{j0} x^(-j0); +inf for the zero series.

    This is the order at infinity: x^(-1) + x^(-2) has valuation 1 and 3x^2
    has valuation -2.  Strictly decaying tails have positive valuation.
    """
    if s.is_zero:
        return math.inf
    return s.terms[0][0]


# ---------------------------------------------------------------------------
# the decision stages


def constant_stage(p: PuiseuxPoly) -> Verdict | None:
    """Bounded inputs (no positive exponent): almost-integer forces f = a_0."""
    if p.is_zero:
        return Verdict(Status.INTEGER_VALUED, "f = 0", 1, "constant")
    if p.top > 0:
        return None
    if set(p.terms) == {0}:
        a0 = p.terms[0]
        if a0.denominator == 1:
            return Verdict(Status.CONSTANT, f"f = {a0} is an integer constant", 1, "constant")
        return Verdict(Status.NOT_ALMOST_INTEGER, f"f = {a0} is a non-integer constant", None, "constant")
    k = max(k for k in p.terms if k < 0)
    return Verdict(
        Status.NOT_ALMOST_INTEGER,
        f"bounded but nonconstant: the term {p.terms[k]}*x^({p.exponent(k)}) makes f(n) approach "
        f"a_0 = {p.terms.get(0, 0)} without ever equalling it",
        None, "constant",
    )


def tail_stage(p: PuiseuxPoly, order: int | None = None) -> Verdict | None:
    """Negative exponents: (sigma - 1)^N f is bounded, nonzero and nonconstant.

    N = floor(top exponent) + 1 annihilates the integer-exponent polynomial
    part and sends the rest to negative exponents, so a nonzero result can
    not be almost-integer-valued.
    """
    neg = {k: v for k, v in p.terms.items() if k < 0}
    if not neg:
        return None
    order = default_order(p) if order is None else order
    N = math.floor(Fraction(p.top, p.m)) + 1
    r = difference_power(p, N, order + N)
    lead = max(r.terms) if r.terms else None
    if lead is None or lead >= 0:
        raise ArithmeticError("(sigma-1)^N left a non-decaying term; truncation order too small")
    kneg = max(neg)
    return Verdict(
        Status.NOT_ALMOST_INTEGER,
        f"negative-exponent term {neg[kneg]}*x^({p.exponent(kneg)}): (sigma-1)^{N} f has leading term "
        f"{r.terms[lead]}*x^({r.exponent(lead)}) != 0, a bounded nonconstant function",
        None, "tail", order,
    )


def fractional_obstruction(p: PuiseuxPoly, order: int | None = None) -> Verdict | None:
    """Vandermonde elimination of fractional exponents; None when p is a polynomial.

    For every residue p' = 1..m-1 the coefficient of x^(p'/m - 1) in
    sigma^q(p), q = 1..S+1 with S = floor((d - p')/m), equals
    q * sum_s binom((p'+sm)/m, 1+s) q^s a_{p'+sm}.  Solving that system
    recovers the products binom(...) a_{p'+sm}; an almost-integer f needs them
    all zero, and the binomials are nonzero, so any fractional a_k is a witness.
    """
    if any(k < 0 for k in p.terms):
        raise ValueError("fractional_obstruction expects nonnegative exponents")
    if p.m == 1 or p.is_zero:
        return None
    m, d = p.m, p.top
    order = default_order(p) if order is None else order
    for pp in range(1, m):
        S = (d - pp) // m if d >= pp else -1
        if S < 0:
            continue
        target = pp - m
        qs = list(range(1, S + 2))
        obs = []
        for q in qs:
            sq = shift_poly(p, order, by=q)
            obs.append(sq.terms.get(target, Fraction(0)) / q)
        u = solve_exact(vandermonde(qs, S + 1), obs)
        for s, us in enumerate(u):
            k = pp + s * m
            b = generalized_binom(Fraction(k, m), 1 + s)
            a = us / b
            if a != p.terms.get(k, Fraction(0)):
                raise ArithmeticError("Vandermonde solve disagrees with the stored coefficient")
            if a != 0:
                return Verdict(
                    Status.NOT_ALMOST_INTEGER,
                    f"coefficient a_{k} of x^({Fraction(k, m)}) (m = {m}, p' = {pp}) is forced to zero by the "
                    f"{S + 1}x{S + 1} Vandermonde system but equals {a}",
                    None, "fractional", order,
                )
    raise AssertionError("fractional terms present but no residue produced a witness")


def _int_form(p: PuiseuxPoly) -> tuple[list[int], int]:
    """Integer numerators and common denominator of a polynomial."""
    coeffs = p.coefficients()
    den = reduce(_lcm, (c.denominator for c in coeffs), 1)
    return [int(c * den) for c in coeffs], den


def integer_valued_verdict(p: PuiseuxPoly) -> Verdict:
    """Leading-coefficient ladder then the integer-valuedness check.

    At degree n the constant (sigma - 1)^n g = n! b_n must be an integer; then
    g <- n! g - n! b_n x^n.  Surviving polynomials are rational with
    ell = lcm of coefficient denominators, and f itself is integer-valued iff
    the forward differences Delta^i f(0), i <= deg, are all integers.
    """
    if not p.is_polynomial:
        raise ValueError("integer_valued_verdict needs a polynomial")
    return ladder_int(*_int_form(p))


def ladder_int(num: Sequence[int], den: int) -> Verdict:
    """:func:`integer_valued_verdict` on f = sum num[k] x^k / den (integers only)."""
    g = math.gcd(den, *num)
    if g > 1:
        num, den = [c // g for c in num], den // g
    g = list(num)
    while len(g) > 1 and g[-1] == 0:
        g.pop()
    d = len(g) - 1
    level = 0
    while any(g):
        n = len(g) - 1
        fact = math.factorial(n)
        if (fact * g[n]) % den:
            return Verdict(
                Status.NOT_ALMOST_INTEGER,
                f"ladder level {level}: (sigma-1)^{n} g = {n}! b_{n} = {Fraction(fact * g[n], den)} is not an integer",
                None, "ladder",
            )
        g = [fact * c for c in g[:n]]
        while len(g) > 1 and g[-1] == 0:
            g.pop()
        level += 1
    vals = [sum(c * j**k for k, c in enumerate(num[: d + 1])) for j in range(d + 1)]
    for i in range(d + 1):
        if vals[0] % den:
            return Verdict(
                Status.NOT_ALMOST_INTEGER,
                f"Delta^{i} f(0) = {Fraction(vals[0], den)} is not an integer, so f(n) misses Z "
                f"periodically (distance >= 1/{den})",
                None, "integrality",
            )
        vals = [b - a for a, b in zip(vals, vals[1:])]
    return Verdict(Status.INTEGER_VALUED, f"integer-valued polynomial of degree {d}", den, "integrality")


@lru_cache(maxsize=None)
def binomial_numerators(max_degree: int) -> tuple[tuple[int, ...], int]:
    """C(x, i), i <= max_degree, as integer coefficient rows over the common denominator max_degree!."""
    den = math.factorial(max_degree)
    rows = tuple(tuple(int(c * den) for c in _binomial_poly(i)) for i in range(max_degree + 1))
    return rows, den


def binomial_combination_int(coeffs: Sequence[int]) -> tuple[list[int], int]:
    """sum_i c_i C(x, i) in the integer form used by :func:`ladder_int`."""
    rows, den = binomial_numerators(len(coeffs) - 1)
    num = [0] * len(coeffs)
    for c, row in zip(coeffs, rows):
        if c:
            for k, v in enumerate(row):
                num[k] += c * v
    return num, den


def decide(p: PuiseuxPoly, order: int | None = None) -> Verdict:
    """Full pipeline; almost-integer-valued inputs come out integer_valued."""
    v = constant_stage(p)
    if v is not None:
        if v.status is Status.CONSTANT:
            return Verdict(Status.INTEGER_VALUED, v.witness, 1, "constant")
        return v
    for stage in (tail_stage, fractional_obstruction):
        v = stage(p, order)
        if v is not None:
            return v
    return integer_valued_verdict(p)


# ---------------------------------------------------------------------------
# text input


_X = sympy.Symbol("x")


class ParsedPoly(NamedTuple):
    poly: PuiseuxPoly | None
    irrational: tuple[tuple[str, str], ...]


def parse_puiseux(text: str) -> ParsedPoly:
    """Parse ``coef * x^(p/q) + ...``; binomial(x, i) is accepted too.

    Irrational numeric coefficients are reported separately (exponent,
    coefficient text) because the exact path only represents rationals.
    """
    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    try:
        expr = parse_expr(text.replace("−", "-"), local_dict={"x": _X, "binomial": sympy.binomial, "C": sympy.binomial},
                          transformations=standard_transformations + (convert_xor,))
    except Exception as exc:  # sympy raises a zoo of types
        raise ValueError(f"cannot parse {text!r}: {exc}") from None
    expr = sympy.expand(sympy.expand_func(sympy.sympify(expr)))
    if expr.free_symbols - {_X}:
        raise ValueError(f"unknown symbols {sorted(map(str, expr.free_symbols - {_X}))}")
    pairs: dict[Fraction, Fraction] = {}
    irr = []
    for t in sympy.Add.make_args(expr):
        if t == 0:
            continue
        coef, mono = t.as_independent(_X, as_Add=False)
        if mono == 1:
            e = sympy.Integer(0)
        else:
            base, e = mono.as_base_exp()
            if base != _X or not e.is_Rational:
                raise ValueError(f"term {t} is not a rational power of x")
        if coef.has(sympy.Float):
            raise ValueError(f"coefficient {coef} is a float; write rationals as a/b")
        if not coef.is_number:
            raise ValueError(f"coefficient {coef} is not numeric")
        ef = Fraction(int(e.p), int(e.q))
        if coef.is_rational:
            c = Fraction(int(sympy.numer(coef)), int(sympy.denom(coef)))
            pairs[ef] = pairs.get(ef, Fraction(0)) + c
        else:
            irr.append((str(ef), str(coef)))
    return ParsedPoly(PuiseuxPoly.from_exponents(pairs), tuple(irr))


def decide_text(text: str) -> Verdict:
    parsed = parse_puiseux(text)
    if parsed.irrational:
        e, c = max(parsed.irrational, key=lambda ec: Fraction(ec[0]))
        return Verdict(Status.NOT_ALMOST_INTEGER,
                       f"coefficient {c} of x^({e}) is irrational; the ladder needs n! b_n in Z", None, "ladder")
    return decide(parsed.poly)


# ---------------------------------------------------------------------------
# numeric evidence from samples


class FitResult(NamedTuple):
    ok: bool
    nearest: tuple[int, ...]
    witness: int | None
    sensitivity: dict


def _nearest_int(v: float) -> int:
    # ties go to the larger integer
    return math.floor(v + 0.5)


def _fit(samples, logC: float) -> tuple[bool, tuple[int, ...], int | None]:
    nearest = []
    for n, v in samples:
        nearest.append(_nearest_int(complex(v).real))
    start = len(samples) // 4
    for i in range(start, len(samples)):
        n, v = samples[i]
        v = complex(v)
        if v.imag != 0 and math.log(abs(v.imag)) >= logC - n:
            return False, tuple(nearest), i
        err = abs(v.real - nearest[i])
        if err != 0 and math.log(err) >= logC - n:
            return False, tuple(nearest), i
    return True, tuple(nearest), None


def almost_integer_fit(samples: Sequence[tuple[int, complex]], C: float) -> FitResult:
    """Evidence (never proof) that |f(n) - m_n| < C e^(-n) beyond the first quartile.

    The comparison is made in log form, so tiny tolerances do not underflow.
    ``sensitivity`` repeats the test at C/10 and 10C.
    """
    if len(samples) < 10:
        raise ValueError("need at least 10 samples")
    ns = [n for n, _ in samples]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("sample indices must be strictly increasing")
    if C <= 0:
        raise ValueError("C must be positive")
    ok, nearest, wit = _fit(samples, math.log(C))
    sens = {f"{C / 10:.6g}": _fit(samples, math.log(C / 10))[0], f"{10 * C:.6g}": _fit(samples, math.log(10 * C))[0]}
    return FitResult(ok, nearest, wit, sens)
