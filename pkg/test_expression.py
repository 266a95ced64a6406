#!/usr/bin/env python3
"""
Tests for the expression parser and the second-order jets it evaluates to
"""
import math
import os
import sys

import numpy as np
import pytest

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from alh.core.errors import DomainError, ExpressionSyntaxError, UnknownIdentifierError
from alh.services.expression import BinOp, Num, Sym, eval_jet2, parse_expression
from alh.services.jet import Jet2


def test_parse_builds_tree():
    """r^2 parses to a power node over a coordinate and a literal"""
    e = parse_expression("r^2", ["r"])
    assert e.root == BinOp("^", Sym("r", "coord"), Num(2.0))


def test_power_is_right_associative():
    e = parse_expression("2^3^2", ["r"])
    assert e.evaluate([1.0], {}) == 512.0


def test_power_binds_tighter_than_unary_minus():
    e = parse_expression("-r^2", ["r"])
    assert e.evaluate([3.0], {}) == -9.0


def test_constants_and_parameters():
    e = parse_expression("m*cos(pi*r) + e", ["r"], ["m"])
    assert e.evaluate([1.0], {"m": 2.0}) == pytest.approx(-2.0 + math.e)
    assert e.identifiers() == {"r", "m"}


def test_pretty_round_trip():
    """Re-parsing the canonical text gives back the same tree"""
    e = parse_expression("1/(1 + r^2) - sin(theta)^2*r", ["r", "theta"])
    again = parse_expression(e.pretty(), ["r", "theta"])
    assert again == e


def test_unknown_identifier_reports_position():
    with pytest.raises(UnknownIdentifierError) as info:
        parse_expression("r + q", ["r"])
    assert info.value.name == "q"
    assert info.value.position == 4


def test_unknown_function():
    with pytest.raises(UnknownIdentifierError):
        parse_expression("erf(r)", ["r"])


@pytest.mark.parametrize("text", ["r +* 2", "r^", "(r", "", "   "])
def test_syntax_errors(text):
    with pytest.raises(ExpressionSyntaxError):
        parse_expression(text, ["r"])


def test_bind_parameters():
    e = parse_expression("m*r", ["r"], ["m"]).bind({"m": 2.0})
    assert e.params == ()
    assert e.evaluate([3.0], {}) == 6.0
    with pytest.raises(UnknownIdentifierError):
        e.bind({"k": 1.0})


def test_jet_of_sqrt_at_zero_of_argument_square():
    jet = eval_jet2(parse_expression("sqrt(r^2+1)", ["r"]), [0.0])
    assert jet.value == 1.0
    assert jet.grad.tolist() == [0.0]
    assert jet.hess.tolist() == [[1.0]]


def test_jet_matches_finite_differences():
    """sinh(t)*cos(p) at (0.7, 0.3) against central differences"""
    e = parse_expression("sinh(t)*cos(p)", ["t", "p"])
    x = np.array([0.7, 0.3])
    jet = eval_jet2(e, x)
    h = 1e-5
    for k in range(2):
        step = np.zeros(2)
        step[k] = h
        fd = (e.evaluate(x + step, {}) - e.evaluate(x - step, {})) / (2 * h)
        assert jet.grad[k] == pytest.approx(fd, rel=1e-8)
    h = 1e-4
    for k in range(2):
        step = np.zeros(2)
        step[k] = h
        fd = (e.evaluate(x + step, {}) - 2 * e.evaluate(x, {}) + e.evaluate(x - step, {})) / (h * h)
        assert jet.hess[k, k] == pytest.approx(fd, rel=1e-5)


def test_hessian_is_exactly_symmetric():
    e = parse_expression("exp(x*y)*sin(x+y^2)/(1+x^2) + log(2+y)*tanh(x)", ["x", "y"])
    jet = eval_jet2(e, [0.4, -0.9])
    assert np.array_equal(jet.hess, jet.hess.T)


def test_domain_error_names_subexpression():
    e = parse_expression("sqrt(r - 5)", ["r"])
    with pytest.raises(DomainError) as info:
        eval_jet2(e, [1.0])
    assert info.value.subexpression.startswith("sqrt(")
    with pytest.raises(DomainError):
        e.evaluate([1.0], {})


def test_division_by_zero_is_a_domain_error():
    e = parse_expression("1/(r - 2)", ["r"])
    with pytest.raises(DomainError):
        eval_jet2(e, [2.0])


def test_jet_arithmetic_with_plain_numbers():
    x = Jet2.variable(0, 2.0, 1)
    y = 3.0 - x * 2.0 + 1.0 / x
    assert y.value == pytest.approx(-0.5)
    assert y.grad[0] == pytest.approx(-2.0 - 0.25)
    assert y.hess[0, 0] == pytest.approx(2.0 / 8.0)


def test_negative_literals_keep_their_text_form():
    """scaled() introduces negative literals; their text re-parses to the same text and values"""
    coords = ["r", "theta"]
    e = parse_expression("r^2 - theta", coords).scaled(-2.0)
    text = e.pretty()
    again = parse_expression(text, coords)
    assert again.pretty() == text
    assert again.evaluate([1.5, 0.2], {}) == e.evaluate([1.5, 0.2], {})
    assert parse_expression(Num(-0.0).pretty(), coords).evaluate([1.0, 1.0], {}) == 0.0


def test_non_finite_literals_are_rejected():
    e = parse_expression("m*r", ["r"], ["m"])
    with pytest.raises(ValueError):
        Num(float("inf")).pretty()
    with pytest.raises(ValueError):
        e.scaled(float("nan"))
    with pytest.raises(ValueError):
        e.bind({"m": float("inf")})


FIRST = {-2: 1.0 / 12, -1: -8.0 / 12, 1: 8.0 / 12, 2: -1.0 / 12}
SECOND = {-2: -1.0 / 12, -1: 16.0 / 12, 0: -30.0 / 12, 1: 16.0 / 12, 2: -1.0 / 12}


def random_polynomial(rng, names, degree=4, terms=8):
    """Text of a polynomial of total degree <= degree with random coefficients"""
    parts = []
    for _ in range(terms):
        powers = rng.multinomial(int(rng.integers(0, degree + 1)), [1.0 / len(names)] * len(names))
        factors = [f"({float(rng.uniform(-2.0, 2.0))!r})"]
        factors += [f"{name}^{k}" if k > 1 else name for name, k in zip(names, powers) if k > 0]
        parts.append("*".join(factors))
    return " + ".join(parts)


def stencil_jet(e, x, h=1e-2):
    """Gradient and Hessian from fourth-order central differences"""
    n = len(x)
    unit = np.eye(n) * h

    def f(point):
        return e.evaluate(point, {})

    grad = np.array([sum(c * f(x + a * unit[i]) for a, c in FIRST.items()) / h for i in range(n)])
    hess = np.empty((n, n))
    for i in range(n):
        hess[i, i] = sum(c * f(x + a * unit[i]) for a, c in SECOND.items()) / h ** 2
        for j in range(i + 1, n):
            hess[i, j] = hess[j, i] = sum(
                ca * cb * f(x + a * unit[i] + b * unit[j])
                for a, ca in FIRST.items()
                for b, cb in FIRST.items()
            ) / h ** 2
    return grad, hess


@pytest.mark.parametrize("nvars", [1, 2, 3, 4])
def test_jets_of_random_polynomials(nvars):
    """The stencils are exact up to degree 4, so only roundoff separates them from the jet"""
    rng = np.random.default_rng(100 + nvars)
    names = [f"x{k}" for k in range(nvars)]
    for _ in range(5):
        e = parse_expression(random_polynomial(rng, names), names)
        x = rng.uniform(-1.5, 1.5, size=nvars)
        jet = eval_jet2(e, x)
        grad, hess = stencil_jet(e, x)
        assert jet.value == pytest.approx(e.evaluate(x, {}), rel=1e-14, abs=1e-14)
        assert np.allclose(jet.grad, grad, rtol=1e-7, atol=1e-7 * (1.0 + np.abs(jet.grad).max()))
        assert np.allclose(jet.hess, hess, rtol=1e-7, atol=1e-7 * (1.0 + np.abs(jet.hess).max()))


def test_jets_are_linear():
    rng = np.random.default_rng(7)
    names = ["x", "y", "z"]
    a = 1.7
    t1, t2 = random_polynomial(rng, names), random_polynomial(rng, names)
    x = np.array([0.3, -1.1, 0.8])
    j1 = eval_jet2(parse_expression(t1, names), x)
    j2 = eval_jet2(parse_expression(t2, names), x)
    combined = eval_jet2(parse_expression(f"({a!r})*({t1}) + ({t2})", names), x)
    assert combined.value == pytest.approx(a * j1.value + j2.value, rel=1e-12, abs=1e-12)
    assert np.allclose(combined.grad, a * j1.grad + j2.grad, rtol=1e-12, atol=1e-12)
    assert np.allclose(combined.hess, a * j1.hess + j2.hess, rtol=1e-12, atol=1e-12)


OUTER = {
    "exp": (math.exp, math.exp),
    "sin": (math.cos, lambda u: -math.sin(u)),
    "cos": (lambda u: -math.sin(u), lambda u: -math.cos(u)),
    "sinh": (math.cosh, math.sinh),
    "cosh": (math.sinh, math.cosh),
    "tanh": (lambda u: 1 - math.tanh(u) ** 2, lambda u: -2 * math.tanh(u) * (1 - math.tanh(u) ** 2)),
    "sqrt": (lambda u: 0.5 / math.sqrt(u), lambda u: -0.25 * u ** -1.5),
    "log": (lambda u: 1 / u, lambda u: -1 / u ** 2),
}


@pytest.mark.parametrize("func", sorted(OUTER))
def test_chain_rule(func):
    """f(g): grad = f'(g) dg, hess = f''(g) dg dg^T + f'(g) d^2 g"""
    names = ["x", "y"]
    inner_text = "1.5 + x^2*y + 0.3*y"
    inner = eval_jet2(parse_expression(inner_text, names), [0.6, 0.4])
    outer = eval_jet2(parse_expression(f"{func}({inner_text})", names), [0.6, 0.4])
    d1, d2 = OUTER[func]
    u = inner.value
    assert np.allclose(outer.grad, d1(u) * inner.grad, rtol=1e-12, atol=1e-14)
    expected = d2(u) * np.outer(inner.grad, inner.grad) + d1(u) * inner.hess
    assert np.allclose(outer.hess, expected, rtol=1e-12, atol=1e-14)


def test_nested_functions():
    """exp(sin(x)): d2 = (cos^2 - sin) exp(sin)"""
    e = parse_expression("exp(sin(x))", ["x"])
    jet = eval_jet2(e, [0.9])
    s, c = math.sin(0.9), math.cos(0.9)
    assert jet.grad[0] == pytest.approx(c * math.exp(s), rel=1e-13)
    assert jet.hess[0, 0] == pytest.approx((c * c - s) * math.exp(s), rel=1e-13)
